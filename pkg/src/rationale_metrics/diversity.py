"""Per-input diversity proxies over embedding groups.

Three families:

* coverage   -- mean / worst-case distance from a candidate pool to its
                nearest selected member (smaller = better coverage);
* spectral   -- effective rank, log-det volume, participation ratio and
                anisotropy of the (1/m)-normalized member covariance
                (larger erank/logdet/pr = more spread);
* redundancy -- mean squared pairwise distance, mean pairwise cosine and the
                near-duplicate rate at a cosine threshold tau.

Plus the dataset-level source-pair matrices: mean cosine C, distance D = 1-C
and near-duplicate rate N over inputs shared by each pair of sources.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .records import EmbeddingGroup

EIGENVALUE_CLAMP = 1e-12


class ZeroNormEmbeddingError(ValueError):
    """Cosine against a zero-norm embedding is undefined; identifies the member."""


@dataclass(frozen=True, slots=True)
class CoverageResult:
    r_avg: float
    r_max: float


@dataclass(frozen=True, slots=True)
class SpectralResult:
    erank: float
    logdet: float
    pr: float
    anisotropy: float
    eigenvalues: tuple[float, ...]
    degenerate: bool


@dataclass(frozen=True, slots=True)
class RedundancyResult:
    d_pair: float
    sim_avg: float
    near_dup_rate: float


@dataclass(slots=True)
class SourcePairMatrices:
    sources: tuple[str, ...]
    c: np.ndarray
    d: np.ndarray
    n: np.ndarray
    missing: np.ndarray
    inputs_per_pair: np.ndarray


def _as_matrix(points) -> np.ndarray:
    if isinstance(points, EmbeddingGroup):
        return points.matrix
    matrix = np.asarray(points, dtype=float)
    if matrix.ndim != 2:
        raise ValueError(f"expected a 2-D point matrix, got shape {matrix.shape}")
    return matrix


def min_distances(pool, selected) -> np.ndarray:
    """Per pool point, Euclidean distance to the nearest selected point."""
    pool = _as_matrix(pool)
    selected = _as_matrix(selected)
    if selected.shape[0] == 0:
        raise ValueError("selection must be non-empty")
    if pool.shape[0] == 0:
        raise ValueError("pool must be non-empty")
    if pool.shape[1] != selected.shape[1]:
        raise ValueError("pool and selection dimensions differ")
    diff = pool[:, None, :] - selected[None, :, :]
    return np.sqrt((diff * diff).sum(axis=2)).min(axis=1)


def coverage(pool, selected) -> CoverageResult:
    """Average and worst-case nearest-selected distance over the pool."""
    dists = min_distances(pool, selected)
    return CoverageResult(r_avg=float(dists.mean()), r_max=float(dists.max()))


def covariance_eigs(points, path: str = "auto") -> np.ndarray:
    """Eigenvalues (descending, clamped at 0) of the 1/m member covariance.

    ``path='gram'`` diagonalizes the m x m centered Gram matrix, ``'direct'``
    the d x d covariance; both return the top min(m, d) eigenvalues and agree
    up to numerical error.  ``'auto'`` picks the cheaper one.
    """
    x = _as_matrix(points)
    m, d = x.shape
    if path == "auto":
        path = "gram" if m < d else "direct"
    centered = x - x.mean(axis=0)
    if path == "gram":
        gram = centered @ centered.T / m
        eigs = np.linalg.eigvalsh(gram)
    elif path == "direct":
        cov = centered.T @ centered / m
        eigs = np.linalg.eigvalsh(cov)
    else:
        raise ValueError(f"unknown eigen path '{path}'")
    eigs = np.maximum(eigs[::-1], 0.0)
    k = min(m, d)
    if len(eigs) < k:
        eigs = np.concatenate([eigs, np.zeros(k - len(eigs))])
    return eigs[:k]


def spectral(points, alpha: float = 1.0) -> SpectralResult:
    """Spectrum-derived spread measures; degenerate groups yield a flagged zero result."""
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    x = _as_matrix(points)
    if x.shape[0] < 2:
        return SpectralResult(0.0, 0.0, 0.0, 0.0, (0.0,) * min(x.shape), True)
    eigs = covariance_eigs(x)
    lam_max = eigs[0]
    if lam_max <= 0.0:
        return SpectralResult(0.0, 0.0, 0.0, 0.0, tuple(eigs), True)
    eigs = np.where(eigs < EIGENVALUE_CLAMP * lam_max, 0.0, eigs)
    trace = eigs.sum()
    return SpectralResult(
        erank=float(trace / lam_max),
        logdet=float(np.log1p(alpha * eigs).sum()),
        pr=float(trace**2 / (eigs**2).sum()),
        anisotropy=float(lam_max / trace),
        eigenvalues=tuple(float(v) for v in eigs),
        degenerate=False,
    )


def _unit_rows(points, source_ids: Sequence[str] | None) -> np.ndarray:
    x = _as_matrix(points)
    norms = np.linalg.norm(x, axis=1)
    bad = np.where(norms == 0.0)[0]
    if bad.size:
        idx = int(bad[0])
        name = source_ids[idx] if source_ids is not None else f"row {idx}"
        raise ZeroNormEmbeddingError(f"zero-norm embedding for member '{name}'")
    return x / norms[:, None]


def redundancy(points, tau: float = 0.95) -> RedundancyResult:
    """All-pairs distance / cosine summaries; requires m >= 2 and nonzero norms."""
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must be in (0, 1], got {tau}")
    source_ids = points.source_ids if isinstance(points, EmbeddingGroup) else None
    x = _as_matrix(points)
    m = x.shape[0]
    if m < 2:
        raise ValueError("redundancy needs at least two members")
    iu = np.triu_indices(m, k=1)
    diff = x[iu[0]] - x[iu[1]]
    sq_dists = (diff * diff).sum(axis=1)
    unit = _unit_rows(x, source_ids)
    cosines = (unit @ unit.T)[iu]
    return RedundancyResult(
        d_pair=float(sq_dists.mean()),
        sim_avg=float(cosines.mean()),
        near_dup_rate=float((cosines >= tau).mean()),
    )


def source_pair_matrices(groups: Iterable[EmbeddingGroup], tau: float = 0.95) -> SourcePairMatrices:
    """Mean-cosine, cosine-distance and near-duplicate matrices over source pairs.

    For each input shared by two sources the per-input value averages over all
    cross pairs of their members; entries then average over shared inputs.
    Pairs with no shared input are NaN with ``missing`` set.
    """
    groups = list(groups)
    sources = sorted({s for g in groups for s in g.source_ids})
    index = {s: i for i, s in enumerate(sources)}
    k = len(sources)
    acc_c = np.zeros((k, k))
    acc_n = np.zeros((k, k))
    counts = np.zeros((k, k), dtype=int)

    for group in groups:
        unit = _unit_rows(group.matrix, group.source_ids)
        rows_by_source: dict[str, list[int]] = {}
        for row, source in enumerate(group.source_ids):
            rows_by_source.setdefault(source, []).append(row)
        present = sorted(rows_by_source)
        for a_pos, src_a in enumerate(present):
            for src_b in present[a_pos + 1:]:
                cross = unit[rows_by_source[src_a]] @ unit[rows_by_source[src_b]].T
                i, j = index[src_a], index[src_b]
                acc_c[i, j] += float(cross.mean())
                acc_n[i, j] += float((cross >= tau).mean())
                counts[i, j] += 1

    c = np.full((k, k), np.nan)
    n = np.full((k, k), np.nan)
    np.fill_diagonal(c, 1.0)
    np.fill_diagonal(n, 0.0)
    shared = counts > 0
    c[shared] = acc_c[shared] / counts[shared]
    n[shared] = acc_n[shared] / counts[shared]
    # symmetrize from the upper triangle
    iu = np.triu_indices(k, k=1)
    c[(iu[1], iu[0])] = c[iu]
    n[(iu[1], iu[0])] = n[iu]
    d = 1.0 - c
    np.fill_diagonal(d, 0.0)
    missing = np.isnan(c)
    counts_full = counts + counts.T
    return SourcePairMatrices(sources=tuple(sources), c=c, d=d, n=n,
                              missing=missing, inputs_per_pair=counts_full)


@dataclass(slots=True)
class ProxyRow:
    input_id: str
    backend_id: str
    m: int
    r_avg: float
    r_max: float
    erank: float
    logdet: float
    pr: float
    anisotropy: float
    d_pair: float
    sim_avg: float
    near_dup_rate: float
    degenerate: bool


def per_input_proxies(group: EmbeddingGroup, alpha: float, tau: float,
                      selected_sources: Sequence[str] | None = None) -> ProxyRow:
    """Every proxy for one group; coverage measures the selected-source subset
    against the full member pool (zero when all sources are selected)."""
    if selected_sources is None:
        selected = group.matrix
    else:
        wanted = set(selected_sources)
        rows = [i for i, s in enumerate(group.source_ids) if s in wanted]
        if not rows:
            raise ValueError(f"no members of input '{group.input_id}' match the selected sources")
        selected = group.matrix[rows]
    cov = coverage(group.matrix, selected)
    spec_res = spectral(group.matrix, alpha)
    if group.m >= 2:
        red = redundancy(group, tau)
        d_pair, sim_avg, near_dup = red.d_pair, red.sim_avg, red.near_dup_rate
    else:
        d_pair = sim_avg = near_dup = math.nan
    return ProxyRow(
        input_id=group.input_id, backend_id=group.backend_id, m=group.m,
        r_avg=cov.r_avg, r_max=cov.r_max,
        erank=spec_res.erank, logdet=spec_res.logdet, pr=spec_res.pr,
        anisotropy=spec_res.anisotropy,
        d_pair=d_pair, sim_avg=sim_avg, near_dup_rate=near_dup,
        degenerate=spec_res.degenerate,
    )


PROXY_NAMES = ("r_avg", "r_max", "erank", "logdet", "pr", "anisotropy",
               "d_pair", "sim_avg", "near_dup_rate")


def aggregate_proxies(rows: Sequence[ProxyRow]) -> dict[str, dict[str, float]]:
    """Mean and median of each proxy over inputs, NaN-aware."""
    out: dict[str, dict[str, float]] = {}
    for name in PROXY_NAMES:
        vals = np.asarray([getattr(r, name) for r in rows], dtype=float)
        vals = vals[np.isfinite(vals)]
        if vals.size:
            out[name] = {"mean": float(vals.mean()), "median": float(np.median(vals))}
        else:
            out[name] = {"mean": math.nan, "median": math.nan}
    return out
