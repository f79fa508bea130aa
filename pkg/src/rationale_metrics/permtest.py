"""Source-distinctness PERMANOVA with block-restricted permutations, plus
permutation-based Pearson/Spearman correlation.

The multivariate test removes the per-input mean from each embedding, computes
a one-way pseudo-F over source labels from coordinate sums of squares
(equivalent to the Euclidean distance-matrix form), and estimates the p-value
by re-shuffling source labels independently *within* each input block only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .records import EmbeddingGroup
from .util import average_ranks, derived_rng, ordered_map

RESIDUAL_TOL = 1e-10


class DegenerateDataError(ValueError):
    """All observations identical: no variance to test."""


@dataclass(frozen=True, slots=True)
class PermanovaResult:
    n: int
    k: int
    f_stat: float
    r_squared: float
    p_value: float
    permutations: int


@dataclass(frozen=True, slots=True)
class CorrelationResult:
    pearson_r: float
    spearman_rho: float
    p_value: float
    n: int
    permutations: int


@dataclass(slots=True)
class ResidualBlock:
    input_id: str
    source_ids: tuple[str, ...]
    vectors: np.ndarray


def residualize(groups: Sequence[EmbeddingGroup]) -> tuple[list[ResidualBlock], list[str]]:
    """Subtract each input's member mean; blocks with one member are excluded."""
    blocks: list[ResidualBlock] = []
    excluded: list[str] = []
    for group in sorted(groups, key=lambda g: g.input_id):
        if group.m < 2:
            excluded.append(group.input_id)
            continue
        centered = group.matrix - group.matrix.mean(axis=0)
        blocks.append(ResidualBlock(input_id=group.input_id,
                                    source_ids=group.source_ids,
                                    vectors=centered))
    return blocks, excluded


def _f_statistic(sq_norms: np.ndarray, x: np.ndarray, labels: np.ndarray,
                 k: int, ss_total: float) -> tuple[float, float]:
    """Pseudo-F and R^2 from coordinate sums of squares for one labeling."""
    n = len(labels)
    sums = np.zeros((k, x.shape[1]))
    np.add.at(sums, labels, x)
    counts = np.bincount(labels, minlength=k).astype(float)
    ss_within = float(sq_norms.sum() - ((sums * sums).sum(axis=1) / counts).sum())
    ss_between = ss_total - ss_within
    if ss_within <= 0.0:
        f = math.inf if ss_between > 0.0 else 0.0
    else:
        f = (ss_between / (k - 1)) / (ss_within / (n - k))
    return f, ss_between / ss_total


def permanova(blocks: Sequence[ResidualBlock], permutations: int = 199,
              seed: int = 0, jobs: int = 1) -> PermanovaResult:
    """Restricted-permutation PERMANOVA over residual blocks.

    p = (1 + #{F* >= F_obs}) / (1 + P); every permutation shuffles source
    labels independently within each block, so the attainable p grid is
    {i/(P+1)} with minimum 1/(P+1).
    """
    if not blocks:
        raise ValueError("no residual blocks to test")
    sources = sorted({s for b in blocks for s in b.source_ids})
    k = len(sources)
    if k < 2:
        raise ValueError(f"need >= 2 sources, got {k}")
    label_of = {s: i for i, s in enumerate(sources)}

    x = np.concatenate([b.vectors for b in blocks], axis=0)
    labels = np.concatenate([[label_of[s] for s in b.source_ids] for b in blocks]).astype(int)
    n = len(labels)
    counts = np.bincount(labels, minlength=k)
    thin = [sources[i] for i in range(k) if counts[i] < 2]
    if thin:
        raise ValueError(f"each source needs >= 2 observations overall; too few for {thin}")

    grand = x.mean(axis=0)
    centered = x - grand
    sq_norms = (centered * centered).sum(axis=1)
    ss_total = float(sq_norms.sum())
    if ss_total <= 0.0:
        raise DegenerateDataError("total sum of squares is zero; residuals carry no variance")

    f_obs, r_squared = _f_statistic(sq_norms, centered, labels, k, ss_total)

    if math.isinf(f_obs):
        return PermanovaResult(n=n, k=k, f_stat=f_obs, r_squared=r_squared,
                               p_value=1.0 / (permutations + 1), permutations=permutations)

    block_slices = []
    start = 0
    for b in blocks:
        block_slices.append((start, start + len(b.source_ids)))
        start += len(b.source_ids)

    def one_permutation(rep: int) -> float:
        rng = derived_rng(seed, rep)
        permuted = labels.copy()
        for lo, hi in block_slices:
            permuted[lo:hi] = permuted[lo:hi][rng.permutation(hi - lo)]
        return _f_statistic(sq_norms, centered, permuted, k, ss_total)[0]

    f_perm = ordered_map(one_permutation, list(range(1, permutations + 1)), jobs=jobs)
    exceed = sum(1 for f in f_perm if f >= f_obs)
    p_value = (1 + exceed) / (1 + permutations)
    return PermanovaResult(n=n, k=k, f_stat=f_obs, r_squared=r_squared,
                           p_value=p_value, permutations=permutations)


def min_attainable_p(permutations: int) -> float:
    return 1.0 / (permutations + 1)


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float((xc * xc).sum()) * float((yc * yc).sum()))
    return float((xc * yc).sum()) / denom


def correlate(x: Sequence[float], y: Sequence[float], permutations: int = 9999,
              seed: int = 0) -> CorrelationResult:
    """Pearson and Spearman with a two-sided permutation p-value for Pearson.

    Non-finite pairs are dropped first; needs >= 3 finite pairs and nonzero
    variance on both sides.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    keep = np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    n = len(x)
    if n < 3:
        raise ValueError(f"need >= 3 finite pairs, got {n}")
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise ValueError("correlation undefined: zero variance in x or y")

    r_obs = _pearson(x, y)
    rho = _pearson(average_ranks(x), average_ranks(y))

    abs_obs = abs(r_obs)
    exceed = 0
    for rep in range(1, permutations + 1):
        rng = derived_rng(seed, rep)
        if abs(_pearson(x, y[rng.permutation(n)])) >= abs_obs:
            exceed += 1
    p_value = (1 + exceed) / (1 + permutations)
    return CorrelationResult(pearson_r=r_obs, spearman_rho=rho, p_value=p_value,
                             n=n, permutations=permutations)


def matrix_uppertri_correlation(a: np.ndarray, b: np.ndarray,
                                permutations: int = 9999, seed: int = 0) -> CorrelationResult:
    """Correlation of the strict upper triangles (row-major) of two symmetric matrices."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    if a.shape[0] < 3:
        raise ValueError("need K >= 3 sources")
    iu = np.triu_indices(a.shape[0], k=1)
    return correlate(a[iu], b[iu], permutations=permutations, seed=seed)
