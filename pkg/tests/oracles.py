"""Independent brute-force references used to check the library.

Everything here is written as plain loops over pairs, subsets and relabelings
so it shares no code path with the package: coverage by exhaustive nearest
neighbor, covariance assembled entry by entry, logdet via slogdet of the full
matrix (not an eigenvalue sum), PR from matrix traces, PERMANOVA p-values by
full enumeration of restricted relabelings.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def dist(u, v) -> float:
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(u, v)))


def coverage_brute(pool, selected) -> tuple[float, float]:
    mins = [min(dist(u, s) for s in selected) for u in pool]
    return sum(mins) / len(mins), max(mins)


def covariance_matrix_brute(points) -> np.ndarray:
    points = [list(map(float, p)) for p in points]
    m, d = len(points), len(points[0])
    mean = [sum(p[j] for p in points) / m for j in range(d)]
    cov = [[0.0] * d for _ in range(d)]
    for p in points:
        c = [p[j] - mean[j] for j in range(d)]
        for a in range(d):
            for b in range(d):
                cov[a][b] += c[a] * c[b] / m
    return np.array(cov)


def spectral_brute(points, alpha: float) -> dict[str, float]:
    cov = covariance_matrix_brute(points)
    d = cov.shape[0]
    trace = float(np.trace(cov))
    trace_sq = float((cov * cov).sum())  # tr(S^2) for symmetric S
    lam_max = float(np.linalg.eigvalsh(cov)[-1])
    sign, logdet = np.linalg.slogdet(np.eye(d) + alpha * cov)
    assert sign > 0
    return {
        "erank": trace / lam_max,
        "logdet": float(logdet),
        "pr": trace**2 / trace_sq,
        "anisotropy": lam_max / trace,
    }


def redundancy_brute(points, tau: float) -> tuple[float, float, float]:
    points = [list(map(float, p)) for p in points]
    m = len(points)
    sq_dists, cosines = [], []
    for i in range(m):
        for j in range(i + 1, m):
            sq_dists.append(dist(points[i], points[j]) ** 2)
            dot = sum(a * b for a, b in zip(points[i], points[j]))
            ni = math.sqrt(sum(a * a for a in points[i]))
            nj = math.sqrt(sum(a * a for a in points[j]))
            cosines.append(dot / (ni * nj))
    n_pairs = len(sq_dists)
    return (sum(sq_dists) / n_pairs,
            sum(cosines) / n_pairs,
            sum(1 for c in cosines if c >= tau) / n_pairs)


def source_pair_brute(inputs: dict[str, dict[str, list]], tau: float):
    """inputs: input_id -> source_id -> list of vectors.  Returns (sources, C, N)."""
    sources = sorted({s for per in inputs.values() for s in per})
    k = len(sources)
    c = [[math.nan] * k for _ in range(k)]
    n = [[math.nan] * k for _ in range(k)]
    for i, sa in enumerate(sources):
        c[i][i], n[i][i] = 1.0, 0.0
        for j, sb in enumerate(sources):
            if j <= i:
                continue
            vals, dups = [], []
            for per in inputs.values():
                if sa not in per or sb not in per:
                    continue
                cos = []
                for u in per[sa]:
                    for v in per[sb]:
                        dot = sum(a * b for a, b in zip(u, v))
                        cos.append(dot / (math.sqrt(sum(a * a for a in u))
                                          * math.sqrt(sum(b * b for b in v))))
                vals.append(sum(cos) / len(cos))
                dups.append(sum(1 for x in cos if x >= tau) / len(cos))
            if vals:
                c[i][j] = c[j][i] = sum(vals) / len(vals)
                n[i][j] = n[j][i] = sum(dups) / len(dups)
    return sources, np.array(c), np.array(n)


def f_stat_brute(vectors, labels) -> float:
    """One-way multivariate pseudo-F from explicit per-group means."""
    vectors = [list(map(float, v)) for v in vectors]
    n, d = len(vectors), len(vectors[0])
    groups = sorted(set(labels))
    k = len(groups)
    grand = [sum(v[j] for v in vectors) / n for j in range(d)]
    ss_total = sum(sum((v[j] - grand[j]) ** 2 for j in range(d)) for v in vectors)
    ss_within = 0.0
    for g in groups:
        rows = [v for v, lab in zip(vectors, labels) if lab == g]
        mean = [sum(v[j] for v in rows) / len(rows) for j in range(d)]
        ss_within += sum(sum((v[j] - mean[j]) ** 2 for j in range(d)) for v in rows)
    ss_between = ss_total - ss_within
    if ss_within <= 0:
        return math.inf if ss_between > 0 else 0.0
    return (ss_between / (k - 1)) / (ss_within / (n - k))


def permanova_exact_p(blocks) -> tuple[float, float]:
    """blocks: list of (vectors, labels).  Enumerates every restricted
    relabeling; returns (F_obs, exact p = share of relabelings with F >= F_obs)."""
    all_vectors = [v for vecs, _ in blocks for v in vecs]
    obs_labels = [lab for _, labs in blocks for lab in labs]
    f_obs = f_stat_brute(all_vectors, obs_labels)
    per_block_perms = [list(itertools.permutations(labs)) for _, labs in blocks]
    count = 0
    total = 0
    for combo in itertools.product(*per_block_perms):
        labels = [lab for block in combo for lab in block]
        total += 1
        if f_stat_brute(all_vectors, labels) >= f_obs:
            count += 1
    return f_obs, count / total


def budget_expectation_brute(per_source: dict[str, list], budget: int) -> tuple[float, float]:
    """Exact expected (r_avg, r_max) of choosing `budget` sources uniformly."""
    sources = sorted(per_source)
    pool = [v for s in sources for v in per_source[s]]
    r_avgs, r_maxs = [], []
    for combo in itertools.combinations(sources, budget):
        selected = [v for s in combo for v in per_source[s]]
        r_avg, r_max = coverage_brute(pool, selected)
        r_avgs.append(r_avg)
        r_maxs.append(r_max)
    return sum(r_avgs) / len(r_avgs), sum(r_maxs) / len(r_maxs)


def kcenter_optimum_brute(points, budget: int) -> float:
    """Minimal achievable r_max over all size-`budget` subsets."""
    best = math.inf
    idx = range(len(points))
    for combo in itertools.combinations(idx, budget):
        selected = [points[i] for i in combo]
        _, r_max = coverage_brute(points, selected)
        best = min(best, r_max)
    return best
