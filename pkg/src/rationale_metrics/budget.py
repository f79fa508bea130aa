"""Matched-budget coverage: the uniform random source-selection baseline and a
greedy farthest-point rationale selector.

The random baseline draws B *sources* per input and covers the input's full
candidate pool with their rationales; the greedy selector picks individual
rationales (centroid-nearest first, then farthest-point traversal), which is
the classical 2-approximation for the k-center objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .diversity import CoverageResult, coverage, min_distances
from .records import EmbeddingGroup
from .util import derived_rng, ordered_map


@dataclass(slots=True)
class BudgetCell:
    budget: int
    r_avg_mean: float
    r_max_mean: float
    r_avg_se: float
    r_max_se: float
    inputs_used: int
    inputs_skipped: int
    per_input_r_avg: tuple[float, ...]
    per_input_r_max: tuple[float, ...]


@dataclass(slots=True)
class BudgetSweepResult:
    selector: str
    draws: int
    seed: int
    cells: list[BudgetCell]


def _input_sources(group: EmbeddingGroup) -> list[str]:
    return sorted(set(group.source_ids))


def _rows_for_sources(group: EmbeddingGroup, wanted: set[str]) -> np.ndarray:
    rows = [i for i, s in enumerate(group.source_ids) if s in wanted]
    return group.matrix[rows]


def _summarize(per_input: list[tuple[float, float]], budget: int, draws: int,
               skipped: int) -> BudgetCell:
    r_avg = np.asarray([v[0] for v in per_input])
    r_max = np.asarray([v[1] for v in per_input])
    n = len(per_input)
    se_avg = float(r_avg.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    se_max = float(r_max.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return BudgetCell(
        budget=budget,
        r_avg_mean=float(r_avg.mean()) if n else math.nan,
        r_max_mean=float(r_max.mean()) if n else math.nan,
        r_avg_se=se_avg, r_max_se=se_max,
        inputs_used=n, inputs_skipped=skipped,
        per_input_r_avg=tuple(float(v) for v in r_avg),
        per_input_r_max=tuple(float(v) for v in r_max),
    )


def random_budget_sweep(groups: Sequence[EmbeddingGroup], budgets: Sequence[int],
                        draws: int = 10, seed: int = 0, jobs: int = 1) -> BudgetSweepResult:
    """Uniform rand(B) source baseline, averaged over draws then over inputs.

    Inputs with fewer than B sources are skipped for that budget and counted.
    """
    if draws < 1:
        raise ValueError(f"draws must be >= 1, got {draws}")
    if not budgets:
        raise ValueError("budget list must be non-empty")
    ordered = sorted(groups, key=lambda g: g.input_id)

    def sweep_input(task: tuple[int, int, EmbeddingGroup]) -> tuple[float, float] | None:
        budget, input_idx, group = task
        sources = _input_sources(group)
        if budget > len(sources):
            return None
        r_avgs = np.empty(draws)
        r_maxs = np.empty(draws)
        for draw in range(draws):
            rng = derived_rng(seed, budget, input_idx, draw)
            chosen = set(rng.choice(len(sources), size=budget, replace=False).tolist())
            selected = _rows_for_sources(group, {sources[i] for i in chosen})
            cov = coverage(group.matrix, selected)
            r_avgs[draw] = cov.r_avg
            r_maxs[draw] = cov.r_max
        return float(r_avgs.mean()), float(r_maxs.mean())

    cells = []
    for budget in budgets:
        tasks = [(budget, i, g) for i, g in enumerate(ordered)]
        results = ordered_map(sweep_input, tasks, jobs=jobs)
        used = [r for r in results if r is not None]
        cells.append(_summarize(used, budget, draws, skipped=len(results) - len(used)))
    return BudgetSweepResult(selector="random", draws=draws, seed=seed, cells=cells)


def greedy_select(pool, budget: int, seed: int = 0) -> tuple[tuple[int, ...], CoverageResult]:
    """Farthest-point selection of individual pool points under a count budget.

    First pick is the point nearest the pool centroid; each later pick is the
    point farthest from the current selection.  Exact-distance ties break in
    favor of the lowest position in a seeded shuffle, so results are
    deterministic given the seed and selections are prefixes of each other
    across budgets.
    """
    matrix = pool.matrix if isinstance(pool, EmbeddingGroup) else np.asarray(pool, dtype=float)
    n = matrix.shape[0]
    if n == 0:
        raise ValueError("pool must be non-empty")
    if not 1 <= budget <= n:
        raise ValueError(f"budget must be in [1, {n}], got {budget}")

    rng = derived_rng(seed)
    shuffled_pos = np.empty(n, dtype=int)
    shuffled_pos[rng.permutation(n)] = np.arange(n)

    def tie_break(crit: np.ndarray, best: float) -> int:
        candidates = np.flatnonzero(crit == best)
        return int(candidates[np.argmin(shuffled_pos[candidates])])

    to_centroid = np.linalg.norm(matrix - matrix.mean(axis=0), axis=1)
    first = tie_break(to_centroid, to_centroid.min())
    selected = [first]
    min_dist = np.linalg.norm(matrix - matrix[first], axis=1)
    while len(selected) < budget:
        nxt = tie_break(min_dist, min_dist.max())
        selected.append(nxt)
        min_dist = np.minimum(min_dist, np.linalg.norm(matrix - matrix[nxt], axis=1))
    cov = CoverageResult(r_avg=float(min_dist.mean()), r_max=float(min_dist.max()))
    return tuple(selected), cov


def greedy_budget_sweep(groups: Sequence[EmbeddingGroup], budgets: Sequence[int],
                        seed: int = 0, jobs: int = 1) -> BudgetSweepResult:
    """Deterministic greedy counterpart of the random sweep (rationale budgets).

    One farthest-point traversal per input at the largest feasible budget;
    smaller budgets reuse its prefixes.
    """
    if not budgets:
        raise ValueError("budget list must be non-empty")
    ordered = sorted(groups, key=lambda g: g.input_id)
    max_budget = max(budgets)

    def traverse(group: EmbeddingGroup) -> dict[int, tuple[float, float]]:
        feasible = [b for b in budgets if b <= group.m]
        if not feasible:
            return {}
        order, _ = greedy_select(group, min(max_budget, group.m), seed=seed)
        out = {}
        for b in feasible:
            dists = min_distances(group.matrix, group.matrix[list(order[:b])])
            out[b] = (float(dists.mean()), float(dists.max()))
        return out

    per_input = ordered_map(traverse, ordered, jobs=jobs)
    cells = []
    for budget in budgets:
        used = [res[budget] for res in per_input if budget in res]
        cells.append(_summarize(used, budget, draws=1, skipped=len(per_input) - len(used)))
    return BudgetSweepResult(selector="greedy", draws=1, seed=seed, cells=cells)
