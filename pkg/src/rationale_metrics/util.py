"""Small shared helpers: derived RNG streams, order-preserving parallel map, ranking."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")


def derived_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator seeded from (seed, *key); identical key -> identical stream.

    Per-item streams make results independent of execution order, so parallel
    and serial runs agree bit-for-bit.
    """
    return np.random.default_rng([int(seed), *[int(k) for k in key]])


def ordered_map(fn: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> list[R]:
    """Map preserving input order; uses a thread pool when jobs > 1."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def average_ranks(values: Iterable[float]) -> np.ndarray:
    """Ranks starting at 1 with ties assigned their mean rank."""
    x = np.asarray(list(values), dtype=float)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x), dtype=float)
    ranks[order] = np.arange(1, len(x) + 1, dtype=float)
    # average ranks within tied runs
    sorted_x = x[order]
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and sorted_x[j + 1] == sorted_x[i]:
            j += 1
        if j > i:
            ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks
