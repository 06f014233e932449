"""Randomized selection and partition helpers (expected linear time).

Pivots come from a Random instance seeded per call, so results are
deterministic and nothing is shared across concurrent invocations.
Worst-case-linear selection is deliberately not attempted.
"""

from __future__ import annotations

import random
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")

_PIVOT_SEED = 0x9E3779B9


def nth_smallest(items: Sequence[T], k: int, key: Callable[[T], object] | None = None) -> T:
    """Return the k-th smallest item (0-based) by quickselect."""
    if not 0 <= k < len(items):
        raise IndexError(f"k={k} out of range for {len(items)} items")
    if key is None:
        keyed = list(items)
        unkey = lambda x: x  # noqa: E731
    else:
        keyed = [(key(x), i, x) for i, x in enumerate(items)]
        unkey = lambda t: t[2]  # noqa: E731
    rng = random.Random(_PIVOT_SEED)
    lo = keyed
    while True:
        if len(lo) == 1:
            return unkey(lo[0])
        pivot = lo[rng.randrange(len(lo))]
        below = [x for x in lo if x < pivot]
        above = [x for x in lo if pivot < x]
        n_eq = len(lo) - len(below) - len(above)
        if k < len(below):
            lo = below
        elif k < len(below) + n_eq:
            return unkey(pivot)
        else:
            k -= len(below) + n_eq
            lo = above


def smallest(items: Sequence[T], count: int, key: Callable[[T], object] | None = None) -> list[T]:
    """Return the ``count`` smallest items via select-then-partition.

    Ties at the cutoff are broken by position, so the result is
    deterministic.  Output order is unspecified.
    """
    m = len(items)
    if count <= 0:
        return []
    if count >= m:
        return list(items)
    kf = key if key is not None else (lambda x: x)
    keyed = [(kf(x), i) for i, x in enumerate(items)]
    cut = nth_smallest(keyed, count - 1)
    out = [items[i] for (kv, i) in keyed if (kv, i) <= cut]
    return out


def lower_median(values: Sequence[int]) -> int:
    """The lower median (element at index (m-1)//2 of the sorted order)."""
    return nth_smallest(values, (len(values) - 1) // 2)
