"""Reference placers: exhaustive search, greedy, and round-robin.

``brute_force_place`` enumerates every leaf subset of the requested size
and is the correctness oracle everything else is checked against.
``greedy_place`` adds one replica at a time, ranking candidates by the
aggregate of their root path under the current partial placement; it
provably matches the exhaustive optimum.  ``round_robin_place`` is the
classic heuristic baseline: always balanced, not always optimal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Mapping, Sequence

import numpy as np

from .aggregate import FailureAggregate
from .model import FailureTree, NodeId

DEFAULT_BRUTE_BUDGET = 10_000_000


class BruteForceBudgetError(RuntimeError):
    """Raised when the requested enumeration exceeds the combination budget."""


@dataclass(frozen=True)
class PlacerOutcome:
    """Result of one placer invocation.

    ``evaluations`` counts candidate evaluations: enumerated subsets for
    the exhaustive placer, scanned leaves for greedy, and child-pair
    comparisons for the divide/conquer solvers.
    """

    placement: frozenset[NodeId]
    aggregate: FailureAggregate
    evaluations: int


def _check_rho(tree: FailureTree, rho: int) -> None:
    leaves = tree.leaf_count[tree.root]
    if not 0 <= rho <= leaves:
        raise ValueError(f"rho={rho} out of range for a tree with {leaves} leaves")


def _empty_outcome(tree: FailureTree, evaluations: int = 1) -> PlacerOutcome:
    entries = (tree.n,)
    return PlacerOutcome(frozenset(), FailureAggregate(entries), evaluations)


def _leaf_ancestry(tree: FailureTree, leaves: Sequence[int]) -> np.ndarray:
    """0/1 matrix A with A[v, j] = 1 iff leaf j lies in v's subtree."""
    a = np.zeros((tree.n, len(leaves)), dtype=np.int64)
    for j, leaf in enumerate(leaves):
        for anc in tree.ancestors(leaf):
            a[anc, j] = 1
    return a


def brute_force_place(tree: FailureTree, rho: int, budget: int | None = None) -> PlacerOutcome:
    """Exhaustively find a placement with lexicominimum failure aggregate.

    Subsets are enumerated in lexicographic order of sorted leaf indices,
    and the first minimum is kept, so ties break deterministically toward
    the smallest index sequence.  Refuses to run when C(leaves, rho)
    exceeds ``budget`` (default 10^7 combinations).
    """
    _check_rho(tree, rho)
    if budget is None:
        budget = DEFAULT_BRUTE_BUDGET
    if rho == 0:
        return _empty_outcome(tree)
    leaves = tree.leaves
    total = comb(len(leaves), rho)
    if total > budget:
        raise BruteForceBudgetError(
            f"C({len(leaves)}, {rho}) = {total} combinations exceed budget {budget}"
        )

    ancestry = _leaf_ancestry(tree, leaves)
    best_key: tuple | None = None
    best_combo: tuple[int, ...] | None = None
    chunk_size = max(1, min(4096, (1 << 22) // max(1, tree.n)))
    combos = itertools.combinations(range(len(leaves)), rho)
    seen = 0
    while True:
        chunk = list(itertools.islice(combos, chunk_size))
        if not chunk:
            break
        idx = np.array(chunk, dtype=np.int64)  # (m, rho)
        picks = np.zeros((len(leaves), len(chunk)), dtype=np.int64)
        picks[idx.ravel(), np.repeat(np.arange(len(chunk)), rho)] = 1
        fnum = ancestry @ picks  # (n, m) failure numbers per vertex/combo
        hist = np.zeros((rho + 1, len(chunk)), dtype=np.int64)
        np.add.at(hist, (fnum, np.broadcast_to(np.arange(len(chunk)), fnum.shape)), 1)
        # lexsort's last key is primary: order by p_rho, then p_rho-1, ...
        order = np.lexsort(tuple(hist[i] for i in range(rho + 1)))
        col = int(order[0])
        key = (tuple(int(hist[i, col]) for i in range(rho, -1, -1)), seen + col)
        if best_key is None or key < best_key:
            best_key = key
            best_combo = chunk[col]
        seen += len(chunk)

    assert best_key is not None and best_combo is not None
    entries = tuple(reversed(best_key[0]))
    placement = frozenset(leaves[j] for j in best_combo)
    return PlacerOutcome(placement, FailureAggregate(entries), seen)


def greedy_place(tree: FailureTree, rho: int) -> PlacerOutcome:
    """Place replicas one at a time, each minimizing the resulting aggregate.

    Candidates are ranked by the histogram of current failure numbers
    along their root path (adding a leaf shifts exactly those nodes up by
    one, so the lexicominimum path histogram yields the lexicominimum new
    aggregate).  Ties break toward the smallest leaf index.
    """
    _check_rho(tree, rho)
    if rho == 0:
        return _empty_outcome(tree, evaluations=0)
    fnum = [0] * tree.n  # failure numbers under the partial placement
    placed: set[int] = set()
    evaluations = 0
    leaves = tree.leaves
    for _ in range(rho):
        best_hist: list[int] | None = None
        best_leaf = -1
        for leaf in leaves:
            if leaf in placed:
                continue
            evaluations += 1
            hist = [0] * (rho + 1)
            for anc in tree.ancestors(leaf):
                hist[fnum[anc]] += 1
            if best_hist is None:
                best_hist, best_leaf = hist, leaf
                continue
            for i in range(rho, -1, -1):
                if hist[i] != best_hist[i]:
                    if hist[i] < best_hist[i]:
                        best_hist, best_leaf = hist, leaf
                    break
        placed.add(best_leaf)
        for anc in tree.ancestors(best_leaf):
            fnum[anc] += 1
    entries = [0] * (rho + 1)
    for v in fnum:
        entries[v] += 1
    return PlacerOutcome(frozenset(placed), FailureAggregate(tuple(entries)), evaluations)


def round_robin_place(
    tree: FailureTree,
    rho: int,
    rotation_order: Mapping[NodeId, Sequence[NodeId]] | None = None,
) -> PlacerOutcome:
    """Distribute replicas one per child in rotation, recursing.

    Each node deals its quota to its children one replica at a time in
    ``rotation_order`` (defaulting to input child order), skipping
    children already at leaf capacity.  The result is always balanced but
    depends on the rotation order, and differing orders can produce
    placements with different aggregates.
    """
    _check_rho(tree, rho)
    if rho == 0:
        return _empty_outcome(tree, evaluations=0)
    from .evaluator import failure_aggregate  # local: avoids import cycle at module load

    placed: list[int] = []
    stack: list[tuple[int, int]] = [(tree.root, rho)]
    while stack:
        u, quota = stack.pop()
        if quota == 0:
            continue
        if tree.is_leaf(u):
            placed.append(u)
            continue
        order = rotation_order.get(u, tree.children[u]) if rotation_order else tree.children[u]
        if set(order) != set(tree.children[u]):
            raise ValueError(f"rotation order for {tree.names[u]} must permute its children")
        given = dict.fromkeys(order, 0)
        remaining = quota
        while remaining > 0:
            progressed = False
            for c in order:
                if remaining == 0:
                    break
                if given[c] < tree.leaf_count[c]:
                    given[c] += 1
                    remaining -= 1
                    progressed = True
            if not progressed:  # cannot happen for rho <= leaf count
                raise AssertionError("round-robin failed to distribute quota")
        for c in order:
            stack.append((c, given[c]))
    placement = frozenset(placed)
    return PlacerOutcome(placement, failure_aggregate(tree, placement), len(placement))
