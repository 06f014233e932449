"""Ground-truth evaluation: failure numbers, aggregates, balance checks.

The failure number of an event ``e`` under placement ``P`` is the number
of placed candidates reachable from ``e`` (reachability is reflexive, so
a placed leaf has failure number 1).  The failure aggregate histograms
the failure numbers of *all* vertices.  Trees get an O(n) post-order
evaluation; arbitrary event graphs fall back to per-vertex reachability,
which is evaluation-only — optimal placement on general graphs is out of
scope here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .aggregate import FailureAggregate
from .model import FailureTree, NodeId

# A path aggregate is an ordinary aggregate restricted to the nodes of one
# root-to-leaf path; same histogram layout, entries summing to the path length.
PathAggregate = FailureAggregate


@dataclass(frozen=True)
class FailureDag:
    """A directed failure model over events and candidate vertices.

    ``adjacency[u]`` lists the vertices triggered by u's failure.  Cycles
    among events are permitted (reachability stays well defined);
    candidates must have out-degree zero here.
    """

    names: tuple[str, ...]
    adjacency: tuple[tuple[int, ...], ...]
    candidates: frozenset[int]

    def __post_init__(self):
        for c in self.candidates:
            if self.adjacency[c]:
                raise ValueError(f"candidate {self.names[c]} has outgoing edges")

    @property
    def n(self) -> int:
        return len(self.adjacency)

    @classmethod
    def from_tree(cls, tree: FailureTree) -> "FailureDag":
        return cls(
            names=tree.names,
            adjacency=tree.children,
            candidates=frozenset(tree.leaves),
        )

    def reachable(self, start: int) -> set[int]:
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in self.adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen


def validate_placement(model: FailureTree | FailureDag, placement: Iterable[NodeId]) -> frozenset[NodeId]:
    """Check that every member is a distinct candidate of the model."""
    placed = frozenset(placement)
    if isinstance(model, FailureTree):
        for p in placed:
            if not 0 <= p < model.n:
                raise ValueError(f"unknown node id {p}")
            if not model.is_leaf(p):
                raise ValueError(f"node {model.names[p]} is not a leaf")
    else:
        for p in placed:
            if not 0 <= p < model.n:
                raise ValueError(f"unknown node id {p}")
            if p not in model.candidates:
                raise ValueError(f"node {model.names[p]} is not a placement candidate")
    return placed


def subtree_replica_counts(tree: FailureTree, placement: Iterable[NodeId]) -> list[int]:
    """Per-node count of placed leaves in the node's subtree (one O(n) sweep)."""
    placed = validate_placement(tree, placement)
    counts = [0] * tree.n
    for p in placed:
        counts[p] = 1
    order = sorted(range(tree.n), key=lambda u: tree.depth[u], reverse=True)
    for u in order:
        if u != tree.root:
            counts[tree.parent[u]] += counts[u]
    return counts


def failure_number(model: FailureTree | FailureDag, node: NodeId, placement: Iterable[NodeId]) -> int:
    """Number of placed candidates whose failure ``node`` would trigger."""
    placed = validate_placement(model, placement)
    if isinstance(model, FailureTree):
        if not 0 <= node < model.n:
            raise ValueError(f"unknown node id {node}")
        return sum(1 for v in model.subtree(node) if v in placed)
    if not 0 <= node < model.n:
        raise ValueError(f"unknown node id {node}")
    return len(model.reachable(node) & placed)


def failure_aggregate(model: FailureTree | FailureDag, placement: Iterable[NodeId]) -> FailureAggregate:
    """Histogram the failure numbers of every vertex under the placement.

    Trees use subtree replica counts (O(n)); general graphs recompute
    reachability per vertex (O(V * (V + A))).  Entries always sum to the
    vertex count.
    """
    placed = validate_placement(model, placement)
    rho = len(placed)
    entries = [0] * (rho + 1)
    if isinstance(model, FailureTree):
        for c in subtree_replica_counts(model, placed):
            entries[c] += 1
    else:
        for u in range(model.n):
            entries[len(model.reachable(u) & placed)] += 1
    return FailureAggregate(tuple(entries))


def path_aggregate(
    tree: FailureTree, top: NodeId, bottom: NodeId, placement: Iterable[NodeId]
) -> PathAggregate:
    """Aggregate restricted to the nodes on the path top..bottom, inclusive.

    ``bottom`` must lie in ``top``'s subtree.  This is the quantity the
    greedy placer ranks candidates by: adding a new replica at a leaf
    shifts exactly the failure numbers along its root path, so comparing
    path aggregates compares the resulting placements.
    """
    placed = validate_placement(tree, placement)
    path = []
    v = bottom
    while True:
        path.append(v)
        if v == top:
            break
        v = tree.parent[v]
        if v == -1:
            raise ValueError(
                f"{tree.names[bottom]} is not a descendant of {tree.names[top]}"
            )
    # Failure numbers just for the path: walk each placed leaf upward once.
    hits = dict.fromkeys(path, 0)
    for p in placed:
        for anc in tree.ancestors(p):
            if anc in hits:
                hits[anc] += 1
    entries = [0] * (len(placed) + 1)
    for u in path:
        entries[hits[u]] += 1
    return FailureAggregate(tuple(entries))


@dataclass(frozen=True)
class BalanceReport:
    """Outcome of a balance check; truthy iff the placement is balanced."""

    ok: bool
    node: NodeId | None = None
    unfilled_child: NodeId | None = None
    sibling: NodeId | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_balanced(tree: FailureTree, placement: Iterable[NodeId]) -> BalanceReport:
    """Check every internal node for the balance property.

    A node is balanced when each unfilled child (one holding fewer
    replicas than it has leaves) holds at least max-sibling-replicas - 1.
    Returns the first violation in (node index, child order) as a witness.
    """
    counts = subtree_replica_counts(tree, placement)
    for u in range(tree.n):
        kids = tree.children[u]
        if len(kids) < 2:
            continue
        top = max(counts[c] for c in kids)
        if top == 0:
            continue
        arg = next(c for c in kids if counts[c] == top)
        for c in kids:
            if counts[c] < tree.leaf_count[c] and counts[c] < top - 1:
                return BalanceReport(False, u, c, arg)
    return BalanceReport(True)


@dataclass(frozen=True)
class MonotonicityReport:
    ok: bool
    parent: NodeId | None = None
    child: NodeId | None = None

    def __bool__(self) -> bool:
        return self.ok


def monotonicity_check(tree: FailureTree, placement: Iterable[NodeId]) -> MonotonicityReport:
    """Verify failure numbers never increase along any parent->child edge."""
    counts = subtree_replica_counts(tree, placement)
    for u in range(tree.n):
        if u != tree.root and counts[u] > counts[tree.parent[u]]:
            return MonotonicityReport(False, tree.parent[u], u)
    return MonotonicityReport(True)
