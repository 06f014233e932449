"""Balanced divide/conquer solver for lexicominimum replica placement.

The solver walks the tree top-down assigning replica targets (the divide
phase), then bottom-up combining per-child aggregate pairs (the conquer
phase).  The load-bearing facts:

* An optimal placement is balanced at every node: no unfilled child may
  sit more than one replica below any sibling.  It therefore suffices to
  classify children into *filled* (receiving their whole leaf capacity)
  and *unfilled*, and to hand every unfilled child one of just two
  adjacent targets, c or c-1.
* Each node consequently needs only a pair of answers — the optimum for
  r replicas and for r-1 — and computes both from the same child pairs:
  rank children by the difference (aggregate at c) - (aggregate at c-1)
  and award c to the required number of smallest differences.  The r-1
  answer takes a one-shorter prefix of the same ranking.
* Which children must be filled follows from a water-filling argument:
  a child is filled exactly when its capacity is strictly below the
  average load its siblings would otherwise carry.  ``get_filled``
  computes this in expected O(m) by median partitioning; the boundary is
  strict — a child whose capacity *equals* the average must stay
  unfilled, else the r-1 answer can be forced away from its optimum.

Modes: ``basic`` runs on the original tree with full-length (rho+1)
vectors; ``fast`` runs on the unary-contracted tree with vectors
truncated to each node's target, stops at target-1 nodes with a
shallowest-leaf closed form, and contracts degenerate chains into
pseudonodes between the divide and conquer phases.  Both return
identical aggregates; ``basic`` exists as the cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import transform as _transform
from .aggregate import FailureAggregate, add, add_into, expand, subtract
from .model import FailureTree, NodeId
from .oracles import PlacerOutcome
from .selection import lower_median, smallest

Trace = Callable[[str], None]


@dataclass(frozen=True)
class FillClassification:
    """Partition of one node's children into filled and unfilled sets.

    ``filled_leaves`` is the total leaf capacity of the filled set — the
    replicas those children absorb.  Terminal invariant (checked in debug
    runs): max filled capacity < (r - filled_leaves)/k <= min unfilled
    capacity, with k the unfilled count.
    """

    filled: tuple[NodeId, ...]
    unfilled: tuple[NodeId, ...]
    filled_leaves: int

    @property
    def unfilled_count(self) -> int:
        return len(self.unfilled)


def get_filled(children: Sequence[tuple[NodeId, int]], r: int) -> FillClassification:
    """Classify children as filled/unfilled for r replicas, in O(m) expected.

    ``children`` is a sequence of (child id, leaf capacity) pairs.  Each
    round selects the lower-median capacity, splits the undecided set
    around it, and labels half of it: strictly-below-average capacities
    are filled, the rest unfilled.  U is empty iff r equals the total
    capacity; otherwise the strict water-line invariant above holds.
    """
    total = sum(cap for _, cap in children)
    if not 0 <= r <= total:
        raise ValueError(f"r={r} out of range for total capacity {total}")
    if r == total:
        return FillClassification(
            filled=tuple(c for c, _ in children), unfilled=(), filled_leaves=total
        )
    filled: list[tuple[int, int]] = []
    unfilled: list[tuple[int, int]] = []
    filled_leaves = 0
    undecided = list(children)
    while undecided:
        med = lower_median([cap for _, cap in undecided])
        below = [e for e in undecided if e[1] < med]
        at = [e for e in undecided if e[1] == med]
        above = [e for e in undecided if e[1] > med]
        absorbed = sum(cap for _, cap in below) + sum(cap for _, cap in at)
        leftover = r - filled_leaves - absorbed
        if leftover > med * (len(unfilled) + len(above)):
            # Even after filling everything at or below the median, the
            # rest would each carry more than med: below+at are filled.
            filled += below + at
            filled_leaves += absorbed
            undecided = above
        else:
            unfilled += at + above
            undecided = below
    return FillClassification(
        filled=tuple(sorted(c for c, _ in filled)),
        unfilled=tuple(sorted(c for c, _ in unfilled)),
        filled_leaves=filled_leaves,
    )


def reference_fill(children: Sequence[tuple[NodeId, int]], r: int) -> FillClassification:
    """Sort-based classifier with the same contract as get_filled.

    Scans capacities in ascending order, filling a child while its
    capacity is strictly below the average load of the remainder.  Used
    as an independent check of the median-partition implementation.
    """
    total = sum(cap for _, cap in children)
    if not 0 <= r <= total:
        raise ValueError(f"r={r} out of range for total capacity {total}")
    if r == total:
        return FillClassification(
            filled=tuple(c for c, _ in children), unfilled=(), filled_leaves=total
        )
    order = sorted(children, key=lambda e: (e[1], e[0]))
    filled_leaves = 0
    cut = 0
    for j, (_, cap) in enumerate(order):
        if cap * (len(order) - j) < r - filled_leaves:
            filled_leaves += cap
            cut = j + 1
        else:
            break
    return FillClassification(
        filled=tuple(sorted(c for c, _ in order[:cut])),
        unfilled=tuple(sorted(c for c, _ in order[cut:])),
        filled_leaves=filled_leaves,
    )


def child_targets(r: int, filled_leaves: int, k: int) -> tuple[int, int, int, int]:
    """Targets and counts for distributing r or r-1 replicas over k children.

    With s = r - filled_leaves replicas left for the unfilled children,
    returns (high_count, low_count, c, f) where c = ceil(s/k) and
    f = floor((s-1)/k) = c - 1 are the only two values any unfilled child
    may receive, high_count children get c when s are distributed, and
    low_count = high_count - 1 get c when s - 1 are.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    s = r - filled_leaves
    if s < 1:
        raise ValueError(f"no replicas left to distribute (s={s})")
    c = -(-s // k)
    f = (s - 1) // k
    high_count = s - k * f
    return high_count, high_count - 1, c, f


def conquer_select(diffs: Sequence[Sequence[int]], count: int) -> list[int]:
    """Positions of the ``count`` lexicographically smallest difference vectors.

    Comparison runs from the top index down; ties break by position
    (child order).  Uses randomized selection plus partition rather than
    a sort, so cost is linear in the total vector length.
    """
    if count <= 0:
        return []
    keys = [(tuple(reversed(d)), i) for i, d in enumerate(diffs)]
    if count >= len(keys):
        return list(range(len(keys)))
    return sorted(i for _, i in smallest(keys, count))


def filled_aggregate(tree: FailureTree, u: NodeId) -> list[int]:
    """Aggregate of u's subtree when every leaf below u holds a replica.

    Decision-free: each node v sees exactly its own leaf count of
    replicas, so it contributes one at index leaf_count(v) (leaves land
    at index 1).  Runs in O(subtree size); capacity is leaf_count(u).
    """
    out = [0] * (tree.leaf_count[u] + 1)
    for v in tree.subtree(u):
        out[tree.leaf_count[v]] += 1
    return out


@dataclass
class SolveResult:
    """Optimal aggregates for a node's two possible replica totals."""

    high: list[int]  # entries for `target` replicas on the subtree
    low: list[int]  # entries for `target - 1`


@dataclass
class _NodeInfo:
    """Divide-phase record for one node; selection fields filled at conquer."""

    kind: str  # leaf | base | full | split
    target: int
    filled: tuple[int, ...] = ()
    unfilled: tuple[int, ...] = ()
    low_filled: tuple[int, ...] = ()  # full nodes: filled set of the r-1 system
    child_target: int = 0
    high_count: int = 0
    low_count: int = 0
    sel_high: frozenset[int] = frozenset()
    sel_low: frozenset[int] = frozenset()

    @property
    def chainable(self) -> bool:
        return self.kind == "split" and len(self.unfilled) == 1


@dataclass
class _Plan:
    """Everything one solve produced; kept for reconstruction and tests."""

    tree: FailureTree
    mode: str
    rho: int
    view: object
    root: NodeId
    order: list[NodeId] = field(default_factory=list)
    infos: dict[NodeId, _NodeInfo] = field(default_factory=dict)
    chains: list[_transform.DegenerateChain] = field(default_factory=list)
    pseudos: dict[NodeId, _transform.Pseudonode] = field(default_factory=dict)
    results: dict[NodeId, SolveResult] = field(default_factory=dict)
    evaluations: int = 0

    def root_result(self) -> SolveResult:
        return self.results[self.root]


def _assert_fill_invariant(children: Sequence[tuple[int, int]], r: int, fill: FillClassification) -> None:
    caps = dict(children)
    if not fill.unfilled:
        assert r == sum(caps.values()), "U empty but capacity not exhausted"
        return
    s = r - fill.filled_leaves
    k = fill.unfilled_count
    if fill.filled:
        assert max(caps[c] for c in fill.filled) * k < s, "filled cap at or above average"
    assert min(caps[c] for c in fill.unfilled) * k >= s, "unfilled cap below average"


def _divide(plan: _Plan, trace: Trace | None, debug: bool) -> None:
    tree = plan.tree
    view = plan.view
    fast = plan.mode == "fast"
    stack: list[tuple[int, int]] = [(plan.root, plan.rho)]

    def emit(u: int, r: int, L: int, k: int, c: int, f: int) -> None:
        if trace is not None:
            trace(f"node={tree.names[u]} r={r} L={L} k={k} ceil={c} floor={f}")

    while stack:
        u, r = stack.pop()
        plan.order.append(u)
        if fast and r == 1:
            plan.infos[u] = _NodeInfo("base", r)
            emit(u, r, 0, 0, 0, 0)
            continue
        kids = view.children_of(u)
        if not kids:
            assert r == 1, "leaf asked for more than one replica"
            plan.infos[u] = _NodeInfo("leaf", r)
            emit(u, r, 0, 0, 0, 0)
            continue
        caps = [(c, tree.leaf_count[c]) for c in kids]
        if r == tree.leaf_count[u]:
            if r == 1:
                plan.infos[u] = _NodeInfo("full", r, filled=tuple(kids))
                emit(u, r, r, 0, 0, 0)
                continue
            # High side is the closed-form filled aggregate; the r-1 side
            # gets its own classification (always leaves some child unfilled).
            fill = get_filled(caps, r - 1)
            if debug:
                _assert_fill_invariant(caps, r - 1, fill)
            hc, _, c, f = child_targets(r - 1, fill.filled_leaves, fill.unfilled_count)
            plan.infos[u] = _NodeInfo(
                "full",
                r,
                filled=tuple(kids),
                unfilled=fill.unfilled,
                low_filled=fill.filled,
                child_target=c,
                high_count=hc,
            )
            emit(u, r - 1, fill.filled_leaves, fill.unfilled_count, c, f)
            for ch in fill.unfilled:
                stack.append((ch, c))
            continue
        fill = get_filled(caps, r)
        if debug:
            _assert_fill_invariant(caps, r, fill)
        hc, lc, c, f = child_targets(r, fill.filled_leaves, fill.unfilled_count)
        plan.infos[u] = _NodeInfo(
            "split",
            r,
            filled=fill.filled,
            unfilled=fill.unfilled,
            child_target=c,
            high_count=hc,
            low_count=lc,
        )
        emit(u, r, fill.filled_leaves, fill.unfilled_count, c, f)
        for ch in fill.unfilled:
            stack.append((ch, c))


def _filled_part(plan: _Plan, children: Sequence[int], capacity: int) -> list[int]:
    """Sum of filled-child contributions, contracted-edge nodes included."""
    tree = plan.tree
    view = plan.view
    out = [0] * (capacity + 1)
    for fc in children:
        add_into(out, filled_aggregate(tree, fc))
        out[tree.leaf_count[fc]] += view.edge_len(fc)
    return out


def _child_pairs(plan: _Plan, info: _NodeInfo) -> list[tuple[list[int], list[int]]]:
    """Per-unfilled-child (high, low) aggregates, contracted edges folded in."""
    view = plan.view
    c = info.child_target
    pairs = []
    for ch in info.unfilled:
        res = plan.results[ch]
        edge = view.edge_len(ch)
        hi, lo = res.high, res.low
        if edge:
            hi = list(hi)
            lo = list(lo)
            hi[c] += edge
            lo[c - 1] += edge
        pairs.append((hi, lo))
    return pairs


def _capacities(plan: _Plan, r: int) -> tuple[int, int]:
    if plan.mode == "basic":
        return plan.rho, plan.rho
    return r, max(r - 1, 0)


def _assemble(
    plan: _Plan,
    info: _NodeInfo,
    pairs: Sequence[tuple[list[int], list[int]]],
    selected: frozenset[int],
    filled_part: Sequence[int],
    own_index: int,
    capacity: int,
) -> list[int]:
    out = [0] * (capacity + 1)
    add_into(out, filled_part)
    for ch, (hi, lo) in zip(info.unfilled, pairs):
        add_into(out, hi if ch in selected else lo)
    out[own_index] += 1
    return out


def _conquer(plan: _Plan, debug: bool) -> None:
    tree = plan.tree
    for u in reversed(plan.order):
        pseudo = plan.pseudos.get(u)
        if pseudo is not None:
            term = plan.results[pseudo.child]
            plan.results[u] = SolveResult(
                high=add(pseudo.high_contrib, term.high),
                low=add(pseudo.low_contrib, term.low),
            )
            if debug:
                _assert_mass(plan, u)
            continue
        if plan.infos[u].kind == "member":
            continue
        info = plan.infos[u]
        r = info.target
        cap_hi, cap_lo = _capacities(plan, r)
        if info.kind == "leaf":
            hi = [0] * (cap_hi + 1)
            hi[1] = 1
            lo = [0] * (cap_lo + 1)
            lo[0] = 1
            plan.results[u] = SolveResult(hi, lo)
        elif info.kind == "base":
            span = tree.min_leaf_depth[u] + 1
            size = tree.subtree_size[u]
            hi = [0] * (cap_hi + 1)
            hi[1] = span
            hi[0] = size - span
            lo = [0] * (cap_lo + 1)
            lo[0] = size
            plan.results[u] = SolveResult(hi, lo)
        elif info.kind == "full":
            hi = [0] * (cap_hi + 1)
            add_into(hi, filled_aggregate(tree, u))
            if r == 1:
                lo = [0] * (cap_lo + 1)
                lo[0] = tree.subtree_size[u]
            else:
                pairs = _child_pairs(plan, info)
                diffs = [subtract(h, l) for h, l in pairs]
                plan.evaluations += len(diffs)
                sel = frozenset(info.unfilled[i] for i in conquer_select(diffs, info.high_count))
                info.sel_low = sel
                part = _filled_part(plan, info.low_filled, cap_lo)
                lo = _assemble(plan, info, pairs, sel, part, r - 1, cap_lo)
            plan.results[u] = SolveResult(hi, lo)
        else:  # split
            pairs = _child_pairs(plan, info)
            diffs = [subtract(h, l) for h, l in pairs]
            plan.evaluations += len(diffs)
            sel_hi = frozenset(info.unfilled[i] for i in conquer_select(diffs, info.high_count))
            sel_lo = frozenset(info.unfilled[i] for i in conquer_select(diffs, info.low_count))
            if debug:
                assert sel_lo <= sel_hi, "low selection must be a prefix of the high one"
            info.sel_high = sel_hi
            info.sel_low = sel_lo
            part_hi = _filled_part(plan, info.filled, cap_hi)
            hi = _assemble(plan, info, pairs, sel_hi, part_hi, r, cap_hi)
            part_lo = _filled_part(plan, info.filled, cap_lo)
            lo = _assemble(plan, info, pairs, sel_lo, part_lo, r - 1, cap_lo)
            plan.results[u] = SolveResult(hi, lo)
        if debug:
            _assert_mass(plan, u)


def _assert_mass(plan: _Plan, u: NodeId) -> None:
    res = plan.results[u]
    size = plan.tree.subtree_size[u]
    assert sum(res.high) == size, f"high mass {sum(res.high)} != subtree size {size}"
    assert sum(res.low) == size, f"low mass {sum(res.low)} != subtree size {size}"


def solve_plan(
    tree: FailureTree,
    rho: int,
    mode: str = "fast",
    trace: Trace | None = None,
    debug: bool = False,
) -> _Plan:
    """Run divide/transform/conquer and return the full plan (for tests)."""
    if mode not in ("basic", "fast"):
        raise ValueError(f"unknown mode {mode!r}")
    leaves = tree.leaf_count[tree.root]
    if not 1 <= rho <= leaves:
        raise ValueError(f"rho={rho} out of range for a tree with {leaves} leaves")
    view = _transform.contract_unary_paths(tree) if mode == "fast" else _transform.TreeView(tree)
    plan = _Plan(tree=tree, mode=mode, rho=rho, view=view, root=view.root)
    _divide(plan, trace, debug)
    if mode == "fast":
        plan.chains = _transform.find_degenerate_chains(plan.infos, plan.root)
        plan.pseudos = _transform.transform_chains(view, plan.infos, plan.chains, trace=trace)
        if debug:
            for head, pseudo in plan.pseudos.items():
                assert pseudo.alloc_count == 3, "a chain must allocate exactly 3 accumulators"
        for chain in plan.chains:
            for v in chain.members[1:]:
                plan.infos[v].kind = "member"
    _conquer(plan, debug)
    return plan


def solve(
    tree: FailureTree,
    rho: int,
    mode: str = "fast",
    trace: Trace | None = None,
    debug: bool = False,
) -> PlacerOutcome:
    """Compute a lexicominimum placement of ``rho`` replicas.

    Parameters
    ----------
    tree : FailureTree
    rho : int
        Placement size, 0 <= rho <= leaf count.
    mode : str
        ``"fast"`` (contracted tree, compact vectors, closed-form base
        cases) or ``"basic"`` (original tree, full-length vectors); both
        produce identical aggregates.
    trace : callable, optional
        Receives one diagnostic line per divided node
        (``node=<name> r=<int> L=<int> k=<int> ceil=<int> floor=<int>``)
        and per contracted chain.
    debug : bool
        Enable internal invariant assertions.

    Returns a PlacerOutcome whose aggregate equals the evaluator's
    aggregate of the returned placement.
    """
    if rho < 0:
        raise ValueError("rho must be non-negative")
    if rho == 0:
        return PlacerOutcome(frozenset(), FailureAggregate((tree.n,)), 0)
    plan = solve_plan(tree, rho, mode, trace, debug)
    placement = _transform.expand_solution(plan)
    entries = tuple(expand(plan.root_result().high, rho))
    return PlacerOutcome(placement, FailureAggregate(entries), plan.evaluations)
