"""Fast-mode tree rewrites: unary-path and degenerate-chain contraction.

Two structural rewrites keep the fast solver's recursion shallow:

* ``contract_unary_paths`` removes interior nodes that have exactly one
  child.  Each surviving node remembers how many originals sat on the
  edge above it; those nodes all share the failure number of the subtree
  below them, so they re-enter the arithmetic as a single bump.
* degenerate chains — runs of divided nodes that each have exactly one
  *unfilled* child — are contracted into pseudonodes between the divide
  and conquer phases.  A pseudonode pre-accumulates the chain's own
  contributions (three fixed-size vectors per chain) and delegates the
  rest to the chain's terminal, so the conquer phase touches the chain
  once instead of once per level.

Every rewrite works on a private view; the original tree is never
mutated.  ``expand_solution`` maps conquer decisions back to original
leaf identifiers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .aggregate import add, add_into
from .model import FailureTree, NodeId


@dataclass(frozen=True)
class ChainRecord:
    """A contracted run of one-child interior nodes.

    ``length`` originals were removed between ``top`` (surviving parent)
    and ``bottom`` (surviving child).
    """

    length: int
    top: NodeId
    bottom: NodeId


@dataclass(frozen=True)
class ContractedTree:
    """A view of a tree with one-child interior nodes removed.

    ``children`` maps each surviving node to its surviving children;
    ``path_len[v]`` counts the removed originals on the edge above v
    (0 when the edge is original).  The root and all leaves survive, and
    per-node statistics (leaf counts, sizes, depths) are still read off
    the original tree — contraction changes no subtree's leaf set.
    """

    tree: FailureTree
    root: NodeId
    children: dict[NodeId, tuple[NodeId, ...]]
    path_len: dict[NodeId, int]
    records: tuple[ChainRecord, ...]

    def children_of(self, u: NodeId) -> tuple[NodeId, ...]:
        return self.children[u]

    def edge_len(self, u: NodeId) -> int:
        return self.path_len[u]


@dataclass(frozen=True)
class TreeView:
    """Identity view used by the basic solver (no rewrites)."""

    tree: FailureTree

    @property
    def root(self) -> NodeId:
        return self.tree.root

    def children_of(self, u: NodeId) -> tuple[NodeId, ...]:
        return self.tree.children[u]

    def edge_len(self, u: NodeId) -> int:
        return 0


def contract_unary_paths(tree: FailureTree) -> ContractedTree:
    """Contract every maximal run of one-child interior nodes.

    The root is never contracted (it has no parent edge to merge into),
    so the rewritten structure keeps the original root, has no interior
    node with exactly one child below it, and records one ChainRecord per
    contracted run.
    """
    children: dict[int, tuple[int, ...]] = {}
    path_len: dict[int, int] = {tree.root: 0}
    records: list[ChainRecord] = []
    stack = [tree.root]
    while stack:
        u = stack.pop()
        kids = []
        for c in tree.children[u]:
            d = 0
            v = c
            while len(tree.children[v]) == 1:
                d += 1
                v = tree.children[v][0]
            if d:
                records.append(ChainRecord(length=d, top=u, bottom=v))
            path_len[v] = d
            kids.append(v)
            stack.append(v)
        children[u] = tuple(kids)
    return ContractedTree(
        tree=tree,
        root=tree.root,
        children=children,
        path_len=path_len,
        records=tuple(records),
    )


@dataclass(frozen=True)
class DegenerateChain:
    """A maximal run of divided nodes each having one unfilled child."""

    members: tuple[NodeId, ...]
    terminal: NodeId


@dataclass(frozen=True)
class Pseudonode:
    """Contracted stand-in for a degenerate chain.

    ``high_contrib``/``low_contrib`` hold the chain's own aggregate mass
    (member failure numbers, filled subtrees, contracted-edge nodes) for
    the two replica totals; the subtree below ``child`` (the chain's
    terminal) is resolved by the ordinary conquer step and added on top.
    """

    members: tuple[NodeId, ...]
    child: NodeId
    high_contrib: list[int] = field(repr=False)
    low_contrib: list[int] = field(repr=False)
    span: int  # original nodes covered by the contributions
    alloc_count: int  # accumulators allocated while building (3 per chain)


def find_degenerate_chains(infos: Mapping[NodeId, object], root: NodeId) -> list[DegenerateChain]:
    """Locate maximal degenerate chains in a divided tree.

    ``infos`` maps each divided node to its divide record; a node joins a
    chain iff its record is marked ``chainable`` (it was split with
    exactly one unfilled child).  Terminals — branching, fully-filled, or
    base-case nodes — end a chain and are not part of it.
    """
    chains: list[DegenerateChain] = []
    stack = [root]
    while stack:
        u = stack.pop()
        info = infos[u]
        if getattr(info, "chainable", False):
            members = [u]
            v = info.unfilled[0]
            while getattr(infos[v], "chainable", False):
                members.append(v)
                v = infos[v].unfilled[0]
            chains.append(DegenerateChain(tuple(members), v))
            stack.append(v)
        else:
            stack.extend(getattr(info, "unfilled", ()))
    return chains


def transform_chains(
    view: ContractedTree,
    infos: Mapping[NodeId, object],
    chains: Sequence[DegenerateChain],
    trace: Callable[[str], None] | None = None,
) -> dict[NodeId, Pseudonode]:
    """Contract each degenerate chain into a pseudonode.

    Walking a chain accumulates, into three vectors sized to the chain
    head's replica target, the failure-number contributions of every
    member, its filled subtrees, and any contracted-edge nodes — the
    parts of the chain's aggregate that do not depend on decisions made
    below the terminal.
    """
    from .solver import filled_aggregate  # deferred: solver imports this module

    tree = view.tree
    out: dict[NodeId, Pseudonode] = {}
    for chain in chains:
        head = chain.members[0]
        r1 = infos[head].target
        allocs = 0

        def _fresh() -> list[int]:
            nonlocal allocs
            allocs += 1
            return [0] * (r1 + 1)

        own_high, own_low, filled_vec = _fresh(), _fresh(), _fresh()
        span = 0
        for v in chain.members:
            info = infos[v]
            for fc in info.filled:
                add_into(filled_vec, filled_aggregate(tree, fc))
                edge = view.edge_len(fc)
                filled_vec[tree.leaf_count[fc]] += edge
                span += tree.subtree_size[fc] + edge
            own_high[info.target] += 1
            own_low[info.target - 1] += 1
            span += 1
            below = view.edge_len(info.unfilled[0])
            if below:
                own_high[info.child_target] += below
                own_low[info.child_target - 1] += below
                span += below
        out[head] = Pseudonode(
            members=chain.members,
            child=chain.terminal,
            high_contrib=add(own_high, filled_vec),
            low_contrib=add(own_low, filled_vec),
            span=span,
            alloc_count=allocs,
        )
        if trace is not None:
            trace(
                f"chain v1={tree.names[head]} t={len(chain.members) + 1} "
                f"|S_w|={span} r={r1}"
            )
    return out


def expand_solution(plan) -> frozenset[NodeId]:
    """Map a solved plan's decisions back to original leaf identifiers.

    Walks the decision records from the root, emitting filled subtrees'
    leaves wholesale and descending into unfilled children on the branch
    (target or target-1) the conquer phase selected for them.  Raises
    RuntimeError if the reconstruction is inconsistent with the requested
    placement size — that indicates a solver bug and is never swallowed.
    """
    tree = plan.tree
    infos = plan.infos
    out: list[int] = []
    stack: list[tuple[int, bool]] = [(plan.root, True)]
    while stack:
        u, take_high = stack.pop()
        pseudo = plan.pseudos.get(u)
        if pseudo is not None:
            for v in pseudo.members:
                for fc in infos[v].filled:
                    out.extend(tree.leaves_below(fc))
            stack.append((pseudo.child, take_high))
            continue
        info = infos[u]
        kind = info.kind
        if kind == "leaf":
            if take_high:
                out.append(u)
        elif kind == "base":
            if take_high:
                out.append(tree.shallowest_leaf[u])
        elif kind == "full":
            if take_high:
                out.extend(tree.leaves_below(u))
            elif info.target > 1:
                for fc in info.low_filled:
                    out.extend(tree.leaves_below(fc))
                for ch in info.unfilled:
                    stack.append((ch, ch in info.sel_low))
        else:  # split
            for fc in info.filled:
                out.extend(tree.leaves_below(fc))
            sel = info.sel_high if take_high else info.sel_low
            for ch in info.unfilled:
                stack.append((ch, ch in sel))
    placement = frozenset(out)
    if len(placement) != len(out) or len(placement) != plan.rho:
        raise RuntimeError(
            f"placement reconstruction produced {len(out)} leaves "
            f"({len(placement)} distinct) for rho={plan.rho}"
        )
    return placement
