"""Failure-model trees: topology ingestion, random generation, preprocessing.

A failure model is a rooted tree of failure events.  An edge ``u -> v``
means that the occurrence of event ``u`` also triggers ``v``, so a single
failure takes down everything below it.  The leaves are the placement
candidates: the only vertices that may hold a data replica.

Topology file format (UTF-8 text):

* one edge per line, ``<parent-token> <child-token>``, separated by one or
  more spaces/tabs;
* a line with a single token declares an isolated node (only used by the
  one-node tree, which has no edges to list);
* blank lines and lines starting with ``#`` are ignored;
* the root is the unique token that never appears as a child;
* leaves are the tokens that never appear as a parent.

Node names are arbitrary non-whitespace tokens.  Dense integer indices are
assigned in first-appearance order; library APIs speak indices, and the
name table rides along on the tree.  Serialization emits edges in
pre-order, one per line, so ``parse_topology(serialize_topology(t))``
reproduces the tree with identical names.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

NodeId = int


class TopologyError(ValueError):
    """Raised for malformed topology input; carries the offending line."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class FailureTree:
    """A preprocessed rooted failure tree.

    All per-node tables are dense lists indexed by NodeId.  The structure
    is immutable after construction and safe to share across threads;
    solvers never mutate it.

    Attributes
    ----------
    n : int
        Node count; indices run 0..n-1.
    names : tuple of str
        Original token for each node.
    root : NodeId
    parent : tuple of int
        Parent index per node; -1 for the root.
    children : tuple of tuple of int
        Children in input order.
    leaf_count : tuple of int
        Number of leaf descendants (a leaf counts itself, so 1).
    subtree_size : tuple of int
        Nodes in the subtree, inclusive.
    min_leaf_depth : tuple of int
        Edges from the node down to its shallowest descendant leaf.
    depth : tuple of int
        Edges from the root.
    shallowest_leaf : tuple of int
        A minimum-depth descendant leaf per node (smallest index on ties).
    """

    n: int
    names: tuple[str, ...]
    root: NodeId
    parent: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    leaf_count: tuple[int, ...]
    subtree_size: tuple[int, ...]
    min_leaf_depth: tuple[int, ...]
    depth: tuple[int, ...]
    shallowest_leaf: tuple[int, ...]
    _index: dict[str, int] = field(repr=False, compare=False, default_factory=dict)

    def is_leaf(self, u: NodeId) -> bool:
        return not self.children[u]

    @property
    def leaves(self) -> list[NodeId]:
        return [u for u in range(self.n) if not self.children[u]]

    def node_id(self, name: str) -> NodeId:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown node name {name!r}") from None

    def node_name(self, u: NodeId) -> str:
        return self.names[u]

    def subtree(self, u: NodeId) -> Iterator[NodeId]:
        """Yield the subtree of u (u first), iteratively."""
        stack = [u]
        while stack:
            v = stack.pop()
            yield v
            stack.extend(reversed(self.children[v]))

    def leaves_below(self, u: NodeId) -> list[NodeId]:
        return [v for v in self.subtree(u) if not self.children[v]]

    def ancestors(self, u: NodeId) -> Iterator[NodeId]:
        """Yield u, parent(u), ..., root."""
        v = u
        while v != -1:
            yield v
            v = self.parent[v]


def preprocess(
    names: Sequence[str],
    parent: Sequence[int],
    children: Sequence[Sequence[int]] | None = None,
) -> FailureTree:
    """Validate a raw parent/child structure and compute per-node tables.

    ``parent[i]`` is the parent index of node i, or -1 for the root.  When
    ``children`` is omitted, child lists are built in index order.  All
    tables (leaf counts, subtree sizes, minimum leaf depths, depths) are
    filled in O(n) with iterative sweeps.

    Raises TopologyError if there is not exactly one root, or if some node
    is unreachable from it (a cycle or an orphan).
    """
    n = len(parent)
    if n == 0:
        raise TopologyError("empty topology")
    if len(names) != n:
        raise ValueError("names and parent must have the same length")
    roots = [i for i in range(n) if parent[i] == -1]
    if not roots:
        raise TopologyError("no root: every node has a parent (cycle)")
    if len(roots) > 1:
        listed = ", ".join(names[r] for r in roots)
        raise TopologyError(f"multiple roots: {listed}")
    root = roots[0]

    if children is None:
        built: list[list[int]] = [[] for _ in range(n)]
        for i in range(n):
            if i != root:
                built[parent[i]].append(i)
        child_lists = built
    else:
        child_lists = [list(c) for c in children]

    # BFS order doubles as the reachability check and gives us a
    # parents-before-children order for the accumulation sweeps.
    order = [root]
    depth = [0] * n
    for u in order:
        for c in child_lists[u]:
            depth[c] = depth[u] + 1
            order.append(c)
    if len(order) != n:
        reached = set(order)
        missing = [names[i] for i in range(n) if i not in reached]
        raise TopologyError("orphan node(s) not connected to the root: " + ", ".join(missing))

    leaf_count = [0] * n
    subtree_size = [0] * n
    min_leaf_depth = [0] * n
    shallowest = [0] * n
    for u in reversed(order):
        kids = child_lists[u]
        if not kids:
            leaf_count[u] = 1
            subtree_size[u] = 1
            min_leaf_depth[u] = 0
            shallowest[u] = u
        else:
            leaf_count[u] = sum(leaf_count[c] for c in kids)
            subtree_size[u] = 1 + sum(subtree_size[c] for c in kids)
            best = min((min_leaf_depth[c] + 1, shallowest[c]) for c in kids)
            min_leaf_depth[u], shallowest[u] = best

    return FailureTree(
        n=n,
        names=tuple(names),
        root=root,
        parent=tuple(parent),
        children=tuple(tuple(c) for c in child_lists),
        leaf_count=tuple(leaf_count),
        subtree_size=tuple(subtree_size),
        min_leaf_depth=tuple(min_leaf_depth),
        depth=tuple(depth),
        shallowest_leaf=tuple(shallowest),
        _index={name: i for i, name in enumerate(names)},
    )


def parse_topology(text: str) -> FailureTree:
    """Parse an edge-list topology file into a preprocessed FailureTree.

    Errors (duplicate edge, node attached twice, cycle, orphan node,
    multiple roots, empty input, malformed line) raise TopologyError
    naming the offending line where one exists.
    """
    names: list[str] = []
    index: dict[str, int] = {}
    parent: list[int] = []
    children: list[list[int]] = []
    declared_only: dict[int, int] = {}  # node -> declaring line
    seen_edges: set[tuple[int, int]] = set()
    attach_line: dict[int, int] = {}
    comp: list[int] = []  # union-find over components, for cycle detection

    def intern(tok: str) -> int:
        if tok in index:
            return index[tok]
        index[tok] = len(names)
        names.append(tok)
        parent.append(-1)
        children.append([])
        comp.append(len(comp))
        return index[tok]

    def find(x: int) -> int:
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if len(toks) == 1:
            declared_only.setdefault(intern(toks[0]), lineno)
            continue
        if len(toks) != 2:
            raise TopologyError(f"expected '<parent> <child>', got {line!r}", lineno)
        p = intern(toks[0])
        c = intern(toks[1])
        if (p, c) in seen_edges:
            raise TopologyError(f"duplicate edge {toks[0]} -> {toks[1]}", lineno)
        seen_edges.add((p, c))
        if p == c:
            raise TopologyError(f"self-loop on {toks[0]}", lineno)
        if parent[c] != -1:
            raise TopologyError(
                f"node {toks[1]} already attached at line {attach_line[c]}", lineno
            )
        # c has no parent yet, so it is the root of its component; if p is
        # already in that component the new edge closes a cycle.
        rp, rc = find(p), find(c)
        if rp == rc:
            raise TopologyError(f"edge {toks[0]} -> {toks[1]} creates a cycle", lineno)
        comp[rc] = rp
        parent[c] = p
        attach_line[c] = lineno
        children[p].append(c)
        declared_only.pop(c, None)
        declared_only.pop(p, None)

    if not names:
        raise TopologyError("empty topology")
    if len(names) > 1:
        for node, lineno in declared_only.items():
            if not children[node] and parent[node] == -1:
                raise TopologyError(f"orphan node {names[node]}", lineno)
    return preprocess(names, parent, children)


def serialize_topology(tree: FailureTree) -> str:
    """Render the tree as an edge list in pre-order, one edge per line."""
    if tree.n == 1:
        return tree.names[tree.root] + "\n"
    lines = []
    for u in tree.subtree(tree.root):
        for c in tree.children[u]:
            lines.append(f"{tree.names[u]} {tree.names[c]}")
    return "\n".join(lines) + "\n"


def generate_random_tree(nodes: int, max_children: int, seed: int) -> FailureTree:
    """Generate a random tree by uniform attachment, deterministically.

    Node i (for i >= 1) attaches to a node chosen uniformly among the
    earlier nodes whose arity is still below ``max_children``.  Names are
    ``n0``..``n{nodes-1}`` with ``n0`` the root.  The same
    (nodes, max_children, seed) triple always yields the same tree.
    """
    if nodes < 1:
        raise ValueError("nodes must be >= 1")
    if nodes > 1 and max_children < 1:
        raise ValueError("max_children must be >= 1 when nodes > 1")
    rng = random.Random(seed)
    parent = [-1] * nodes
    arity = [0] * nodes
    pool = [0]  # nodes still accepting children
    for i in range(1, nodes):
        j = rng.randrange(len(pool))
        p = pool[j]
        parent[i] = p
        arity[p] += 1
        if arity[p] == max_children:
            pool[j] = pool[-1]
            pool.pop()
        pool.append(i)
    names = [f"n{i}" for i in range(nodes)]
    return preprocess(names, parent)
