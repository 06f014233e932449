import random

import pytest

from treeplacer import FailureTree, generate_random_tree, parse_topology, preprocess

# Thirteen nodes, nine leaves.  Placements {l1,l2,a2} and {a2,b1,b2} have
# aggregates <2,1,3,7> and <1,1,4,7>; the latter is optimal for rho=3.
T13_TEXT = """\
root A
root B
A A1
A a2
A1 l1
A1 l2
B b1
B b2
B b3
B b4
B b5
B b6
"""


@pytest.fixture(scope="session")
def t13() -> FailureTree:
    return parse_topology(T13_TEXT)


def ids(tree: FailureTree, *names: str) -> list[int]:
    return [tree.node_id(n) for n in names]


def random_small_tree(seed: int, max_nodes: int = 40, max_leaves: int = 12) -> FailureTree:
    """Deterministic random tree with a bounded leaf count (for brute force)."""
    rng = random.Random(seed)
    while True:
        n = rng.randint(2, max_nodes)
        k = rng.choice([1, 2, 2, 3, 4])
        tree = generate_random_tree(n, k, rng.randrange(1 << 30))
        if tree.leaf_count[tree.root] <= max_leaves:
            return tree


def chainy_tree(seed: int) -> FailureTree:
    """Random tree biased toward unary runs and single-unfilled-child spines.

    A spine of internal nodes each carries a couple of small (easily
    filled) side subtrees, ending in a branching tail: the shape that
    produces degenerate chains and contracted unary paths.
    """
    rng = random.Random(seed)
    names = ["s0"]
    parent = [-1]

    def add(p: int) -> int:
        names.append(f"x{len(names)}")
        parent.append(p)
        return len(names) - 1

    spine = 0
    for _ in range(rng.randint(3, 9)):
        for _ in range(rng.randint(0, 2)):
            side = add(spine)
            for _ in range(rng.randint(0, 1)):
                add(side)
        for _ in range(rng.randint(0, 2)):  # unary run
            spine = add(spine)
        spine = add(spine)
    for _ in range(rng.randint(2, 4)):
        c = add(spine)
        for _ in range(rng.randint(0, 2)):
            add(c)
    return preprocess(names, parent)
