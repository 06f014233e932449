import random

import pytest

from treeplacer import (
    EQUAL,
    FailureDag,
    failure_aggregate,
    failure_number,
    is_balanced,
    lex_compare,
    monotonicity_check,
    parse_topology,
    path_aggregate,
    subtree_replica_counts,
)

from conftest import ids, random_small_tree

# Two scenarios for three replicas behind per-rack power units: all on one
# rack, or spread across three racks.
SCENARIO_I = "v u\nv u2\nu s1\nu s2\nu s3\nu2 s4"
SCENARIO_II = "v u\nv u2\nv u3\nu s1\nu s2\nu2 s3\nu2 s4\nu3 s5"


def test_failure_number_single_rack():
    t = parse_topology(SCENARIO_I)
    placed = ids(t, "s1", "s2", "s3")
    assert failure_number(t, t.node_id("u"), placed) == 3
    assert failure_number(FailureDag.from_tree(t), t.node_id("u"), placed) == 3


def test_failure_number_spread_racks():
    t = parse_topology(SCENARIO_II)
    placed = ids(t, "s1", "s3", "s5")
    for rack in ("u", "u2", "u3"):
        assert failure_number(t, t.node_id(rack), placed) == 1
    assert failure_number(t, t.root, placed) == 3


def test_failure_number_reflexive_and_zero(t13):
    placed = ids(t13, "b1")
    assert failure_number(t13, t13.node_id("b1"), placed) == 1
    assert failure_number(t13, t13.node_id("A"), placed) == 0


def test_failure_number_unknown_node(t13):
    with pytest.raises(ValueError):
        failure_number(t13, 99, [])


def test_t13_published_aggregates(t13):
    assert failure_aggregate(t13, ids(t13, "l1", "l2", "a2")).descending == (2, 1, 3, 7)
    assert failure_aggregate(t13, ids(t13, "a2", "b1", "b2")).descending == (1, 1, 4, 7)


def test_empty_placement_aggregate(t13):
    agg = failure_aggregate(t13, [])
    assert agg.entries == (13,)


def test_aggregate_rejects_internal_node(t13):
    with pytest.raises(ValueError, match="not a leaf"):
        failure_aggregate(t13, [t13.node_id("B")])


def test_dag_with_event_cycle():
    # two events triggering each other, both reaching one candidate
    dag = FailureDag(names=("e1", "e2", "c"), adjacency=((1, 2), (0,), ()), candidates=frozenset({2}))
    assert failure_number(dag, 0, [2]) == 1
    assert failure_number(dag, 1, [2]) == 1
    assert failure_aggregate(dag, [2]).entries == (0, 3)


def test_dag_candidate_out_degree_enforced():
    with pytest.raises(ValueError, match="outgoing"):
        FailureDag(names=("a", "b"), adjacency=((1,), (0,)), candidates=frozenset({1}))


@pytest.mark.parametrize("seed", range(1, 25))
def test_tree_vs_dag_aggregate_equivalence(seed):
    rng = random.Random(seed * 13)
    t = random_small_tree(seed)
    dag = FailureDag.from_tree(t)
    leaves = t.leaves
    rho = rng.randint(0, len(leaves))
    placed = rng.sample(leaves, rho)
    assert failure_aggregate(t, placed).entries == failure_aggregate(dag, placed).entries


def _path_walk_oracle(tree, top, bottom, placed):
    """Independent path aggregate: explicit subtree membership per node."""
    path = []
    v = bottom
    while True:
        path.append(v)
        if v == top:
            break
        v = tree.parent[v]
    hist = [0] * (len(placed) + 1)
    for u in path:
        below = set(tree.subtree(u))
        hist[sum(1 for p in placed if p in below)] += 1
    return hist


def test_path_aggregate_t13_frozen(t13):
    placed = ids(t13, "a2", "b1", "b2")
    agg = path_aggregate(t13, t13.root, t13.node_id("b1"), placed)
    assert list(agg.entries) == _path_walk_oracle(t13, t13.root, t13.node_id("b1"), placed)
    assert agg.descending == (1, 1, 1, 0)  # root=3, B=2, b1=1 over three nodes


def test_path_aggregate_leaf_to_itself(t13):
    b1 = t13.node_id("b1")
    agg = path_aggregate(t13, b1, b1, [b1])
    assert agg.entries == (0, 1)


def test_path_aggregate_empty_placement(t13):
    agg = path_aggregate(t13, t13.root, t13.node_id("l1"), [])
    assert agg.entries == (4,)  # root, A, A1, l1 all at zero


def test_path_aggregate_requires_descendant(t13):
    with pytest.raises(ValueError, match="not a descendant"):
        path_aggregate(t13, t13.node_id("A"), t13.node_id("b1"), [])


@pytest.mark.parametrize("seed", range(1, 40))
def test_path_aggregate_matches_walk_oracle(seed):
    rng = random.Random(seed * 31)
    t = random_small_tree(seed)
    leaves = t.leaves
    placed = rng.sample(leaves, rng.randint(0, len(leaves)))
    bottom = rng.choice(leaves)
    agg = path_aggregate(t, t.root, bottom, placed)
    assert list(agg.entries) == _path_walk_oracle(t, t.root, bottom, placed)


def test_balance_t13(t13):
    assert is_balanced(t13, ids(t13, "a2", "b1", "b2"))
    report = is_balanced(t13, ids(t13, "l1", "l2", "a2"))
    assert not report
    assert report.node == t13.root
    assert report.unfilled_child == t13.node_id("B")
    assert report.sibling == t13.node_id("A")


def test_balance_empty_placement(t13):
    assert is_balanced(t13, [])


def test_monotonicity_t13(t13):
    placed = ids(t13, "l1", "l2", "a2")
    assert monotonicity_check(t13, placed)
    counts = subtree_replica_counts(t13, placed)
    chain = [t13.root, t13.node_id("A"), t13.node_id("A1"), t13.node_id("l1")]
    assert [counts[u] for u in chain] == [3, 3, 2, 1]


@pytest.mark.parametrize("seed", range(1, 30))
def test_random_placement_properties(seed):
    rng = random.Random(seed * 7)
    t = random_small_tree(seed)
    leaves = t.leaves
    rho = rng.randint(0, len(leaves))
    placed = rng.sample(leaves, rho)
    agg = failure_aggregate(t, placed)
    assert sum(agg.entries) == t.n
    assert failure_number(t, t.root, placed) == rho
    assert monotonicity_check(t, placed)


@pytest.mark.parametrize("seed", range(1, 30))
def test_path_order_predicts_placement_order(seed):
    rng = random.Random(seed * 97)
    t = random_small_tree(seed)
    leaves = t.leaves
    if len(leaves) < 3:
        pytest.skip("need two spare candidates")
    placed = rng.sample(leaves, rng.randint(0, len(leaves) - 2))
    rest = [u for u in leaves if u not in placed]
    a, b = rng.sample(rest, 2)
    path_order = lex_compare(
        path_aggregate(t, t.root, a, placed).entries,
        path_aggregate(t, t.root, b, placed).entries,
    )
    full_order = lex_compare(
        failure_aggregate(t, placed + [a]).entries,
        failure_aggregate(t, placed + [b]).entries,
    )
    assert path_order == full_order
