"""Quickstart: evaluate placements and compare all four placers.

The model is a small rack-style hierarchy: a failure of any internal
event takes down every server below it.  A placement's failure aggregate
<p_rho,...,p_0> counts how many events would wipe out rho replicas, how
many would wipe out rho-1, and so on; placements are compared by reading
that vector left to right.
"""

from treeplacer import (
    brute_force_place,
    failure_aggregate,
    greedy_place,
    is_balanced,
    parse_topology,
    solve,
)

TOPOLOGY = """\
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


def main() -> None:
    tree = parse_topology(TOPOLOGY)
    print(f"tree: {tree.n} nodes, {tree.leaf_count[tree.root]} candidate leaves\n")

    crowded = [tree.node_id(x) for x in ("l1", "l2", "a2")]  # all under A
    spread = [tree.node_id(x) for x in ("a2", "b1", "b2")]
    for label, placement in (("crowded", crowded), ("spread", spread)):
        agg = failure_aggregate(tree, placement)
        balanced = "balanced" if is_balanced(tree, placement) else "unbalanced"
        print(f"{label:8s} {sorted(tree.names[u] for u in placement)}"
              f"  aggregate {agg}  ({balanced})")
    print()
    print("the spread placement wins: no single non-root event can take out")
    print("all three replicas, and only one (B) can take out two\n")

    print("placers, three replicas:")
    for label, outcome in (
        ("brute", brute_force_place(tree, 3)),
        ("greedy", greedy_place(tree, 3)),
        ("dp", solve(tree, 3, mode="basic")),
        ("fast", solve(tree, 3, mode="fast")),
    ):
        names = sorted(tree.names[u] for u in outcome.placement)
        print(f"  {label:6s} -> {names}  aggregate {outcome.aggregate}")


if __name__ == "__main__":
    main()
