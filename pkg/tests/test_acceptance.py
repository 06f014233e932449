"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as the
criteria complete.  The randomized sweeps are fully seeded and
deterministic.
"""

import csv
import random
import statistics
import time

import pytest

from treeplacer import (
    LESS,
    add,
    brute_force_place,
    failure_aggregate,
    failure_number,
    generate_random_tree,
    get_filled,
    greedy_place,
    is_balanced,
    lex_compare,
    monotonicity_check,
    parse_topology,
    path_aggregate,
    reference_fill,
    round_robin_place,
    solve,
)
from treeplacer.cli import main as cli_main

from conftest import T13_TEXT, chainy_tree, ids, random_small_tree


def _report(name: str, ok: bool, detail: str = "") -> None:
    tag = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[{tag}] {name}{suffix}")
    assert ok, f"{name}{suffix}"


# -------------------------------------------------------------- criterion 1


def test_criterion_1_t13_fixture():
    start = time.perf_counter()
    t = parse_topology(T13_TEXT)
    ok = failure_aggregate(t, ids(t, "l1", "l2", "a2")).descending == (2, 1, 3, 7)
    ok &= failure_aggregate(t, ids(t, "a2", "b1", "b2")).descending == (1, 1, 4, 7)
    for outcome in (
        brute_force_place(t, 3),
        greedy_place(t, 3),
        solve(t, 3, mode="basic"),
        solve(t, 3, mode="fast"),
    ):
        ok &= outcome.aggregate.descending == (1, 1, 4, 7)
    elapsed = time.perf_counter() - start
    ok &= elapsed < 1.0
    _report("criterion 1: T13 fixture aggregates", ok, f"{elapsed:.3f}s")


# ----------------------------------------------------- criteria 2 and 3


@pytest.fixture(scope="module")
def equivalence_sweep():
    """500 seeded trees, every feasible rho: all four placers, all outcomes."""
    start = time.perf_counter()
    mismatches = []
    unbalanced = []
    cases = 0
    for seed in range(1, 501):
        t = random_small_tree(seed)
        leaves = t.leaf_count[t.root]
        for rho in range(0, leaves + 1):
            outcomes = (
                brute_force_place(t, rho),
                greedy_place(t, rho),
                solve(t, rho, mode="basic"),
                solve(t, rho, mode="fast"),
            )
            cases += 1
            entries = {o.aggregate.entries for o in outcomes}
            if len(entries) != 1:
                mismatches.append((seed, rho))
            for o in outcomes:
                if not is_balanced(t, o.placement):
                    unbalanced.append((seed, rho))
    elapsed = time.perf_counter() - start
    return mismatches, unbalanced, cases, elapsed


def test_criterion_2_oracle_equivalence(equivalence_sweep):
    mismatches, _, cases, elapsed = equivalence_sweep
    ok = not mismatches and elapsed < 120.0
    _report(
        "criterion 2: brute = greedy = dp = fast on 500 trees",
        ok,
        f"{cases} cases, {elapsed:.1f}s, {len(mismatches)} mismatches",
    )


def test_criterion_3_balance_necessary_not_sufficient(equivalence_sweep):
    _, unbalanced, _, _ = equivalence_sweep
    witness = None
    for seed in range(1, 400):
        t = random_small_tree(seed, max_nodes=30, max_leaves=10)
        if t.leaf_count[t.root] < 3:
            continue
        rr = round_robin_place(t, 3)
        best = brute_force_place(t, 3)
        if rr.aggregate.entries != best.aggregate.entries:
            witness = (seed, rr, best)
            break
    ok = not unbalanced and witness is not None
    if witness is not None:
        seed, rr, best = witness
        t = random_small_tree(seed, max_nodes=30, max_leaves=10)
        ok &= bool(is_balanced(t, rr.placement))
        ok &= lex_compare(best.aggregate.entries, rr.aggregate.entries) == LESS
        detail = f"witness seed {seed}: balanced {rr.aggregate} vs optimal {best.aggregate}"
    else:
        detail = "no balanced-but-suboptimal witness found"
    _report("criterion 3: optima balanced; balance is not sufficient", ok, detail)


# -------------------------------------------------------------- criterion 4


def test_criterion_4_property_suites():
    rng = random.Random(0xACCE21)
    violations = {
        "translation": 0,
        "monotonicity": 0,
        "path-order": 0,
        "mass": 0,
        "root": 0,
    }

    for _ in range(1000):  # lex order is translation invariant
        m = rng.randint(1, 8)
        x, y, z = (
            [rng.randint(-30, 30) for _ in range(m)] for _ in range(3)
        )
        if lex_compare(x, y) == LESS and lex_compare(add(x, z), add(y, z)) != LESS:
            violations["translation"] += 1

    for case in range(1000):  # per-edge monotonicity, mass, root failure number
        t = random_small_tree(10_000 + case, max_nodes=40, max_leaves=999)
        leaves = t.leaves
        rho = rng.randint(0, len(leaves))
        placed = rng.sample(leaves, rho)
        if not monotonicity_check(t, placed):
            violations["monotonicity"] += 1
        agg = failure_aggregate(t, placed)
        if sum(agg.entries) != t.n:
            violations["mass"] += 1
        if failure_number(t, t.root, placed) != rho:
            violations["root"] += 1

    produced = 0
    case = 0
    while produced < 1000:  # path-aggregate order agrees with placement order
        case += 1
        t = random_small_tree(20_000 + case, max_nodes=40, max_leaves=999)
        leaves = t.leaves
        if len(leaves) < 3:
            continue
        produced += 1
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
        if path_order != full_order:
            violations["path-order"] += 1

    ok = not any(violations.values())
    _report("criterion 4: property suites (1000 cases each)", ok, str(violations))


# -------------------------------------------------------------- criterion 5


def test_criterion_5_fill_classifier_conformance():
    rng = random.Random(0xF111)
    bad = 0
    for _ in range(10_000):
        m = rng.randint(1, 14)
        children = [(i, rng.randint(1, 12)) for i in range(m)]
        total = sum(c for _, c in children)
        r = rng.randint(0, total)
        fill = get_filled(children, r)
        if fill != reference_fill(children, r):
            bad += 1
            continue
        caps = dict(children)
        if fill.unfilled:
            s = r - fill.filled_leaves
            k = fill.unfilled_count
            if fill.filled and not max(caps[c] for c in fill.filled) * k < s:
                bad += 1
            elif not min(caps[c] for c in fill.unfilled) * k >= s:
                bad += 1
        elif r != total:
            bad += 1
    _report("criterion 5: fill classification invariant on 10^4 instances", bad == 0, f"{bad} bad")


# -------------------------------------------------------------- criterion 6


def test_criterion_6_transform_soundness():
    rng = random.Random(0x7F0)
    mismatches = 0
    chains_hit = 0
    unary_hit = 0
    from treeplacer import contract_unary_paths
    from treeplacer.solver import solve_plan

    for seed in range(1, 201):
        t = chainy_tree(seed)
        unary_hit += len(contract_unary_paths(t).records)
        leaves = t.leaf_count[t.root]
        for rho in sorted({1, leaves, rng.randint(1, leaves)}):
            fast = solve(t, rho, mode="fast")
            basic = solve(t, rho, mode="basic")
            if fast.aggregate.entries != basic.aggregate.entries:
                mismatches += 1
            chains_hit += len(solve_plan(t, rho, mode="fast").chains)
    ok = mismatches == 0 and chains_hit > 100 and unary_hit > 100
    _report(
        "criterion 6: fast = basic on 200 chain-biased trees",
        ok,
        f"{mismatches} mismatches, {chains_hit} chains, {unary_hit} unary runs",
    )


# -------------------------------------------------------------- criterion 7


def _median_nanos(tmp_path, algorithm: str, nodes: int, replicas: int, seed: int) -> float:
    out = tmp_path / f"bench_{algorithm}_{nodes}.csv"
    code = cli_main(
        [
            "bench",
            "--nodes", str(nodes),
            "--replicas", str(replicas),
            "--trials", "5",
            "--seed", str(seed),
            "--algorithms", algorithm,
            "--csv", str(out),
        ]
    )
    assert code == 0
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return statistics.median(int(r["nanos"]) for r in rows)


def test_criterion_7_scaling(tmp_path):
    start = time.perf_counter()
    fast = {n: _median_nanos(tmp_path, "fast", n, 32, 1000) for n in (10**3, 10**4, 10**5)}
    greedy = {n: _median_nanos(tmp_path, "greedy", n, 8, 2000) for n in (200, 400, 800)}
    elapsed = time.perf_counter() - start
    # one-sided growth bounds: twice linear per decade, 1.5x quadratic per doubling
    fast_ok = (
        fast[10**4] / fast[10**3] <= 20.0
        and fast[10**5] / fast[10**4] <= 20.0
    )
    greedy_ok = (
        greedy[400] / greedy[200] <= 6.0
        and greedy[800] / greedy[400] <= 6.0
    )
    ok = fast_ok and greedy_ok and elapsed < 300.0
    detail = (
        f"fast ms {fast[10**3] / 1e6:.1f}/{fast[10**4] / 1e6:.1f}/{fast[10**5] / 1e6:.1f}, "
        f"greedy ms {greedy[200] / 1e6:.1f}/{greedy[400] / 1e6:.1f}/{greedy[800] / 1e6:.1f}, "
        f"{elapsed:.0f}s"
    )
    _report("criterion 7: scaling bounds via bench", ok, detail)


# -------------------------------------------------------------- criterion 8


def test_criterion_8_cli_round_trips(tmp_path, capsys):
    failures = 0
    for seed in range(1, 21):
        tree_file = tmp_path / f"t{seed}.tree"
        code = cli_main(
            ["gen", "--nodes", "60", "--max-children", "3", "--seed", str(seed),
             "--out", str(tree_file)]
        )
        assert code == 0
        code = cli_main(
            ["place", "--tree", str(tree_file), "--replicas", "5", "--algorithm", "fast"]
        )
        out = capsys.readouterr().out
        if code != 0:
            failures += 1
            continue
        *names, agg_line = out.strip().splitlines()
        placement_file = tmp_path / f"p{seed}.txt"
        placement_file.write_text("\n".join(names) + "\n")
        code = cli_main(
            [
                "verify",
                "--tree", str(tree_file),
                "--placement", str(placement_file),
                "--expect", agg_line.removeprefix("aggregate: "),
            ]
        )
        capsys.readouterr()
        if code != 0:
            failures += 1
    _report("criterion 8: gen -> place -> verify round trips", failures == 0, f"{failures} failures")
