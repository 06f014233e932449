"""Command-line front end: place, verify, gen, and bench.

Exit codes: 0 success, 1 verification/assertion mismatch, 2 input or
parse error, 3 infeasible replica count, 4 brute-force budget exceeded.
The environment variable PLACER_BRUTE_BUDGET overrides the exhaustive
placer's combination budget.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import dataclass

from .aggregate import parse_render, render
from .evaluator import failure_aggregate, is_balanced
from .model import FailureTree, TopologyError, generate_random_tree, parse_topology, serialize_topology
from .oracles import (
    BruteForceBudgetError,
    PlacerOutcome,
    brute_force_place,
    greedy_place,
)
from .solver import solve

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_BUDGET = 4

ALGORITHMS = ("brute", "greedy", "dp", "fast")


@dataclass(frozen=True)
class BenchRow:
    """One benchmark measurement, serialized as a CSV row."""

    algorithm: str
    n: int
    rho: int
    seed: int
    nanos: int
    evals: int
    aggregate: str


def _brute_budget() -> int | None:
    raw = os.environ.get("PLACER_BRUTE_BUDGET")
    return int(raw) if raw else None


def _run_algorithm(name: str, tree: FailureTree, rho: int, trace=None) -> PlacerOutcome:
    if name == "brute":
        return brute_force_place(tree, rho, budget=_brute_budget())
    if name == "greedy":
        return greedy_place(tree, rho)
    if name == "dp":
        return solve(tree, rho, mode="basic", trace=trace)
    if name == "fast":
        return solve(tree, rho, mode="fast", trace=trace)
    raise ValueError(f"unknown algorithm {name!r}")


def _load_tree(path: str) -> FailureTree:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_topology(fh.read())


def _cmd_place(args: argparse.Namespace) -> int:
    try:
        tree = _load_tree(args.tree)
    except (TopologyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    leaves = tree.leaf_count[tree.root]
    if args.replicas < 0 or args.replicas > leaves:
        print(
            f"error: replicas={args.replicas} infeasible for {leaves} leaves",
            file=sys.stderr,
        )
        return EXIT_INFEASIBLE
    trace = (lambda line: print(line, file=sys.stderr)) if args.trace else None
    try:
        outcome = _run_algorithm(args.algorithm, tree, args.replicas, trace=trace)
    except BruteForceBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    names = sorted(tree.names[u] for u in outcome.placement)
    if args.json:
        payload = {
            "placement": names,
            "aggregate": list(outcome.aggregate.descending),
        }
        print(json.dumps(payload))
    else:
        for name in names:
            print(name)
        print(f"aggregate: {outcome.aggregate}")
    if args.check_balanced:
        report = is_balanced(tree, outcome.placement)
        if report:
            print("balanced: yes")
        else:
            print(
                f"balanced: no (node {tree.names[report.node]}, "
                f"child {tree.names[report.unfilled_child]} vs {tree.names[report.sibling]})"
            )
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    try:
        tree = _load_tree(args.tree)
        with open(args.placement, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh.read().splitlines()]
        names = [ln for ln in lines if ln and not ln.startswith("#")]
    except (TopologyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        print(f"error: duplicate placement entries: {', '.join(dupes)}", file=sys.stderr)
        return EXIT_INPUT
    try:
        ids = [tree.node_id(n) for n in names]
        for u in ids:
            if not tree.is_leaf(u):
                raise ValueError(f"node {tree.names[u]} is not a leaf")
        agg = failure_aggregate(tree, ids)
    except (KeyError, ValueError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    print(str(agg))
    if args.expect is not None:
        try:
            expected = parse_render(args.expect)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        if expected != list(agg.entries):
            print(
                f"mismatch: expected {render(expected)}, computed {agg}",
                file=sys.stderr,
            )
            return EXIT_MISMATCH
    return EXIT_OK


def _cmd_gen(args: argparse.Namespace) -> int:
    try:
        tree = generate_random_tree(args.nodes, args.max_children, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = serialize_topology(tree)
    try:
        if args.out == "-":
            sys.stdout.write(text)
        else:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def _bench_tree(nodes: int, max_children: int, seed: int, replicas: int) -> tuple[FailureTree, int]:
    """Generate a tree with at least ``replicas`` leaves (bounded retries)."""
    for attempt in range(20):
        actual_seed = seed + 1_000_003 * attempt
        tree = generate_random_tree(nodes, max_children, actual_seed)
        if tree.leaf_count[tree.root] >= replicas:
            return tree, actual_seed
    raise ValueError(
        f"could not generate a {nodes}-node tree with {replicas} leaves in 20 attempts"
    )


def _cmd_bench(args: argparse.Namespace) -> int:
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    for a in algorithms:
        if a not in ALGORITHMS:
            print(f"error: unknown algorithm {a!r}", file=sys.stderr)
            return EXIT_INPUT
    rows: list[BenchRow] = []
    for trial in range(args.trials):
        try:
            tree, seed = _bench_tree(args.nodes, args.max_children, args.seed + trial, args.replicas)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INFEASIBLE
        aggregates = {}
        for name in algorithms:
            start = time.perf_counter_ns()
            try:
                outcome = _run_algorithm(name, tree, args.replicas)
            except BruteForceBudgetError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_BUDGET
            nanos = time.perf_counter_ns() - start
            aggregates[name] = outcome.aggregate
            rows.append(
                BenchRow(
                    algorithm=name,
                    n=args.nodes,
                    rho=args.replicas,
                    seed=seed,
                    nanos=nanos,
                    evals=outcome.evaluations,
                    aggregate=str(outcome.aggregate),
                )
            )
        if not args.no_assert and len(set(str(a) for a in aggregates.values())) > 1:
            detail = ", ".join(f"{k}={v}" for k, v in aggregates.items())
            print(f"aggregate mismatch in trial {trial}: {detail}", file=sys.stderr)
            return EXIT_MISMATCH
    try:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["algorithm", "n", "rho", "seed", "nanos", "evals", "aggregate"])
            for row in rows:
                writer.writerow(
                    [row.algorithm, row.n, row.rho, row.seed, row.nanos, row.evals, row.aggregate]
                )
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treeplacer",
        description="Replica placement on hierarchical failure models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_place = sub.add_parser("place", help="compute a placement for a topology file")
    p_place.add_argument("--tree", required=True, help="topology file")
    p_place.add_argument("--replicas", type=int, required=True, help="placement size")
    p_place.add_argument("--algorithm", choices=ALGORITHMS, default="fast")
    p_place.add_argument("--check-balanced", action="store_true", help="also report balance")
    p_place.add_argument("--json", action="store_true", help="emit JSON instead of text")
    p_place.add_argument("--trace", action="store_true", help="divide-phase trace on stderr")
    p_place.set_defaults(func=_cmd_place)

    p_verify = sub.add_parser("verify", help="evaluate the aggregate of a given placement")
    p_verify.add_argument("--tree", required=True)
    p_verify.add_argument("--placement", required=True, help="file with one leaf name per line")
    p_verify.add_argument("--expect", help='aggregate to compare against, e.g. "<1,1,4,7>"')
    p_verify.set_defaults(func=_cmd_verify)

    p_gen = sub.add_parser("gen", help="generate a random topology file")
    p_gen.add_argument("--nodes", type=int, required=True)
    p_gen.add_argument("--max-children", type=int, default=3)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True, help="output path, or - for stdout")
    p_gen.set_defaults(func=_cmd_gen)

    p_bench = sub.add_parser("bench", help="time algorithms on random trees, write CSV")
    p_bench.add_argument("--nodes", type=int, required=True)
    p_bench.add_argument("--replicas", type=int, required=True)
    p_bench.add_argument("--trials", type=int, default=5)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--max-children", type=int, default=3)
    p_bench.add_argument("--algorithms", default="greedy,dp,fast", help="comma-separated list")
    p_bench.add_argument("--csv", required=True, help="output CSV path")
    p_bench.add_argument("--no-assert", action="store_true", help="skip cross-algorithm equality check")
    p_bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
