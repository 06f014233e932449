"""Replica placement on hierarchical failure models.

Given a rooted tree of failure events whose leaves can host replicas,
this package computes placements whose failure aggregate — the histogram
of per-event failure numbers, read from the worst count down — is
lexicographically minimal.  It ships an exhaustive oracle, the greedy
placer, a round-robin baseline, and basic/fast divide-and-conquer
solvers that all agree on the optimum, plus evaluation and verification
tools and a CLI (``treeplacer``).
"""

from .aggregate import (
    EQUAL,
    GREATER,
    LESS,
    AggregateDiff,
    CompactAggregate,
    FailureAggregate,
    add,
    bump,
    expand,
    lex_compare,
    parse_render,
    render,
    subtract,
    truncate,
)
from .evaluator import (
    BalanceReport,
    FailureDag,
    MonotonicityReport,
    PathAggregate,
    failure_aggregate,
    failure_number,
    is_balanced,
    monotonicity_check,
    path_aggregate,
    subtree_replica_counts,
    validate_placement,
)
from .model import (
    FailureTree,
    NodeId,
    TopologyError,
    generate_random_tree,
    parse_topology,
    preprocess,
    serialize_topology,
)
from .oracles import (
    BruteForceBudgetError,
    PlacerOutcome,
    brute_force_place,
    greedy_place,
    round_robin_place,
)
from .solver import (
    FillClassification,
    SolveResult,
    child_targets,
    conquer_select,
    filled_aggregate,
    get_filled,
    reference_fill,
    solve,
)
from .transform import (
    ChainRecord,
    ContractedTree,
    DegenerateChain,
    Pseudonode,
    contract_unary_paths,
    expand_solution,
    find_degenerate_chains,
    transform_chains,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateDiff",
    "BalanceReport",
    "BruteForceBudgetError",
    "ChainRecord",
    "CompactAggregate",
    "ContractedTree",
    "DegenerateChain",
    "EQUAL",
    "FailureAggregate",
    "FailureDag",
    "FailureTree",
    "FillClassification",
    "GREATER",
    "LESS",
    "MonotonicityReport",
    "NodeId",
    "PathAggregate",
    "PlacerOutcome",
    "Pseudonode",
    "SolveResult",
    "TopologyError",
    "add",
    "brute_force_place",
    "bump",
    "child_targets",
    "conquer_select",
    "contract_unary_paths",
    "expand",
    "expand_solution",
    "failure_aggregate",
    "failure_number",
    "filled_aggregate",
    "find_degenerate_chains",
    "generate_random_tree",
    "get_filled",
    "greedy_place",
    "is_balanced",
    "lex_compare",
    "monotonicity_check",
    "parse_render",
    "parse_topology",
    "path_aggregate",
    "preprocess",
    "reference_fill",
    "render",
    "round_robin_place",
    "serialize_topology",
    "solve",
    "subtract",
    "subtree_replica_counts",
    "transform_chains",
    "truncate",
    "validate_placement",
]
