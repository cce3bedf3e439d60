"""Loss-minimal spanning trees on distribution grids.

Exact integer loss evaluation, the Min-Min grid heuristic with certified
approximation ratios, exact solvers for small instances, and constructive
hardness-reduction generators with witness verification.
"""

from .analysis import (
    BauerResult,
    BoundReport,
    RatioCertificate,
    bauer_bound,
    bauer_bruteforce,
    left_part_bound,
    lower_bound,
    ratio_certificate,
    relaxed_curve,
    right_part_bound,
)
from .errors import EdnrError
from .exact_solver import (
    SolveResult,
    enumerate_all,
    solve_bnb,
    spanning_tree_count,
    verify_table1,
)
from .instance import (
    GridLevels,
    Instance,
    levels,
    make_general,
    make_grid,
    make_uniform_grid,
    parse,
    random_connected_instance,
    serialize,
)
from .minmin import (
    NonUniformReport,
    beta,
    check_property_a,
    check_property_b,
    evaluate_nonuniform,
    greedy_balance_tree,
    minmin_profile,
    minmin_tree,
    shortest_path_tree,
)
from .reductions import (
    PartitionInstance,
    ReductionArtifact,
    ThreePartitionInstance,
    decode_partition,
    encode_3partition,
    encode_partition,
    structure_report,
    witness_tree_3partition,
    witness_tree_partition,
)
from .spanning_tree import (
    LossReport,
    SpanningTree,
    SubtreeProfile,
    evaluate,
    export_dot,
    from_edges,
    parse_tree,
    serialize_tree,
    subtree_size_profile,
)

__version__ = "0.1.0"

__all__ = [
    "BauerResult",
    "BoundReport",
    "EdnrError",
    "GridLevels",
    "Instance",
    "LossReport",
    "NonUniformReport",
    "PartitionInstance",
    "RatioCertificate",
    "ReductionArtifact",
    "SolveResult",
    "SpanningTree",
    "SubtreeProfile",
    "ThreePartitionInstance",
    "bauer_bound",
    "bauer_bruteforce",
    "beta",
    "check_property_a",
    "check_property_b",
    "decode_partition",
    "encode_3partition",
    "encode_partition",
    "enumerate_all",
    "evaluate",
    "evaluate_nonuniform",
    "export_dot",
    "from_edges",
    "greedy_balance_tree",
    "left_part_bound",
    "levels",
    "lower_bound",
    "make_general",
    "make_grid",
    "make_uniform_grid",
    "minmin_profile",
    "minmin_tree",
    "parse",
    "parse_tree",
    "random_connected_instance",
    "ratio_certificate",
    "relaxed_curve",
    "right_part_bound",
    "serialize",
    "serialize_tree",
    "shortest_path_tree",
    "solve_bnb",
    "spanning_tree_count",
    "structure_report",
    "subtree_size_profile",
    "verify_table1",
    "witness_tree_3partition",
    "witness_tree_partition",
]
