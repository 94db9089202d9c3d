"""Distance sensitivity oracles for directed graphs with small integer weights.

Build once, then answer "shortest u -> v distance if this vertex or edge
fails" in a constant number of table reads:

    >>> from dso import Graph, build_full_dso, edge_failure
    >>> g = Graph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 3)], M=3)
    >>> oracle = build_full_dso(g)
    >>> oracle.query(0, 2, edge_failure(1))
    3.0

The construction is randomized (sampled truncated oracles, radius extension,
and a constant-lookup transformation) and self-checks its structural
invariants during the build; the companion brute-force oracle in
``dso.baseline_oracle`` exists to validate it.
"""

from .apsp_tiebreak import (BottleneckBuildError, CanonicalApsp,
                            build_canonical_apsp, compute_bottleneck_table)
from .baseline_oracle import (BruteTruncatedOracle, CanonicalPaths,
                              brute_distance, replacement_matrix)
from .extend_dso import ExtendBuildError, ExtendedOracle
from .fast_dso import (FastBuildError, FastOracle, PriorityContext,
                       assign_priorities)
from .graph_core import (UNREACHABLE, Failure, FailureView, Graph,
                         GraphFormatError, dump_graph, edge_failure,
                         fixture_a, fixture_b, is_unreachable, load_graph,
                         vertex_failure)
from .harness_cli import generate_graph, main
from .pipeline import DsoConfig, FullDso, base_radius, build_full_dso
from .sampled_dso import SampledBuildError, SampledOracle
from .truncated_apsp import hop_truncated_apsp, minplus_product

__version__ = "0.1.0"

__all__ = [
    "BottleneckBuildError",
    "BruteTruncatedOracle",
    "CanonicalApsp",
    "CanonicalPaths",
    "DsoConfig",
    "ExtendBuildError",
    "ExtendedOracle",
    "Failure",
    "FailureView",
    "FastBuildError",
    "FastOracle",
    "FullDso",
    "Graph",
    "GraphFormatError",
    "PriorityContext",
    "SampledBuildError",
    "SampledOracle",
    "UNREACHABLE",
    "assign_priorities",
    "base_radius",
    "brute_distance",
    "build_canonical_apsp",
    "build_full_dso",
    "compute_bottleneck_table",
    "dump_graph",
    "edge_failure",
    "fixture_a",
    "fixture_b",
    "generate_graph",
    "hop_truncated_apsp",
    "is_unreachable",
    "load_graph",
    "main",
    "minplus_product",
    "replacement_matrix",
    "vertex_failure",
]
