"""Exact counting and importance-sampled estimation of temporal motifs."""

from .core import (
    UNBOUNDED_DELTA,
    Motif,
    MotifInstance,
    ParseError,
    StaticGraph,
    TemporalEdge,
    TemporalGraph,
    duration,
    is_delta_instance,
    load_temporal_graph,
    normalize_timestamps,
    parse_motif,
    static_projection,
)
from .exact import (
    CountOverflowError,
    DurationHistogram,
    PairTimeline,
    ThreeEdgePattern,
    all_three_edge_patterns,
    count_backtracking,
    count_two_node,
    count_two_node_motif,
    pair_timelines,
    pattern_from_motif,
    total_count,
)
from .sampling import (
    ConfigurationError,
    Estimate,
    EstimatorContractError,
    IntervalCounts,
    IntervalGrid,
    SamplingConfig,
    StreamOrderError,
    build_interval_grid,
    conditional_variance,
    correlation_diagnostic,
    estimate,
    estimate_streaming,
    exhaustive_expectation,
    heuristic_probabilities,
    instance_weight,
    interval_count_vector,
    sparsity_measure,
    tradeoff_report,
    variance_upper_bound,
)

__version__ = "0.1.0"

__all__ = [
    "UNBOUNDED_DELTA",
    "Motif",
    "MotifInstance",
    "ParseError",
    "StaticGraph",
    "TemporalEdge",
    "TemporalGraph",
    "duration",
    "is_delta_instance",
    "load_temporal_graph",
    "normalize_timestamps",
    "parse_motif",
    "static_projection",
    "CountOverflowError",
    "DurationHistogram",
    "PairTimeline",
    "ThreeEdgePattern",
    "all_three_edge_patterns",
    "count_backtracking",
    "count_two_node",
    "count_two_node_motif",
    "pair_timelines",
    "pattern_from_motif",
    "total_count",
    "ConfigurationError",
    "Estimate",
    "EstimatorContractError",
    "IntervalCounts",
    "IntervalGrid",
    "SamplingConfig",
    "StreamOrderError",
    "build_interval_grid",
    "conditional_variance",
    "correlation_diagnostic",
    "estimate",
    "estimate_streaming",
    "exhaustive_expectation",
    "heuristic_probabilities",
    "instance_weight",
    "interval_count_vector",
    "sparsity_measure",
    "tradeoff_report",
    "variance_upper_bound",
    "__version__",
]
