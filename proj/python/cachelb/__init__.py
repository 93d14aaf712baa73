"""Python bindings for the cachelb simulator.

Nodes are integer indices ``y * side + x``; files are numbered 1..K.
"""

from ._core import (
    ConfigGraph,
    MetricsRecord,
    Placement,
    PopularityProfile,
    RequestStream,
    StrategyConfig,
    TorusGeometry,
    UnservableFile,
    build_config_graph,
    cost_regime,
    fit_loglog,
    generate,
    goodness_check,
    harmonic_lambda,
    make_profile,
    per_node_counts,
    place,
    predicted_cost,
    run,
    run_experiment,
    selftest,
    voronoi,
)

__all__ = [
    "ConfigGraph",
    "MetricsRecord",
    "Placement",
    "PopularityProfile",
    "RequestStream",
    "StrategyConfig",
    "TorusGeometry",
    "UnservableFile",
    "build_config_graph",
    "cost_regime",
    "fit_loglog",
    "generate",
    "goodness_check",
    "harmonic_lambda",
    "make_profile",
    "per_node_counts",
    "place",
    "predicted_cost",
    "run",
    "run_experiment",
    "selftest",
    "voronoi",
]
