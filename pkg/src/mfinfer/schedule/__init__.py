"""Adaptive escalation schedules over partition trees."""

from .adaptive import (
    AdaptiveConfig,
    AdaptiveResult,
    AdaptiveState,
    burnin_records,
    gradient_step,
    gradient_step_state,
    jd_gradient,
    jd_value,
    nu_star_estimate,
    run_adaptive_sampler,
    update_accumulators,
)
from .tree import (
    BurninRecord,
    Leaf,
    MeanFunction,
    PartitionTree,
    Split,
    TreeParams,
    TreeParseError,
    eval_mean,
    fit_partition,
    fit_regression_tree,
    locate_cell,
    parse_mean_function,
    render_mean_function,
)

__all__ = [
    "AdaptiveConfig",
    "AdaptiveResult",
    "AdaptiveState",
    "BurninRecord",
    "Leaf",
    "MeanFunction",
    "PartitionTree",
    "Split",
    "TreeParams",
    "TreeParseError",
    "burnin_records",
    "eval_mean",
    "fit_partition",
    "fit_regression_tree",
    "gradient_step",
    "gradient_step_state",
    "jd_gradient",
    "jd_value",
    "locate_cell",
    "nu_star_estimate",
    "parse_mean_function",
    "render_mean_function",
    "run_adaptive_sampler",
    "update_accumulators",
]
