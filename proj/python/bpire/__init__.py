"""Python bindings for the bpire core library."""

from ._core import (
    Convention,
    EstimatorResult,
    IncrementLaw,
    Regime,
    RunResult,
    SamplingTarget,
    ScalingRow,
    SlopeFit,
    __version__,
    clan_prob,
    estimate_event_prob,
    estimate_event_prob_reversed,
    fit_log_slope,
    no_survivor_prob,
    reversed_rep_weight,
    run_experiment,
    scaling_sweep,
    sparre_andersen_prob,
)

__all__ = [
    "Convention",
    "EstimatorResult",
    "IncrementLaw",
    "Regime",
    "RunResult",
    "SamplingTarget",
    "ScalingRow",
    "SlopeFit",
    "__version__",
    "clan_prob",
    "estimate_event_prob",
    "estimate_event_prob_reversed",
    "fit_log_slope",
    "no_survivor_prob",
    "reversed_rep_weight",
    "run_experiment",
    "scaling_sweep",
    "sparre_andersen_prob",
]
