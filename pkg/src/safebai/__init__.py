"""Safe best-arm identification: simulators, algorithms, and analytic bounds."""

from .env import (
    Instance,
    InstanceError,
    LinearInstance,
    MonotonicInstance,
    Observation,
    PullTrace,
    ResponseFamily,
    g_inverse,
    i_star,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    max_safe_value,
    pull_linear,
    pull_monotonic,
    register_family,
    safety_level,
    trial_rng,
)
from .harness import Aggregate, run_trials
from .linear import run_linear
from .monotonic import run_monotonic
from .results import EstimateSnapshot, RunResult, simple_regret
from .theory import theory_report

__all__ = [
    "Aggregate",
    "EstimateSnapshot",
    "Instance",
    "InstanceError",
    "LinearInstance",
    "MonotonicInstance",
    "Observation",
    "PullTrace",
    "ResponseFamily",
    "RunResult",
    "g_inverse",
    "i_star",
    "instance_from_dict",
    "instance_to_dict",
    "load_instance",
    "max_safe_value",
    "pull_linear",
    "pull_monotonic",
    "register_family",
    "run_linear",
    "run_monotonic",
    "run_trials",
    "safety_level",
    "simple_regret",
    "theory_report",
    "trial_rng",
]
