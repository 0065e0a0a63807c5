"""Run outputs shared by both algorithms and the trial harness."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .env import (
    Instance,
    LinearInstance,
    PullTrace,
    i_star,
    max_safe_value,
)


class EliminationError(AssertionError):
    """The elimination step emptied the active set (a bad-event artifact)."""


@dataclass
class RunResult:
    """Outcome of a single algorithm run.

    ``identified`` is the returned coordinate; when the epoch limit was hit
    before the active set shrank to one, ``inconclusive`` is True and
    ``identified`` holds the current best estimate. ``regret_samples`` is a
    list of (cumulative pulls, simple regret) pairs. ``elimination_epochs``
    maps each eliminated coordinate to the epoch at whose end it was removed.
    The two ``unsafe_pulls_*`` counters are ground-truth audits; the
    ``gamma_eps`` and ``safe_side`` ones are meaningful for monotonic runs
    only. ``total_pulls`` always equals the trace length when a trace was
    recorded.
    """

    identified: int
    inconclusive: bool
    total_pulls: int
    per_epoch_pulls: list[int]
    unsafe_pulls_gamma: int
    unsafe_pulls_gamma_eps: int
    unsafe_safe_side_pulls_gamma: int
    regret_samples: list[tuple[int, float]]
    epochs: int
    seed: int | None = None
    elimination_epochs: dict[int, int] = field(default_factory=dict)
    trace: PullTrace | None = None


@dataclass
class EstimateSnapshot:
    """Current estimates for every active coordinate, taken mid-run.

    ``scores`` holds the algorithm's estimated maximum safe reward per active
    coordinate (theta_hat * a_safe in the linear model, f_hat(a_safe) in the
    monotonic one); ``a_safe`` the current largest verifiably safe values.
    Eliminated coordinates must not appear.
    """

    scores: dict[int, float]
    a_safe: dict[int, float]

    def best(self) -> int:
        # Ties break toward the lowest index.
        best_i, best_v = None, -np.inf
        for i in sorted(self.scores):
            if self.scores[i] > best_v:
                best_i, best_v = i, self.scores[i]
        return best_i


def true_value_at(inst: Instance, i: int, a: float) -> float:
    """Ground-truth reward of coordinate i played at value a."""
    if isinstance(inst, LinearInstance):
        return float(inst.theta[i] * a)
    return inst.f(i, a)


def simple_regret(inst: Instance, snapshot: EstimateSnapshot) -> float:
    """True optimum value minus the true value of the estimated-best arm.

    The chosen arm is the argmax of the snapshot scores; its value is
    evaluated with the true instance parameters at its current safe value,
    against the true maximum safe value of the optimal coordinate.
    """
    opt = max_safe_value(inst, i_star(inst))
    chosen = snapshot.best()
    return opt - true_value_at(inst, chosen, snapshot.a_safe[chosen])
