"""Epoch-based safe elimination for the linear response model.

Each epoch halves the tolerance eps = 2^-ell, re-estimates both slopes of
every active coordinate from fresh pulls at its largest verifiably safe
value, updates the verified-safe and verified-unsafe values, and eliminates
coordinates whose optimistic value falls below the best pessimistic one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .env import LinearInstance, PullTrace, pull_block
from .results import EliminationError, EstimateSnapshot, RunResult, simple_regret

DEFAULT_MAX_EPOCH = 40


@dataclass
class LinearState:
    """Per-epoch bookkeeping for the elimination loop.

    ``prev_a_safe`` holds the values that were actually pulled this epoch
    (last epoch's safe values); the elimination bounds divide eps by these.
    """

    ell: int
    eps: float
    active: list[int]
    a_safe: dict[int, float]
    a_unsafe: dict[int, float]
    theta_hat: dict[int, float] = field(default_factory=dict)
    mu_hat: dict[int, float] = field(default_factory=dict)
    prev_a_safe: dict[int, float] = field(default_factory=dict)


def n_samples_linear(ell: int, d: int, delta: float, sigma2: float) -> int:
    """Per-coordinate sample count for epoch ell, floored at 1."""
    if not 0 < delta < 1:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if ell < 1:
        raise ValueError(f"epoch must be >= 1, got {ell}")
    n = 2.0 * sigma2 * math.log(8.0 * d * ell * ell / delta) * 4.0 ** ell
    return max(1, math.ceil(n))


def estimate_slopes(inst: LinearInstance, i: int, a_prev: float, n: int,
                    rng: np.random.Generator, *, epoch: int = 0,
                    trace: PullTrace | None = None) -> tuple[float, float]:
    """Estimate (theta[i], mu[i]) from n pulls at a_prev.

    Returns (mean(y)/a_prev, mean(z)/a_prev). All n pulls are appended to the
    trace when one is supplied.
    """
    if a_prev <= 0:
        raise AssertionError("pull value must be positive")
    ys, zs = pull_block(inst, i, a_prev, n, rng)
    if trace is not None:
        level = float(a_prev * inst.mu[i])
        for y, z in zip(ys, zs):
            trace.record(epoch, i, a_prev, float(y), float(z), level,
                         inst.gamma, inst.gamma)
    return float(ys.mean() / a_prev), float(zs.mean() / a_prev)


def update_safe_value(mu_hat: float, eps: float, a_prev: float, gamma: float,
                      a0_i: float, M_i: float) -> float:
    """Largest value still verifiably safe given the new slope estimate."""
    denom = mu_hat + eps / a_prev
    if denom <= 0:
        return M_i
    return min(max(gamma / denom, a0_i), M_i)


def update_unsafe_value(mu_hat: float, eps: float, a_prev: float,
                        gamma: float, M_i: float) -> float:
    """Smallest value verifiably unsafe; M_i when nothing can be certified."""
    denom = mu_hat - eps / a_prev
    if denom <= 0:
        return M_i
    return min(gamma / denom, M_i)


def eliminate_linear(state: LinearState) -> list[int]:
    """Keep coordinates whose upper value bound reaches the best lower bound."""
    lower = {
        j: state.a_safe[j] * (state.theta_hat[j] - state.eps / state.prev_a_safe[j])
        for j in state.active
    }
    upper = {
        i: state.a_unsafe[i] * (state.theta_hat[i] + state.eps / state.prev_a_safe[i])
        for i in state.active
    }
    threshold = max(lower.values())
    survivors = [i for i in state.active if upper[i] >= threshold]
    if not survivors:
        raise EliminationError("elimination emptied the active set")
    return survivors


def run_linear(inst: LinearInstance, delta: float, rng: np.random.Generator,
               *, max_epoch: int = DEFAULT_MAX_EPOCH, record_trace: bool = False,
               record_regret: bool = True, seed: int | None = None) -> RunResult:
    """Run the full elimination loop until one coordinate remains.

    Hitting ``max_epoch`` with more than one active coordinate flags the
    result inconclusive (identified is then the current best estimate).
    """
    if max_epoch < 1:
        raise ValueError("max_epoch must be >= 1")
    d = inst.d
    active = list(range(d))
    state = LinearState(
        ell=1, eps=0.5, active=active,
        a_safe={i: float(inst.a0[i]) for i in range(d)},
        a_unsafe={i: float(inst.M[i]) for i in range(d)},
    )
    trace = PullTrace() if record_trace else None
    per_epoch_pulls: list[int] = []
    regret_samples: list[tuple[int, float]] = []
    elimination_epochs: dict[int, int] = {}
    unsafe_gamma = 0
    total = 0

    forced_stop = False
    while len(state.active) > 1 and state.ell <= max_epoch:
        ell = state.ell
        state.eps = 2.0 ** -ell
        n = n_samples_linear(ell, d, delta, inst.sigma2)
        state.prev_a_safe = {i: state.a_safe[i] for i in state.active}
        epoch_pulls = 0
        for i in state.active:
            a_prev = state.prev_a_safe[i]
            th, mh = estimate_slopes(inst, i, a_prev, n, rng, epoch=ell,
                                     trace=trace)
            total += n
            epoch_pulls += n
            if a_prev * inst.mu[i] > inst.gamma:
                unsafe_gamma += n
            state.theta_hat[i] = th
            state.mu_hat[i] = mh
            if a_prev < inst.M[i]:
                state.a_safe[i] = update_safe_value(
                    mh, state.eps, a_prev, inst.gamma,
                    float(inst.a0[i]), float(inst.M[i]))
                state.a_unsafe[i] = update_unsafe_value(
                    mh, state.eps, a_prev, inst.gamma, float(inst.M[i]))
            else:
                state.a_safe[i] = float(inst.M[i])
                state.a_unsafe[i] = float(inst.M[i])
            if record_regret and all(j in state.theta_hat for j in state.active):
                snap = _snapshot(state)
                regret_samples.append((total, simple_regret(inst, snap)))
        try:
            survivors = eliminate_linear(state)
        except EliminationError:
            # All bounds crossed at once, which only happens off the clean
            # event; stop and report the run as inconclusive.
            per_epoch_pulls.append(epoch_pulls)
            forced_stop = True
            break
        for i in state.active:
            if i not in survivors:
                elimination_epochs[i] = ell
        state.active = survivors
        per_epoch_pulls.append(epoch_pulls)
        state.ell += 1

    epochs = len(per_epoch_pulls)
    inconclusive = forced_stop or len(state.active) > 1
    if inconclusive:
        identified = _snapshot(state).best()
    else:
        identified = state.active[0]
    return RunResult(
        identified=identified,
        inconclusive=inconclusive,
        total_pulls=total,
        per_epoch_pulls=per_epoch_pulls,
        unsafe_pulls_gamma=unsafe_gamma,
        unsafe_pulls_gamma_eps=0,
        unsafe_safe_side_pulls_gamma=0,
        regret_samples=regret_samples,
        epochs=epochs,
        seed=seed,
        elimination_epochs=elimination_epochs,
        trace=trace,
    )


def _snapshot(state: LinearState) -> EstimateSnapshot:
    return EstimateSnapshot(
        scores={j: state.theta_hat[j] * state.a_safe[j] for j in state.active},
        a_safe={j: state.a_safe[j] for j in state.active},
    )
