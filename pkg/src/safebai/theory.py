"""Closed-form evaluation of the analytic quantities behind both algorithms.

Everything here is a pure function of the instance: gaps, the information-
theoretic lower bound on expected pulls (linear), the growth function xi and
the Phi/Psi machinery that predicts per-coordinate elimination epochs and the
resulting sample-complexity upper bound, and the monotonic-side bounds
(n_bar, m_bar, a_u_bar, ell_bar, and the crossing-epoch bound).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .env import (
    Instance,
    LinearInstance,
    MonotonicInstance,
    g_inverse,
    get_family,
    g_range,
    i_star,
    max_safe_value,
)
from .monotonic import n_samples_monotonic

ELL_BAR_SCAN_CAP = 60


# ---------------------------------------------------------------------------
# Gaps and the lower bound
# ---------------------------------------------------------------------------

def gap_linear(inst: LinearInstance, i: int) -> float:
    """Optimality gap of coordinate i; exactly 0 at the optimum."""
    star = i_star(inst)
    if i == star:
        return 0.0
    return max_safe_value(inst, star) - max_safe_value(inst, i)


def gap_monotonic(inst: MonotonicInstance, i: int) -> float:
    """Gap in maximum safe reward, f_star(g_star^-1(gamma)) - f_i(g_i^-1(gamma))."""
    star = i_star(inst)
    if i == star:
        return 0.0
    return max_safe_value(inst, star) - max_safe_value(inst, i)


def gaps(inst: Instance) -> list[float]:
    if isinstance(inst, LinearInstance):
        return [gap_linear(inst, i) for i in range(inst.d)]
    return [gap_monotonic(inst, i) for i in range(inst.d)]


def is_saturated(inst: LinearInstance, i: int) -> bool:
    """Whether the maximum playable value is itself safe (boundary included)."""
    return inst.M[i] * inst.mu[i] <= inst.gamma


def lower_bound_details(inst: LinearInstance, delta: float) -> tuple[float, bool, bool]:
    """(value, degenerate_delta, heuristic) for the expected-pulls lower bound.

    The bound is exact in the all-unsaturated regime (M = infinity); with any
    saturated coordinate it is still evaluated but flagged heuristic. When
    delta >= 1/2.4 the log factor is nonpositive and the value degenerates
    to 0.
    """
    star = i_star(inst)
    log_term = math.log(1.0 / (2.4 * delta))
    heuristic = any(is_saturated(inst, i) for i in range(inst.d))
    if log_term <= 0:
        return 0.0, True, heuristic
    ratio_star = (inst.theta[star] / inst.mu[star]) ** 2
    total = 0.0
    for i in range(inst.d):
        if i == star:
            continue
        delta_i = gap_linear(inst, i)
        total += (1.0 + ratio_star + (inst.theta[i] / inst.mu[i]) ** 2) / delta_i ** 2
    return (2.0 / 3.0) * log_term * total, False, heuristic


def lower_bound(inst: LinearInstance, delta: float) -> float:
    """Expected-pulls lower bound; warns and returns 0 when delta >= 1/2.4."""
    value, degenerate, _ = lower_bound_details(inst, delta)
    if degenerate:
        warnings.warn("delta >= 1/2.4 makes the lower bound vacuous; returning 0",
                      RuntimeWarning, stacklevel=2)
    return value


# ---------------------------------------------------------------------------
# Growth function and epoch predictions (linear)
# ---------------------------------------------------------------------------

def xi(a: float, x: float) -> float:
    """Sub-polynomial growth function 2^(a * sqrt(log2(max(x, 2))))."""
    if a <= 0:
        raise ValueError("xi requires a > 0")
    return 2.0 ** (a * math.sqrt(math.log2(max(x, 2.0))))


def c_gamma(gamma: float) -> float:
    return xi(math.sqrt(32.0), 2.0 * gamma)


def phi(inst: LinearInstance, i: int, alpha: float) -> float:
    """Epoch threshold after which a_safe(i) is within a (1+alpha) factor of
    the boundary value gamma/mu_i. Infinite for alpha <= 0."""
    return phi_terms(inst.gamma, float(inst.a0[i] * inst.mu[i]), alpha)


def phi_terms(gamma: float, a0mu: float, alpha: float) -> float:
    if alpha <= 0:
        return math.inf
    terms = [8.0]
    arg = 2.0 * gamma / alpha
    if arg > 1.0:
        terms.append(math.sqrt(8.0 * math.log2(arg)))
    arg = 2.0 * gamma / (a0mu * alpha)
    if arg > 1.0:
        terms.append(math.sqrt(4.0 * math.log2(arg)))
    terms.append(4.0 * math.log2(math.sqrt(2.0) / gamma))
    lead = math.log2(4.0 / (gamma * alpha))
    if lead > 0.0:
        terms.append(lead + 2.0 * math.log2(lead))
    return max(terms)


def psi1(inst: LinearInstance, i: int, x: float) -> float:
    if x <= 0:
        return math.inf
    star = i_star(inst)
    ratios = 2.0 + inst.theta[star] / inst.mu[star] + inst.theta[i] / inst.mu[i]
    return math.log2(4.0 * ratios / x)


def psi2(gamma: float, m_j: float, theta_j: float, x: float) -> float:
    if x <= 0:
        return math.inf
    return max(math.log2(4.0 * (2.0 + m_j * theta_j / gamma) / x),
               math.log2(4.0 / gamma))


def psi3(x: float) -> float:
    if x <= 0:
        return math.inf
    return math.log2(4.0 / x)


def alpha_of(inst: LinearInstance, i: int) -> float:
    """Saturation margin gamma/(mu_i * M_i) - 1 (nonnegative iff saturated)."""
    return float(inst.gamma / (inst.mu[i] * inst.M[i]) - 1.0)


@dataclass(frozen=True)
class CaseInfo:
    case: int
    alpha_i: float | None
    alpha_star: float | None


def classify_case(inst: LinearInstance, i: int) -> CaseInfo:
    """Case 1-4 from the (i saturated?, optimum saturated?) membership tests.

    The boundary M*mu = gamma counts as saturated. The corresponding alpha
    values are reported only for saturated coordinates.
    """
    star = i_star(inst)
    if i == star:
        raise ValueError("case classification applies to suboptimal coordinates")
    sat_i = is_saturated(inst, i)
    sat_star = is_saturated(inst, star)
    case = {(False, False): 1, (True, False): 2,
            (False, True): 3, (True, True): 4}[(sat_i, sat_star)]
    return CaseInfo(
        case=case,
        alpha_i=alpha_of(inst, i) if sat_i else None,
        alpha_star=alpha_of(inst, star) if sat_star else None,
    )


def predicted_elimination_epoch(inst: LinearInstance, i: int) -> int:
    """Smallest integer epoch satisfying one sufficient elimination condition
    for the case coordinate i falls in."""
    star = i_star(inst)
    info = classify_case(inst, i)
    delta_i = gap_linear(inst, i)
    gamma = inst.gamma
    ratio_diff = float(gamma * inst.theta[star] / inst.mu[star]
                       - gamma * inst.theta[i] / inst.mu[i])
    unsaturated_pair = max(psi1(inst, i, ratio_diff), phi(inst, i, 1.0),
                           phi(inst, star, 1.0))
    if info.case == 1:
        conditions = [max(psi1(inst, i, delta_i), phi(inst, i, 1.0),
                          phi(inst, star, 1.0))]
    elif info.case == 2:
        conditions = [
            max(psi2(gamma, float(inst.M[i]), float(inst.theta[i]), delta_i),
                phi(inst, i, info.alpha_i), phi(inst, star, 1.0)),
            unsaturated_pair,
        ]
    elif info.case == 3:
        conditions = [
            max(psi2(gamma, float(inst.M[star]), float(inst.theta[star]), delta_i),
                phi(inst, i, 1.0), phi(inst, star, info.alpha_star)),
            unsaturated_pair,
        ]
    else:
        conditions = [
            max(psi3(delta_i), phi(inst, i, info.alpha_i),
                phi(inst, star, info.alpha_star)),
            unsaturated_pair,
            max(psi2(gamma, float(inst.M[i]), float(inst.theta[i]),
                     float(gamma * inst.theta[star] / inst.mu[star]
                           - inst.M[i] * inst.theta[i])),
                phi(inst, i, info.alpha_i), phi(inst, star, 1.0)),
            max(psi2(gamma, float(inst.M[star]), float(inst.theta[star]),
                     float(inst.M[star] * inst.theta[star]
                           - gamma * inst.theta[i] / inst.mu[i])),
                phi(inst, i, 1.0), phi(inst, star, info.alpha_star)),
        ]
    best = min(conditions)
    if math.isinf(best):
        raise ArithmeticError(f"no finite elimination epoch for coordinate {i}")
    return max(1, math.ceil(best))


def sample_complexity_upper_linear(inst: LinearInstance, delta: float,
                                   epochs: dict[int, int] | None = None) -> float:
    """Deterministic upper bound on total pulls from per-arm epoch bounds.

    ``epochs`` overrides the predicted elimination epochs (an entry of 0
    contributes nothing). Per suboptimal arm the bound is
    8*sigma2*ln(8*d*L^2/delta)*4^L + 2*L.
    """
    star = i_star(inst)
    total = 0.0
    for i in range(inst.d):
        if i == star:
            continue
        L = (epochs[i] if epochs is not None
             else predicted_elimination_epoch(inst, i))
        if L <= 0:
            continue
        total += (8.0 * inst.sigma2 * math.log(8.0 * inst.d * L * L / delta)
                  * 4.0 ** L + 2.0 * L)
    return total


# ---------------------------------------------------------------------------
# Monotonic-side bounds
# ---------------------------------------------------------------------------

def g_tilde_inverse(inst: MonotonicInstance, i: int, x: float) -> float:
    """Inverse of g_i extended outside its usable range: clamps to a0 below
    the range infimum and to g^-1(gamma + eps_safe) above the relaxed
    threshold."""
    fam = get_family(inst.family)
    lo, _ = g_range(fam, float(inst.mu[i]), float(inst.a0[i]))
    if x <= lo:
        return float(inst.a0[i])
    if x > inst.gamma + inst.eps_safe:
        return g_inverse(inst, i, inst.gamma + inst.eps_safe)
    return g_inverse(inst, i, x)


def n_bar(inst: MonotonicInstance, i: int, ell: int) -> float:
    """Bound on safe-climb iterations in epoch ell."""
    eps = 2.0 ** -ell
    if ell == 1:
        return 2.0 * (g_tilde_inverse(inst, i, inst.gamma - 0.5) - float(inst.a0[i]))
    return (g_tilde_inverse(inst, i, inst.gamma - eps)
            - g_tilde_inverse(inst, i, inst.gamma - 6.0 * eps)) / eps


def m_bar(inst: MonotonicInstance, i: int, ell: int) -> float:
    """Bound on pre-crossing unsafe-climb iterations in epoch ell."""
    eps = 2.0 ** -ell
    relaxed = inst.gamma + inst.eps_safe
    if ell == 1:
        return 2.0 * (g_tilde_inverse(inst, i, relaxed - 0.5) - float(inst.a0[i]))
    return (g_tilde_inverse(inst, i, relaxed - eps)
            - g_tilde_inverse(inst, i, relaxed - 6.0 * eps)) / eps


def a_u_bar(inst: MonotonicInstance, i: int, ell: int) -> float:
    """Deterministic upper bound on the unsafe value after epoch ell (valid
    once the crossing flag is set)."""
    total = 0.0
    for s in range(1, ell + 1):
        arg = min(inst.gamma + 2.0 ** (1 - s), inst.gamma + inst.eps_safe)
        total += g_inverse(inst, i, arg) / 2.0 ** (ell - s + 1)
    tail = (ell + 4.0 * g_inverse(inst, i, inst.gamma + inst.eps_safe)
            / inst.eps_safe) * 2.0 ** -ell
    return total + tail


def ell_hat_unsafe_bound(eps_safe: float) -> int:
    """Epoch by which the crossing flag must be set on the clean event."""
    return math.ceil(math.log2(8.0 / eps_safe))


def ell_bar(inst: MonotonicInstance, i: int,
            cap: int = ELL_BAR_SCAN_CAP) -> int | None:
    """First epoch at which coordinate i is provably eliminated, scanning up
    to ``cap``; None when no feasible epoch is found (flagged unbounded)."""
    star = i_star(inst)
    if i == star:
        raise ValueError("ell_bar applies to suboptimal coordinates")
    for ell in range(1, cap + 1):
        eps = 2.0 ** -ell
        lhs = inst.f(i, a_u_bar(inst, i, ell)) + 4.0 * eps
        rhs = inst.f(star, g_tilde_inverse(inst, star, inst.gamma - 3.0 * eps))
        if lhs <= rhs:
            return ell
    return None


@dataclass
class MonotonicBounds:
    """Evaluated monotonic-side bound quantities for one instance."""

    ell_bars: list[int | None]          # per coordinate; max rule at i_star
    ell_hat_unsafe: int
    predicted_samples: float            # inf when any ell_bar is unbounded
    t_bar: int

    n_bar: dict[tuple[int, int], float] = field(default_factory=dict)
    m_bar: dict[tuple[int, int], float] = field(default_factory=dict)
    a_u_bar: dict[tuple[int, int], float] = field(default_factory=dict)


def monotonic_bounds(inst: MonotonicInstance, delta: float,
                     cap: int = ELL_BAR_SCAN_CAP) -> MonotonicBounds:
    """Evaluate ell_bar per coordinate and the total-sample upper bound.

    The optimum's ell_bar is the max over the suboptimal ones. Per-epoch
    tables of n_bar/m_bar/a_u_bar are filled up to each coordinate's ell_bar.
    """
    star = i_star(inst)
    ells: list[int | None] = [None] * inst.d
    for i in range(inst.d):
        if i != star:
            ells[i] = ell_bar(inst, i, cap)
    sub = [e for i, e in enumerate(ells) if i != star]
    ells[star] = None if any(e is None for e in sub) else max(sub) if sub else 1

    bounds = MonotonicBounds(ell_bars=ells,
                             ell_hat_unsafe=ell_hat_unsafe_bound(inst.eps_safe),
                             predicted_samples=math.inf, t_bar=1)
    if any(e is None for e in ells):
        return bounds

    for i in range(inst.d):
        for ell in range(1, ells[i] + 1):
            bounds.n_bar[(i, ell)] = n_bar(inst, i, ell)
            bounds.m_bar[(i, ell)] = m_bar(inst, i, ell)
            bounds.a_u_bar[(i, ell)] = a_u_bar(inst, i, ell)

    t_bar = 0.0
    for i in range(inst.d):
        for ell in range(1, ells[i] + 1):
            t_bar += (bounds.m_bar[(i, ell)] + bounds.n_bar[(i, ell)] + ell + 2)
    bounds.t_bar = max(1, math.ceil(t_bar))

    k = bounds.ell_hat_unsafe
    total = 0.0
    for i in range(inst.d):
        for ell in range(1, k + 1):
            n_l = n_samples_monotonic(ell, bounds.t_bar, delta, inst.sigma2)
            total += (m_bar(inst, i, ell) + n_bar(inst, i, ell) + ell + 2) * n_l
        for ell in range(k + 1, ells[i] + 1):
            n_l = n_samples_monotonic(ell, bounds.t_bar, delta, inst.sigma2)
            total += (n_bar(inst, i, ell) + ell + 2) * n_l
    bounds.predicted_samples = total
    return bounds


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

@dataclass
class TheoryReport:
    model: str
    d: int
    i_star: int
    gaps: list[float]
    cases: list[int | None]
    lower_bound: float | None
    lower_bound_degenerate: bool
    lower_bound_heuristic: bool
    predicted_epochs: list[int | None]
    predicted_samples: float | None
    constants: dict

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        ps = out["predicted_samples"]
        if ps is not None and math.isinf(ps):
            out["predicted_samples"] = None
            out["predicted_samples_unbounded"] = True
        return out


def theory_report(inst: Instance, delta: float,
                  lipschitz_inverse: float | None = None) -> TheoryReport:
    """Evaluate every analytic quantity for the given instance."""
    star = i_star(inst)
    if isinstance(inst, LinearInstance):
        lb, degenerate, heuristic = lower_bound_details(inst, delta)
        cases: list[int | None] = [None] * inst.d
        alphas: list[float | None] = [None] * inst.d
        epochs: list[int | None] = [None] * inst.d
        for i in range(inst.d):
            if i == star:
                if is_saturated(inst, i):
                    alphas[i] = alpha_of(inst, i)
                continue
            info = classify_case(inst, i)
            cases[i] = info.case
            alphas[i] = info.alpha_i
            epochs[i] = predicted_elimination_epoch(inst, i)
        return TheoryReport(
            model="linear", d=inst.d, i_star=star, gaps=gaps(inst),
            cases=cases, lower_bound=lb, lower_bound_degenerate=degenerate,
            lower_bound_heuristic=heuristic, predicted_epochs=epochs,
            predicted_samples=sample_complexity_upper_linear(inst, delta),
            constants={"C_gamma": c_gamma(inst.gamma), "alpha": alphas,
                       "L": lipschitz_inverse},
        )
    bounds = monotonic_bounds(inst, delta)
    return TheoryReport(
        model=inst.family, d=inst.d, i_star=star, gaps=gaps(inst),
        cases=[None] * inst.d, lower_bound=None, lower_bound_degenerate=False,
        lower_bound_heuristic=False, predicted_epochs=bounds.ell_bars,
        predicted_samples=bounds.predicted_samples,
        constants={"C_gamma": c_gamma(inst.gamma), "alpha": [None] * inst.d,
                   "L": lipschitz_inverse,
                   "ell_hat_unsafe_bound": bounds.ell_hat_unsafe},
    )
