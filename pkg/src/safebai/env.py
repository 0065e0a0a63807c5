"""Ground-truth environments: instances, noisy sampling, and safety oracles.

Coordinates are 0-based throughout the package. Each pull chooses a coordinate
``i`` and a scalar value ``a`` and returns a noisy reward/safety observation
pair. Noise is Gaussian with variance ``sigma2`` (independent across pulls and
between the two channels).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np


class InstanceError(ValueError):
    """Raised when instance parameters violate the model assumptions."""


# ---------------------------------------------------------------------------
# Parametric response families (monotonic setting)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResponseFamily:
    """A parametric family of (reward, safety) response function pairs.

    ``f(theta, a)`` is the reward response, nondecreasing with range in [0, 1];
    ``g(mu, a)`` is the safety response, strictly increasing and 1-Lipschitz
    for admissible ``mu``. ``g_inverse`` may be None, in which case a bisection
    fallback is used. ``g_infimum``/``g_supremum`` give the open range of ``g``
    and ``max_g_slope`` is used to reject parameters that break the Lipschitz
    requirement at construction.
    """

    name: str
    f: Callable[[float, float], float]
    g: Callable[[float, float], float]
    g_inverse: Callable[[float, float], float] | None
    max_g_slope: Callable[[float], float]
    g_infimum: Callable[[float], float] | None = None
    g_supremum: Callable[[float], float] | None = None


def _logistic(scale: float, a: float) -> float:
    # 1 / (1 + exp(-scale * a)), computed without overflow on either tail.
    x = scale * a
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _logit(scale: float, x: float) -> float:
    return math.log(x / (1.0 - x)) / scale


LOGISTIC = ResponseFamily(
    name="logistic",
    f=_logistic,
    g=_logistic,
    g_inverse=_logit,
    max_g_slope=lambda mu: mu / 4.0,  # derivative mu*g*(1-g) peaks at g = 1/2
    g_infimum=lambda mu: 0.0,
    g_supremum=lambda mu: 1.0,
)

_FAMILIES: dict[str, ResponseFamily] = {"logistic": LOGISTIC}


def register_family(family: ResponseFamily) -> None:
    """Register a custom response family under its name."""
    _FAMILIES[family.name] = family


def g_range(family: ResponseFamily, mu: float, around: float = 0.0) -> tuple[float, float]:
    """Open range (infimum, supremum) of g for the given parameter.

    Falls back to a bounded search (limits of g at around -/+ 2^k) when the
    family does not supply the range analytically.
    """
    if family.g_infimum is not None and family.g_supremum is not None:
        return family.g_infimum(mu), family.g_supremum(mu)
    lo = min(family.g(mu, around - 2.0 ** k) for k in range(0, 61, 4))
    hi = max(family.g(mu, around + 2.0 ** k) for k in range(0, 61, 4))
    return lo, hi


def get_family(name: str) -> ResponseFamily:
    try:
        return _FAMILIES[name]
    except KeyError:
        raise InstanceError(f"unknown response family {name!r}") from None


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------

def _readonly(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InstanceError(f"{name} must be a non-empty 1-d array")
    if not np.all(np.isfinite(arr)):
        raise InstanceError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LinearInstance:
    """Linear response model: reward slope ``theta``, safety slope ``mu``.

    A pull of coordinate i at value a observes y = a*theta[i] + eta and
    z = a*mu[i] + w. Values are playable in [a0[i], M[i]] and a value is safe
    when a*mu[i] <= gamma.
    """

    theta: np.ndarray
    mu: np.ndarray
    gamma: float
    a0: np.ndarray
    M: np.ndarray
    sigma2: float

    def __post_init__(self):
        object.__setattr__(self, "theta", _readonly(self.theta, "theta"))
        object.__setattr__(self, "mu", _readonly(self.mu, "mu"))
        object.__setattr__(self, "a0", _readonly(self.a0, "a0"))
        object.__setattr__(self, "M", _readonly(self.M, "M"))
        d = self.theta.size
        for name in ("mu", "a0", "M"):
            if getattr(self, name).size != d:
                raise InstanceError(f"{name} length does not match theta")
        if self.gamma <= 0:
            raise InstanceError("gamma must be positive")
        if self.sigma2 < 0:
            raise InstanceError("sigma2 must be nonnegative")
        if np.any(self.theta <= 0) or np.any(self.mu <= 0):
            raise InstanceError("theta and mu must be positive")
        if np.any(self.a0 <= 0):
            raise InstanceError("initial safe values a0 must be positive")
        if np.any(self.a0 > self.M):
            raise InstanceError("a0 must not exceed M")
        if np.any(self.a0 * self.mu > self.gamma):
            raise InstanceError("initial values a0 must be safe (a0*mu <= gamma)")
        _check_unique_optimum([max_safe_value(self, i) for i in range(d)])

    @property
    def d(self) -> int:
        return self.theta.size


@dataclass(frozen=True)
class MonotonicInstance:
    """Monotonic response model with per-coordinate (f_i, g_i) pairs.

    The pairs are drawn from a registered parametric family (default logistic:
    f_i(a) = 1/(1+exp(-theta[i]*a)), g_i(a) = 1/(1+exp(-mu[i]*a))). Queries must
    satisfy g_i(a) <= gamma + eps_safe; plain safety is g_i(a) <= gamma. ``cap``
    is an optional per-coordinate upper limit on playable values; proposed
    values above it are clamped before pulling.
    """

    theta: np.ndarray
    mu: np.ndarray
    gamma: float
    eps_safe: float
    a0: np.ndarray
    sigma2: float
    cap: np.ndarray | None = None
    family: str = "logistic"

    def __post_init__(self):
        object.__setattr__(self, "theta", _readonly(self.theta, "theta"))
        object.__setattr__(self, "mu", _readonly(self.mu, "mu"))
        object.__setattr__(self, "a0", _readonly(self.a0, "a0"))
        if self.cap is not None:
            object.__setattr__(self, "cap", _readonly(self.cap, "cap"))
        fam = get_family(self.family)
        d = self.theta.size
        if self.mu.size != d or self.a0.size != d:
            raise InstanceError("theta, mu, a0 must have equal length")
        if self.cap is not None and self.cap.size != d:
            raise InstanceError("cap length does not match theta")
        if self.gamma <= 0:
            raise InstanceError("gamma must be positive")
        if self.eps_safe <= 0:
            raise InstanceError("eps_safe must be positive")
        if self.sigma2 < 0:
            raise InstanceError("sigma2 must be nonnegative")
        for i in range(d):
            if fam.max_g_slope(self.mu[i]) > 1.0 + 1e-12:
                raise InstanceError(
                    f"g is not 1-Lipschitz for mu[{i}]={self.mu[i]} "
                    f"(max slope {fam.max_g_slope(self.mu[i]):.4g})"
                )
            lo, hi = g_range(fam, self.mu[i], float(self.a0[i]))
            if not (lo < self.gamma and self.gamma + self.eps_safe < hi):
                raise InstanceError(
                    f"[gamma, gamma + eps_safe] outside the range of g for coordinate {i}"
                )
            if fam.g(self.mu[i], self.a0[i]) > self.gamma:
                raise InstanceError(f"a0[{i}] is not safe: g(a0) > gamma")
            if self.cap is not None and self.cap[i] < self.a0[i]:
                raise InstanceError(f"cap[{i}] below a0[{i}]")
        _check_unique_optimum([max_safe_value(self, i) for i in range(d)])

    @property
    def d(self) -> int:
        return self.theta.size

    def f(self, i: int, a: float) -> float:
        return get_family(self.family).f(self.theta[i], a)

    def g(self, i: int, a: float) -> float:
        return get_family(self.family).g(self.mu[i], a)

    def clamp(self, i: int, a: float) -> float:
        """Clamp a proposed value to the playable cap, when one is set."""
        if self.cap is None:
            return a
        return min(a, float(self.cap[i]))


Instance = LinearInstance | MonotonicInstance


def _check_unique_optimum(values: list[float]) -> None:
    order = sorted(range(len(values)), key=lambda i: values[i], reverse=True)
    if len(values) > 1 and values[order[0]] <= values[order[1]]:
        raise InstanceError("the optimal coordinate is not unique")


# ---------------------------------------------------------------------------
# Observations, pulls, and traces
# ---------------------------------------------------------------------------

class Observation(NamedTuple):
    y: float
    z: float


class PullRecord(NamedTuple):
    t: int
    epoch: int
    coordinate: int
    value: float
    y: float
    z: float
    true_safety_level: float
    within_gamma: bool
    within_gamma_plus_eps: bool


@dataclass
class PullTrace:
    """Time-ordered log of every pull made during a run."""

    entries: list[PullRecord] = field(default_factory=list)

    def record(self, epoch: int, coordinate: int, value: float, y: float,
               z: float, level: float, gamma: float, gamma_eps: float) -> None:
        self.entries.append(PullRecord(
            t=len(self.entries) + 1,
            epoch=epoch,
            coordinate=coordinate,
            value=value,
            y=y,
            z=z,
            true_safety_level=level,
            within_gamma=level <= gamma,
            within_gamma_plus_eps=level <= gamma_eps,
        ))

    def __len__(self) -> int:
        return len(self.entries)


def _check_coordinate(inst: Instance, i: int) -> None:
    if not 0 <= i < inst.d:
        raise IndexError(f"coordinate {i} out of range for d={inst.d}")


def pull_linear(inst: LinearInstance, i: int, a: float,
                rng: np.random.Generator) -> Observation:
    """One noisy pull of coordinate i at value a in the linear model."""
    _check_coordinate(inst, i)
    y = a * inst.theta[i]
    z = a * inst.mu[i]
    if inst.sigma2 > 0:
        noise = math.sqrt(inst.sigma2) * rng.standard_normal(2)
        y += noise[0]
        z += noise[1]
    return Observation(float(y), float(z))


def pull_monotonic(inst: MonotonicInstance, i: int, a: float,
                   rng: np.random.Generator) -> Observation:
    """One noisy pull of coordinate i at value a in the monotonic model."""
    _check_coordinate(inst, i)
    y = inst.f(i, a)
    z = inst.g(i, a)
    if inst.sigma2 > 0:
        noise = math.sqrt(inst.sigma2) * rng.standard_normal(2)
        y += noise[0]
        z += noise[1]
    return Observation(float(y), float(z))


def pull_block(inst: Instance, i: int, a: float, n: int,
               rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """n pulls of (i, a) at once; stream-identical to n single pulls."""
    _check_coordinate(inst, i)
    if isinstance(inst, LinearInstance):
        y0, z0 = a * inst.theta[i], a * inst.mu[i]
    else:
        y0, z0 = inst.f(i, a), inst.g(i, a)
    if inst.sigma2 > 0:
        noise = math.sqrt(inst.sigma2) * rng.standard_normal((n, 2))
        return y0 + noise[:, 0], z0 + noise[:, 1]
    return np.full(n, float(y0)), np.full(n, float(z0))


def safety_level(inst: Instance, i: int, a: float) -> float:
    """True safety response at (i, a): a*mu[i] (linear) or g_i(a) (monotonic)."""
    _check_coordinate(inst, i)
    if isinstance(inst, LinearInstance):
        return float(a * inst.mu[i])
    return inst.g(i, a)


def g_inverse(inst: MonotonicInstance, i: int, x: float) -> float:
    """Value a with g_i(a) = x, to absolute tolerance 1e-12.

    Uses the family's closed form when available (logit for the logistic
    family), otherwise bisection. Raises ValueError when x lies outside the
    open range of g_i.
    """
    _check_coordinate(inst, i)
    fam = get_family(inst.family)
    mu = float(inst.mu[i])
    lo, hi = g_range(fam, mu, float(inst.a0[i]))
    if not (lo < x < hi):
        raise ValueError(f"{x} outside the range of g for coordinate {i}")
    if fam.g_inverse is not None:
        return fam.g_inverse(mu, x)
    return _bisect_inverse(lambda a: fam.g(mu, a), x, float(inst.a0[i]))


def _bisect_inverse(g: Callable[[float], float], x: float, start: float) -> float:
    lo = hi = start
    step = 1.0
    for _ in range(200):
        if g(lo) < x:
            break
        lo -= step
        step *= 2.0
    step = 1.0
    for _ in range(200):
        if g(hi) > x:
            break
        hi += step
        step *= 2.0
    if not (g(lo) < x < g(hi)):
        raise ValueError("failed to bracket the inverse")
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if g(mid) < x:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def max_safe_value(inst: Instance, i: int) -> float:
    """Largest safely achievable reward for coordinate i.

    Linear: min(gamma*theta[i]/mu[i], theta[i]*M[i]). Monotonic:
    f_i(g_i^{-1}(gamma)).
    """
    _check_coordinate(inst, i)
    if isinstance(inst, LinearInstance):
        return float(min(inst.gamma * inst.theta[i] / inst.mu[i],
                         inst.theta[i] * inst.M[i]))
    return inst.f(i, g_inverse(inst, i, inst.gamma))


def i_star(inst: Instance) -> int:
    """Index of the unique optimal coordinate."""
    values = [max_safe_value(inst, i) for i in range(inst.d)]
    return int(np.argmax(values))


# ---------------------------------------------------------------------------
# Seeding and instance files
# ---------------------------------------------------------------------------

def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Independent stream for one trial, a pure function of (seed, index)."""
    return np.random.default_rng([master_seed, trial_index])


def instance_to_dict(inst: Instance) -> dict:
    if isinstance(inst, LinearInstance):
        return {
            "model": "linear",
            "theta": inst.theta.tolist(),
            "mu": inst.mu.tolist(),
            "gamma": inst.gamma,
            "a0": inst.a0.tolist(),
            "M": inst.M.tolist(),
            "sigma2": inst.sigma2,
        }
    out = {
        "model": inst.family,
        "theta": inst.theta.tolist(),
        "mu": inst.mu.tolist(),
        "gamma": inst.gamma,
        "eps_safe": inst.eps_safe,
        "a0": inst.a0.tolist(),
        "sigma2": inst.sigma2,
    }
    if inst.cap is not None:
        out["M"] = inst.cap.tolist()
    return out


def instance_from_dict(data: dict) -> Instance:
    """Build an instance from the JSON document schema.

    Keys: model ("linear" or a monotonic family name such as "logistic"),
    theta, mu, gamma, eps_safe (monotonic), a0, M (required linear bound;
    optional monotonic cap), sigma2.
    """
    model = data.get("model")
    try:
        if model == "linear":
            return LinearInstance(
                theta=data["theta"], mu=data["mu"], gamma=float(data["gamma"]),
                a0=data["a0"], M=data["M"], sigma2=float(data["sigma2"]),
            )
        if model in _FAMILIES:
            return MonotonicInstance(
                theta=data["theta"], mu=data["mu"], gamma=float(data["gamma"]),
                eps_safe=float(data["eps_safe"]), a0=data["a0"],
                sigma2=float(data["sigma2"]),
                cap=data.get("M"), family=model,
            )
    except KeyError as exc:
        raise InstanceError(f"instance document missing key {exc}") from None
    raise InstanceError(f"unknown model {model!r}")


def load_instance(path: str | Path) -> Instance:
    with open(path) as fh:
        return instance_from_dict(json.load(fh))
