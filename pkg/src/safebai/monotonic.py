"""Epoch-based safe elimination for monotonic response models.

Within each epoch the algorithm climbs the verified-safe value of every
active coordinate toward the safety boundary, then either climbs its probe
value toward the relaxed threshold gamma + eps_safe (until a crossing of
gamma is certified) or, once a crossing is known, binary-searches the probe
back down toward the boundary. A coordinate is eliminated only after its
crossing gives a trustworthy upper bound on its achievable reward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .env import MonotonicInstance, PullTrace, g_inverse, pull_block
from .results import EliminationError, EstimateSnapshot, RunResult, simple_regret

DEFAULT_MAX_EPOCH = 40
DEFAULT_MAX_PULLS = 10 ** 6


class GuardExceeded(Exception):
    """An inner loop or the pull budget exceeded its guard; run is flagged."""


@dataclass
class MonotonicState:
    ell: int
    t: int
    active: list[int]
    a_safe: dict[int, float]
    a_unsafe: dict[int, float]
    unsafe_flag: dict[int, int]
    f_hat_safe: dict[int, float] = field(default_factory=dict)
    g_hat_safe: dict[int, float] = field(default_factory=dict)
    f_hat_unsafe: dict[int, float] = field(default_factory=dict)
    g_hat_unsafe: dict[int, float] = field(default_factory=dict)
    n: dict[int, int] = field(default_factory=dict)
    m: dict[int, int] = field(default_factory=dict)

    @property
    def eps(self) -> float:
        return 2.0 ** -self.ell


def n_samples_monotonic(ell: int, t: int, delta: float, sigma2: float,
                        simplified: bool = False) -> int:
    """Sample count for one estimate call, floored at 1.

    ``simplified`` switches to the fixed-log experimental variant, replacing
    the 8 t^2 factor by 8^2.
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if ell < 1 or t < 1:
        raise ValueError("epoch and estimate counter must be >= 1")
    factor = 64.0 if simplified else 8.0 * t * t
    n = 2.0 * sigma2 * math.log(factor / delta) * 4.0 ** ell
    return max(1, math.ceil(n))


def estimate(inst: MonotonicInstance, i: int, a: float, n: int,
             rng: np.random.Generator, *, epoch: int = 0,
             trace: PullTrace | None = None) -> tuple[float, float]:
    """Sample means of n pulls at (i, a); logs every pull when tracing."""
    ys, zs = pull_block(inst, i, a, n, rng)
    if trace is not None:
        level = inst.g(i, a)
        for y, z in zip(ys, zs):
            trace.record(epoch, i, a, float(y), float(z), level,
                         inst.gamma, inst.gamma + inst.eps_safe)
    return float(ys.mean()), float(zs.mean())


class MonotonicRun:
    """One run of the monotonic elimination algorithm.

    Construct, then call :meth:`run`. The inner-loop methods are exposed for
    direct testing against the pseudocode recursion.
    """

    def __init__(self, inst: MonotonicInstance, delta: float,
                 rng: np.random.Generator, *, max_epoch: int = DEFAULT_MAX_EPOCH,
                 simplified_n: bool = False, record_trace: bool = False,
                 record_regret: bool = True, seed: int | None = None,
                 max_pulls: int = DEFAULT_MAX_PULLS):
        if max_epoch < 1:
            raise ValueError("max_epoch must be >= 1")
        self.inst = inst
        self.delta = delta
        self.rng = rng
        self.max_epoch = max_epoch
        self.simplified_n = simplified_n
        self.seed = seed
        self.max_pulls = max_pulls
        self.trace = PullTrace() if record_trace else None
        self.record_regret = record_regret

        d = inst.d
        self.state = MonotonicState(
            ell=1, t=1, active=list(range(d)),
            a_safe={i: float(inst.a0[i]) for i in range(d)},
            a_unsafe={i: float(inst.a0[i]) for i in range(d)},
            unsafe_flag={i: 0 for i in range(d)},
            n={i: 1 for i in range(d)},
            m={i: 1 for i in range(d)},
        )
        # Reachable value span per coordinate, used to size the loop guards.
        self._span = [
            max(1.0, g_inverse(inst, i, inst.gamma + inst.eps_safe) - float(inst.a0[i]))
            for i in range(d)
        ]
        self.total_pulls = 0
        self.per_epoch_pulls: list[int] = []
        self._epoch_pulls = 0
        self.unsafe_gamma = 0
        self.unsafe_gamma_eps = 0
        self.unsafe_safe_side_gamma = 0
        self.regret_samples: list[tuple[int, float]] = []
        self.elimination_epochs: dict[int, int] = {}

    # -- sampling -----------------------------------------------------------

    def n_samples(self) -> int:
        return n_samples_monotonic(self.state.ell, self.state.t, self.delta,
                                   self.inst.sigma2, self.simplified_n)

    def estimate_at(self, i: int, a: float, side: str) -> None:
        """One Estimate call: pull, update the latest (f_hat, g_hat) for the
        given side, advance the global t counter, and audit safety."""
        st = self.state
        n = self.n_samples()
        f_hat, g_hat = estimate(self.inst, i, a, n, self.rng,
                                epoch=st.ell, trace=self.trace)
        st.t += 1
        self.total_pulls += n
        self._epoch_pulls += n
        if self.total_pulls > self.max_pulls:
            raise GuardExceeded("pull budget exhausted")
        level = self.inst.g(i, a)
        if level > self.inst.gamma:
            self.unsafe_gamma += n
            if side == "safe":
                self.unsafe_safe_side_gamma += n
        if level > self.inst.gamma + self.inst.eps_safe:
            self.unsafe_gamma_eps += n
        if side == "safe":
            st.f_hat_safe[i], st.g_hat_safe[i] = f_hat, g_hat
        else:
            st.f_hat_unsafe[i], st.g_hat_unsafe[i] = f_hat, g_hat
        self._maybe_record_regret()

    def _maybe_record_regret(self) -> None:
        st = self.state
        if not self.record_regret:
            return
        if not all(j in st.f_hat_safe for j in st.active):
            return
        snap = EstimateSnapshot(
            scores={j: st.f_hat_safe[j] for j in st.active},
            a_safe={j: st.a_safe[j] for j in st.active},
        )
        self.regret_samples.append((self.total_pulls,
                                    simple_regret(self.inst, snap)))

    def _loop_guard(self, i: int) -> int:
        st = self.state
        return 10 * (st.ell + math.ceil(self._span[i] / st.eps))

    # -- inner loops ---------------------------------------------------------

    def climb_safe(self, i: int) -> float:
        """Raise a_safe[i] until its estimate is within 2*eps of gamma.

        Requires a fresh estimate at the current a_safe[i]. Each step adds at
        least eps; values are clamped to the cap, and a pinned cap exits the
        loop (nothing larger is playable).
        """
        st, inst = self.state, self.inst
        guard = self._loop_guard(i)
        iters = 0
        while inst.gamma - st.g_hat_safe[i] > 2.0 * st.eps:
            iters += 1
            if iters > guard:
                raise GuardExceeded(f"safe climb stalled on coordinate {i}")
            proposal = inst.gamma + st.a_safe[i] - st.g_hat_safe[i] - st.eps
            new_a = inst.clamp(i, proposal)
            if new_a <= st.a_safe[i]:
                break
            st.a_safe[i] = new_a
            self.estimate_at(i, new_a, "safe")
            st.n[i] += 1
        return st.a_safe[i]

    def climb_unsafe(self, i: int) -> float:
        """Raise a_unsafe[i] toward gamma + eps_safe; stop on a certified
        crossing of gamma (sets the unsafe flag)."""
        st, inst = self.state, self.inst
        assert st.unsafe_flag[i] == 0
        self.estimate_at(i, st.a_unsafe[i], "unsafe")
        relaxed = inst.gamma + inst.eps_safe
        guard = self._loop_guard(i)
        iters = 0
        while relaxed - st.g_hat_unsafe[i] > 2.0 * st.eps:
            iters += 1
            if iters > guard:
                raise GuardExceeded(f"unsafe climb stalled on coordinate {i}")
            proposal = relaxed + st.a_unsafe[i] - st.g_hat_unsafe[i] - st.eps
            new_a = inst.clamp(i, proposal)
            if new_a <= st.a_unsafe[i]:
                break
            st.a_unsafe[i] = new_a
            self.estimate_at(i, new_a, "unsafe")
            if st.g_hat_unsafe[i] - st.eps >= inst.gamma:
                st.unsafe_flag[i] = 1
                break
            st.m[i] += 1
        return st.a_unsafe[i]

    def binary_search_unsafe(self, i: int) -> float:
        """Shrink a_unsafe[i] toward the boundary while keeping it certified.

        Probes halve the distance back toward the epoch-start unsafe value;
        when the gap closes to within eps the probe snaps to that value (its
        estimates are restored from the epoch start rather than resampled).
        """
        st, inst = self.state, self.inst
        assert st.unsafe_flag[i] == 1
        u0_a = st.a_unsafe[i]
        u0_f = st.f_hat_unsafe.get(i)
        u0_g = st.g_hat_unsafe.get(i)
        probe = 0.5 * u0_a + 0.5 * st.a_safe[i]
        st.m[i] = 2
        st.a_unsafe[i] = probe
        self.estimate_at(i, probe, "unsafe")
        guard = self._loop_guard(i)
        iters = 0
        while st.g_hat_unsafe[i] - st.eps < inst.gamma:
            iters += 1
            if iters > guard:
                raise GuardExceeded(f"binary search stalled on coordinate {i}")
            probe = 0.5 * u0_a + 0.5 * st.a_unsafe[i]
            if u0_a - probe <= st.eps:
                st.a_unsafe[i] = u0_a
                if u0_f is not None:
                    st.f_hat_unsafe[i], st.g_hat_unsafe[i] = u0_f, u0_g
                break
            st.a_unsafe[i] = probe
            self.estimate_at(i, probe, "unsafe")
            st.m[i] += 1
        return st.a_unsafe[i]

    def eliminate(self) -> list[int]:
        """Drop crossed coordinates whose upper reward bound is dominated."""
        st = self.state
        threshold = max(st.f_hat_safe[j] for j in st.active)
        survivors = [
            i for i in st.active
            if not (st.unsafe_flag[i] == 1
                    and st.f_hat_unsafe[i] + 2.0 * st.eps <= threshold)
        ]
        if not survivors:
            raise EliminationError("elimination emptied the active set")
        return survivors

    # -- main loop -----------------------------------------------------------

    def run(self) -> RunResult:
        st = self.state
        inconclusive_guard = False
        try:
            while len(st.active) > 1 and st.ell <= self.max_epoch:
                self._epoch_pulls = 0
                for i in st.active:
                    st.n[i] = 1
                    st.m[i] = 1
                    self.estimate_at(i, st.a_safe[i], "safe")
                    self.climb_safe(i)
                    if st.unsafe_flag[i] == 0:
                        self.climb_unsafe(i)
                    else:
                        self.binary_search_unsafe(i)
                survivors = self.eliminate()
                for i in st.active:
                    if i not in survivors:
                        self.elimination_epochs[i] = st.ell
                st.active = survivors
                self.per_epoch_pulls.append(self._epoch_pulls)
                st.ell += 1
        except (GuardExceeded, EliminationError):
            inconclusive_guard = True
            if self._epoch_pulls:
                self.per_epoch_pulls.append(self._epoch_pulls)

        epochs = len(self.per_epoch_pulls)
        inconclusive = inconclusive_guard or len(st.active) > 1
        if not inconclusive:
            identified = st.active[0]
        else:
            scored = [j for j in st.active if j in st.f_hat_safe]
            if scored:
                snap = EstimateSnapshot(
                    scores={j: st.f_hat_safe[j] for j in scored},
                    a_safe={j: st.a_safe[j] for j in scored},
                )
                identified = snap.best()
            else:
                identified = st.active[0]
        return RunResult(
            identified=identified,
            inconclusive=inconclusive,
            total_pulls=self.total_pulls,
            per_epoch_pulls=self.per_epoch_pulls,
            unsafe_pulls_gamma=self.unsafe_gamma,
            unsafe_pulls_gamma_eps=self.unsafe_gamma_eps,
            unsafe_safe_side_pulls_gamma=self.unsafe_safe_side_gamma,
            regret_samples=self.regret_samples,
            epochs=epochs,
            seed=self.seed,
            elimination_epochs=self.elimination_epochs,
            trace=self.trace,
        )


def run_monotonic(inst: MonotonicInstance, delta: float,
                  rng: np.random.Generator, *, max_epoch: int = DEFAULT_MAX_EPOCH,
                  simplified_n: bool = False, record_trace: bool = False,
                  record_regret: bool = True, seed: int | None = None,
                  max_pulls: int = DEFAULT_MAX_PULLS) -> RunResult:
    """Run the monotonic elimination algorithm to completion."""
    return MonotonicRun(
        inst, delta, rng, max_epoch=max_epoch, simplified_n=simplified_n,
        record_trace=record_trace, record_regret=record_regret, seed=seed,
        max_pulls=max_pulls,
    ).run()
