"""Seeded multi-trial experiment runner with CSV output.

Trial k draws its random stream as a pure function of (master_seed, k), so
results are reproducible and independent of execution order. Aggregation
collects pull counts, correctness, ground-truth safety audits, and simple-
regret trajectories resampled onto a shared cumulative-pull grid.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .env import Instance, LinearInstance, MonotonicInstance, i_star, trial_rng
from .linear import run_linear
from .monotonic import run_monotonic
from .results import EstimateSnapshot, RunResult, simple_regret  # noqa: F401  (re-export)

FLOAT_FORMAT = ".9g"  # 9 significant digits in every CSV float


@dataclass
class Aggregate:
    """Across-trial summary. ``std_pulls`` is the population standard
    deviation (divide by n). ``unsafe_trial_count`` counts trials with any
    pull violating the algorithm's safety contract (gamma for linear runs;
    gamma + eps_safe overall, or gamma on safe-side pulls, for monotonic
    runs). ``regret_curve`` is (pulls, mean regret) on the shared grid."""

    mean_pulls: float
    std_pulls: float
    correct_rate: float
    unsafe_trial_count: int
    regret_curve: list[tuple[int, float]]
    n_trials: int


def _trial_is_unsafe(result: RunResult, algorithm: str) -> bool:
    if algorithm == "linear":
        return result.unsafe_pulls_gamma > 0
    return (result.unsafe_pulls_gamma_eps > 0
            or result.unsafe_safe_side_pulls_gamma > 0)


def run_trials(inst: Instance, algorithm: str, n_trials: int, delta: float,
               master_seed: int, *, max_epoch: int = 40,
               simplified_n: bool = False, record_regret: bool = True,
               threads: int | None = None) -> tuple[Aggregate, list[RunResult]]:
    """Run n_trials independent seeded runs and aggregate them.

    ``threads`` > 1 runs trials in a thread pool; results are ordered by
    trial index either way. Inconclusive trials count in the denominator of
    the correctness rate but never in its numerator.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if algorithm == "linear":
        if not isinstance(inst, LinearInstance):
            raise TypeError("linear algorithm requires a LinearInstance")
    elif algorithm == "monotonic":
        if not isinstance(inst, MonotonicInstance):
            raise TypeError("monotonic algorithm requires a MonotonicInstance")
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")

    def one_trial(k: int) -> RunResult:
        rng = trial_rng(master_seed, k)
        if algorithm == "linear":
            return run_linear(inst, delta, rng, max_epoch=max_epoch,
                              record_regret=record_regret, seed=k)
        return run_monotonic(inst, delta, rng, max_epoch=max_epoch,
                             simplified_n=simplified_n,
                             record_regret=record_regret, seed=k)

    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one_trial, range(n_trials)))
    else:
        results = [one_trial(k) for k in range(n_trials)]
    return aggregate(results, i_star(inst), algorithm), results


def aggregate(results: list[RunResult], star: int, algorithm: str) -> Aggregate:
    """Summarize a list of per-trial results against the true optimum."""
    pulls = np.array([r.total_pulls for r in results], dtype=float)
    correct = sum(1 for r in results
                  if not r.inconclusive and r.identified == star)
    unsafe = sum(1 for r in results if _trial_is_unsafe(r, algorithm))
    return Aggregate(
        mean_pulls=float(pulls.mean()),
        std_pulls=float(pulls.std()),  # population std
        correct_rate=correct / len(results),
        unsafe_trial_count=unsafe,
        regret_curve=mean_regret_curve([r.regret_samples for r in results]),
        n_trials=len(results),
    )


def mean_regret_curve(curves: list[list[tuple[int, float]]]) -> list[tuple[int, float]]:
    """Resample per-trial regret curves onto their shared pull grid.

    The grid is the union of all recorded cumulative-pull values; each trial
    is step-interpolated (last value carried forward, first value backfilled
    before a trial's first sample) and the mean is taken pointwise.
    """
    curves = [c for c in curves if c]
    if not curves:
        return []
    grid = sorted({x for curve in curves for x, _ in curve})
    total = np.zeros(len(grid))
    for curve in curves:
        xs = [x for x, _ in curve]
        ys = [y for _, y in curve]
        j = 0
        current = ys[0]
        for gi, g in enumerate(grid):
            while j < len(xs) and xs[j] <= g:
                current = ys[j]
                j += 1
            total[gi] += current
    mean = total / len(curves)
    return [(g, float(v)) for g, v in zip(grid, mean)]


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

SUMMARY_COLUMNS = ["d", "algorithm", "n_trials", "mean_pulls", "std_pulls",
                   "correct_rate", "unsafe_trials"]
REGRET_COLUMNS = ["algorithm", "d", "pulls", "mean_regret"]


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, FLOAT_FORMAT)
    return str(value)


def write_summary_csv(path: str | Path, rows: list[dict]) -> None:
    """One row per (d, algorithm) experiment."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in SUMMARY_COLUMNS])


def write_regret_csv(path: str | Path, rows: list[dict]) -> None:
    """One row per grid point of each experiment's mean regret curve."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REGRET_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in REGRET_COLUMNS])


def summary_row(d: int, algorithm: str, agg: Aggregate) -> dict:
    return {
        "d": d,
        "algorithm": algorithm,
        "n_trials": agg.n_trials,
        "mean_pulls": agg.mean_pulls,
        "std_pulls": agg.std_pulls,
        "correct_rate": agg.correct_rate,
        "unsafe_trials": agg.unsafe_trial_count,
    }


def regret_rows(d: int, algorithm: str, agg: Aggregate) -> list[dict]:
    return [
        {"algorithm": algorithm, "d": d, "pulls": pulls, "mean_regret": reg}
        for pulls, reg in agg.regret_curve
    ]


def thread_count_from_env() -> int | None:
    """Parse SAFEBAI_THREADS: unset/1 sequential, 0 auto, n a fixed pool."""
    raw = os.environ.get("SAFEBAI_THREADS")
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"SAFEBAI_THREADS must be an integer, got {raw!r}")
    if n == 0:
        return os.cpu_count() or 1
    return n
