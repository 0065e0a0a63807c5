"""Command-line entry point: run seeded experiments and evaluate theory reports.

Subcommands:

  safebai run    --config experiment.json [--out DIR] [--seed N] [--trials N]
                 [--delta F] [--simplified-n]
  safebai theory --config instance.json [--delta F] [--out DIR]

``run`` writes summary.csv and regret.csv into the output directory, one
summary row per swept dimension. ``theory`` writes theory.json. The
environment variable SAFEBAI_THREADS limits trial parallelism (0 = auto,
unset = sequential).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import harness
from .env import Instance, instance_from_dict, load_instance
from .theory import theory_report


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    instance: str
    algorithm: str
    delta: float = 0.1
    n_trials: int = 10
    master_seed: int = 0
    max_epoch: int = 40
    simplified_n: bool = False
    d_sweep: list[int] | None = None
    pattern: dict | None = None
    out: str = "results"
    base_dir: Path = field(default=Path("."), repr=False, compare=False)

    def to_dict(self) -> dict:
        data = asdict(self)
        data.pop("base_dir")
        return data

    def instance_path(self) -> Path:
        path = Path(self.instance)
        if not path.is_absolute():
            path = self.base_dir / path
        return path


def parse_config(data: dict, base_dir: Path = Path(".")) -> ExperimentConfig:
    known = {f for f in ExperimentConfig.__dataclass_fields__ if f != "base_dir"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        cfg = ExperimentConfig(base_dir=base_dir, **data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    if cfg.algorithm not in ("linear", "monotonic"):
        raise ConfigError(f"algorithm must be linear or monotonic, got {cfg.algorithm!r}")
    if not 0 < cfg.delta < 1:
        raise ConfigError("delta must be in (0, 1)")
    if cfg.n_trials < 1:
        raise ConfigError("n_trials must be >= 1")
    if cfg.max_epoch < 1:
        raise ConfigError("max_epoch must be >= 1")
    if cfg.d_sweep is not None:
        if not cfg.d_sweep or any(d < 2 for d in cfg.d_sweep):
            raise ConfigError("d_sweep entries must be >= 2")
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    with open(path) as fh:
        data = json.load(fh)
    cfg = parse_config(data, base_dir=path.parent)
    if not cfg.instance_path().exists():
        raise ConfigError(f"instance file not found: {cfg.instance_path()}")
    return cfg


def _pattern_value(block: dict, i: int) -> float:
    if i == 0:
        return float(block.get("i1", block["rest"]))
    if i == 1:
        return float(block.get("i2", block["rest"]))
    return float(block["rest"])


def expand_instance(base: dict, pattern: dict | None, d: int) -> Instance:
    """Instantiate the base instance at dimension d.

    Per-coordinate fields named in ``pattern`` follow its i=1 / i=2 / i>2
    blocks; the rest are broadcast from the base document, which must be
    constant across coordinates for that to be well defined.
    """
    data = dict(base)
    pattern = pattern or {}
    for key in ("theta", "mu", "a0", "M"):
        if key in pattern:
            data[key] = [_pattern_value(pattern[key], i) for i in range(d)]
        elif key in data and data[key] is not None:
            values = data[key]
            if len(set(values)) > 1:
                raise ConfigError(
                    f"cannot broadcast non-constant {key} to d={d}; "
                    f"add a pattern block for it")
            data[key] = [values[0]] * d
    return instance_from_dict(data)


def cmd_run(cfg: ExperimentConfig) -> int:
    with open(cfg.instance_path()) as fh:
        base = json.load(fh)
    out_dir = cfg.base_dir / cfg.out if not Path(cfg.out).is_absolute() else Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    threads = harness.thread_count_from_env()

    dims = cfg.d_sweep if cfg.d_sweep is not None else [len(base["theta"])]
    summary_rows = []
    regret_rows = []
    any_inconclusive = False
    for d in dims:
        if cfg.d_sweep is not None:
            inst = expand_instance(base, cfg.pattern, d)
        else:
            inst = instance_from_dict(base)
        agg, results = harness.run_trials(
            inst, cfg.algorithm, cfg.n_trials, cfg.delta, cfg.master_seed,
            max_epoch=cfg.max_epoch, simplified_n=cfg.simplified_n,
            threads=threads)
        summary_rows.append(harness.summary_row(d, cfg.algorithm, agg))
        regret_rows.extend(harness.regret_rows(d, cfg.algorithm, agg))
        n_inconclusive = sum(1 for r in results if r.inconclusive)
        any_inconclusive |= n_inconclusive > 0
        print(f"d={d} algorithm={cfg.algorithm} trials={agg.n_trials} "
              f"mean_pulls={agg.mean_pulls:{harness.FLOAT_FORMAT}} "
              f"std_pulls={agg.std_pulls:{harness.FLOAT_FORMAT}} "
              f"correct_rate={agg.correct_rate:{harness.FLOAT_FORMAT}} "
              f"unsafe_trials={agg.unsafe_trial_count}")
        if n_inconclusive:
            print(f"warning: {n_inconclusive} inconclusive trial(s) at d={d}",
                  file=sys.stderr)

    harness.write_summary_csv(out_dir / "summary.csv", summary_rows)
    harness.write_regret_csv(out_dir / "regret.csv", regret_rows)
    return 0


def cmd_theory(instance_path: Path, delta: float, out_dir: Path) -> int:
    inst = load_instance(instance_path)
    report = theory_report(inst, delta)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "theory.json"
    with open(out_path, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"i_star={report.i_star}")
    print("gaps=" + " ".join(format(g, harness.FLOAT_FORMAT) for g in report.gaps))
    if report.lower_bound is not None:
        print(f"lower_bound={report.lower_bound:{harness.FLOAT_FORMAT}}")
    cases = [str(c) if c is not None else "-" for c in report.cases]
    if any(c != "-" for c in cases):
        print("cases=" + " ".join(cases))
    print(f"wrote {out_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="safebai",
                                     description="Safe best-arm identification simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a seeded experiment from a config file")
    run_p.add_argument("--config", required=True, help="experiment config JSON")
    run_p.add_argument("--out", help="output directory (overrides config)")
    run_p.add_argument("--seed", type=int, help="master seed (overrides config)")
    run_p.add_argument("--trials", type=int, help="trial count (overrides config)")
    run_p.add_argument("--delta", type=float, help="confidence (overrides config)")
    run_p.add_argument("--simplified-n", action="store_true",
                       help="use the fixed-log sample-count variant")

    th_p = sub.add_parser("theory", help="evaluate the analytic report for an instance")
    th_p.add_argument("--config", required=True, help="instance definition JSON")
    th_p.add_argument("--delta", type=float, default=0.1)
    th_p.add_argument("--out", default="results", help="output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = load_config(args.config)
            if args.out is not None:
                # flag paths are cwd-relative, unlike config-file paths
                cfg.out = str(Path(args.out).resolve())
            if args.seed is not None:
                cfg.master_seed = args.seed
            if args.trials is not None:
                cfg.n_trials = args.trials
            if args.delta is not None:
                cfg.delta = args.delta
            if args.simplified_n:
                cfg.simplified_n = True
            return cmd_run(cfg)
        return cmd_theory(Path(args.config), args.delta, Path(args.out))
    except (ConfigError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
