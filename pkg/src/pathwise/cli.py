"""Batch runner: ``pathwise run config.json``.

Exit codes: 0 success, 2 malformed JSON, 3 invalid configuration,
4 threshold violation under ``--check``.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .convergence import (
    aggregation_experiment,
    approximation_experiment,
    left_continuous_mode,
    qv_experiment,
    quartiles_disjoint,
    truncation_experiment,
)
from .exceptions import ConfigError
from .integrands import parse_integrand
from .scenarios import Scenario

log = logging.getLogger("pathwise")

EXPERIMENTS = ("approximation", "truncation", "aggregation", "left_continuous", "qv")
ENV_OUTPUT_DIR = "PATHWISE_OUTPUT_DIR"
ENV_THREADS = "PATHWISE_THREADS"


@dataclass
class ExperimentConfig:
    experiment: str
    scenarios: list
    integrand: str = "clip:3"
    n_values: list = field(default_factory=list)
    levels: list = field(default_factory=list)
    fixed_n: int = 64
    num_paths: int = 100
    output_dir: str = "out"
    seed: int = 0
    bound: Optional[float] = None
    qv_level: int = 8
    threads: int = 1
    thresholds: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        extra = set(raw) - known
        if extra:
            raise ConfigError(f"unknown config fields: {sorted(extra)}")
        for key in ("experiment", "scenarios"):
            if key not in raw:
                raise ConfigError(f"missing required field '{key}'")
        try:
            cfg = cls(**raw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment: must be one of {', '.join(EXPERIMENTS)}")
        if not isinstance(self.num_paths, int) or self.num_paths < 1:
            raise ConfigError("num_paths: must be an integer >= 1")
        if not isinstance(self.scenarios, list) or not self.scenarios:
            raise ConfigError("scenarios: must be a nonempty list")
        seq_name = "levels" if self.experiment == "truncation" else "n_values"
        seq = self.levels if self.experiment == "truncation" else self.n_values
        if self.experiment != "qv":
            if not seq:
                raise ConfigError(f"{seq_name}: must be nonempty")
            if any(not isinstance(v, (int, float)) or v < 1 for v in seq) or any(
                b <= a for a, b in zip(seq, seq[1:])
            ):
                raise ConfigError(f"{seq_name}: must be positive and strictly increasing")
            parse_integrand(self.integrand)
        if not isinstance(self.threads, int) or self.threads < 1:
            raise ConfigError("threads: must be an integer >= 1")

    def resolved_scenarios(self) -> list[Scenario]:
        return [Scenario.from_dict(s, default_seed=self.seed) for s in self.scenarios]

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _safe_name(scenario_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", scenario_id)


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def execute(cfg: ExperimentConfig) -> tuple[list[Path], list[str]]:
    """Run the configured experiment; return written files and threshold failures."""
    scenarios = cfg.resolved_scenarios()
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    th = cfg.thresholds
    written, failures = [], []

    if cfg.experiment == "qv":
        reports = [qv_experiment(s, cfg.qv_level, cfg.num_paths, threads=cfg.threads) for s in scenarios]
        for r in reports:
            p = out_dir / f"qv_{_safe_name(r.scenario_id)}.csv"
            _write(p, r.to_csv())
            written.append(p)
            err = r.median_abs_error()
            tol = th.get("qv_median_abs_error")
            if tol is not None and err is not None and err > tol:
                failures.append(f"{r.scenario_id}: median |qv(1) - f(1)| = {err:.4g} > {tol}")
        if th.get("disjoint_quartiles") and len(reports) >= 2:
            for a, b in zip(reports, reports[1:]):
                if not quartiles_disjoint(a, b):
                    failures.append(f"{a.scenario_id} / {b.scenario_id}: quartile ranges overlap")
    else:
        kw = dict(threads=cfg.threads)
        if cfg.experiment == "aggregation":
            reports = list(
                aggregation_experiment(scenarios, cfg.integrand, cfg.n_values, cfg.num_paths, bound=cfg.bound, **kw).values()
            )
        elif cfg.experiment == "truncation":
            reports = [
                truncation_experiment(s, cfg.integrand, cfg.levels, cfg.fixed_n, cfg.num_paths, **kw) for s in scenarios
            ]
        else:
            run = approximation_experiment if cfg.experiment == "approximation" else left_continuous_mode
            reports = [run(s, cfg.integrand, cfg.n_values, cfg.num_paths, bound=cfg.bound, **kw) for s in scenarios]
        for r in reports:
            p = out_dir / f"report_{_safe_name(r.scenario_id)}.csv"
            _write(p, r.to_csv())
            written.append(p)
            slack = th.get("monotone_slack")
            if slack is not None and not r.is_monotone(slack):
                failures.append(f"{r.scenario_id}: errors not monotone within slack {slack}: {r.medians()}")
            tol = th.get("final_median_sup_error")
            if tol is not None and r.final_median() > tol:
                failures.append(f"{r.scenario_id}: final median sup-error {r.final_median():.4g} > {tol}")

    manifest = {
        "config": cfg.to_dict(),
        "scenarios": [s.to_dict() for s in scenarios],
        "outputs": [p.name for p in written],
    }
    p = out_dir / "manifest.json"
    _write(p, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    written.append(p)
    return written, failures


def load_config(path: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    return ExperimentConfig.from_dict(raw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathwise", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("config", help="path to a JSON experiment config")
    run.add_argument("--output-dir", help=f"override output_dir (env {ENV_OUTPUT_DIR})")
    run.add_argument("--threads", type=int, help=f"worker threads (env {ENV_THREADS})")
    run.add_argument("--check", action="store_true", help="exit 4 if config thresholds are violated")
    run.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config)
        output_dir = args.output_dir or os.environ.get(ENV_OUTPUT_DIR)
        if output_dir:
            cfg.output_dir = output_dir
        threads = args.threads or os.environ.get(ENV_THREADS)
        if threads:
            cfg.threads = int(threads)
        cfg.validate()
        written, failures = execute(cfg)
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    for p in written:
        log.info("wrote %s", p)
    if failures:
        for f in failures:
            print(f"threshold: {f}", file=sys.stderr)
        if args.check:
            return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
