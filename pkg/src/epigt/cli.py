"""Command line front end: run experiments, verify properties, print bounds.

``run`` writes one CSV per strategy plus a manifest that echoes the full
configuration; rerunning the same configuration reproduces the files byte
for byte.  Configuration precedence, highest first: command line flags,
EPIGT_* environment variables, --config file, --preset, built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .bounds import (
    BoundParams,
    DEFAULT_HEURISTIC_MULTIPLIER,
    cca_budget,
    entropy_lower_bound,
    heuristic_budget,
    scaling_lower_bound,
)
from .checks import run_all
from .model import ModelParams
from .pipeline import (
    DecoderName,
    Mode,
    Strategy,
    StrategyCurve,
    monte_carlo,
    monte_carlo_gillespie,
)

ENV_PREFIX = "EPIGT_"

CSV_COLUMNS = (
    "day",
    "mean_infected",
    "mean_tests",
    "mean_false_neg",
    "mean_false_pos",
    "mean_isolated",
    "entropy_lb",
    "p_min",
    "p_mean",
    "p_max",
)


class ConfigError(ValueError):
    """Raised for malformed configuration input, with the offending key."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; serializable to and from the manifest."""

    N: int = 1000
    C: int = 50
    p_init: float = 0.02
    q1: float = 0.012
    q2: float = 0.0004
    r: float = 0.1
    eta: float | None = None
    horizon: int = 51
    n_trajectories: int = 200
    base_seed: int = 0
    mode: str = "fixed_budget"
    strategies: tuple[str, ...] = ("no_testing", "complete", "rnd_mean")
    decoder: str = "dd"
    delta: float = 2.0
    heuristic_multiplier: float = DEFAULT_HEURISTIC_MULTIPLIER
    test_cap: int = 1000
    workers: int = 0
    gillespie: bool = False
    gillespie_trajectories: int = 200

    def model_params(self) -> ModelParams:
        return ModelParams(
            N=self.N, C=self.C, p_init=self.p_init,
            q1=self.q1, q2=self.q2, r=self.r, eta=self.eta,
        )

    def bound_params(self) -> BoundParams:
        return BoundParams(
            delta=self.delta, heuristic_multiplier=self.heuristic_multiplier
        )


PRESETS: dict[str, dict] = {
    "fig1": dict(
        N=1000, C=50, p_init=0.02, q1=0.012, q2=0.0004,
        mode="fixed_budget", strategies=("no_testing", "complete", "rnd_mean"),
    ),
    "fig4a": dict(
        N=1000, C=20, p_init=0.02, q1=0.03, q2=0.0004,
        mode="min_tests", strategies=("complete", "rnd_mean", "rnd_max", "cca"),
    ),
    "fig4b": dict(
        N=1000, C=50, p_init=0.02, q1=0.012, q2=0.0004,
        mode="min_tests", strategies=("complete", "rnd_mean", "rnd_max", "cca"),
    ),
    "fig6a": dict(
        N=1000, C=50, p_init=0.02, q1=0.012, q2=0.0004,
        mode="fixed_budget", strategies=("no_testing", "complete", "rnd_mean"),
    ),
    "fig6b": dict(
        N=5000, C=50, p_init=0.02, q1=0.012, q2=8e-5,
        mode="fixed_budget", strategies=("no_testing", "complete", "rnd_mean"),
    ),
    "fig7": dict(
        N=1000, C=50, p_init=0.02, q1=0.012, q2=0.0004,
        mode="fixed_budget", strategies=("no_testing",), gillespie=True,
    ),
}

_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}

_INT_FIELDS = {
    "N", "C", "horizon", "n_trajectories", "base_seed",
    "test_cap", "workers", "gillespie_trajectories",
}
_FLOAT_FIELDS = {"p_init", "q1", "q2", "r", "delta", "heuristic_multiplier"}
_BOOL_FIELDS = {"gillespie"}


def _coerce(key: str, value) -> object:
    """Parse a raw config value (string or JSON scalar) for a known field."""
    try:
        if key in _INT_FIELDS:
            return int(value)
        if key in _FLOAT_FIELDS:
            return float(value)
        if key == "eta":
            if value in (None, "", "none", "null"):
                return None
            return float(value)
        if key in _BOOL_FIELDS:
            if isinstance(value, bool):
                return value
            text = str(value).strip().lower()
            if text in ("1", "true", "yes", "on"):
                return True
            if text in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if key == "strategies":
            if isinstance(value, str):
                parts = [s.strip() for s in value.split(",") if s.strip()]
            else:
                parts = [str(s) for s in value]
            for s in parts:
                Strategy(s)
            return tuple(parts)
        if key in ("mode",):
            Mode(str(value))
            return str(value)
        if key in ("decoder",):
            DecoderName(str(value))
            return str(value)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"invalid value for {key!r}: {value!r}") from exc
    raise ConfigError(f"unknown configuration key: {key!r}")


def _merge(base: dict, overrides: dict, source: str) -> dict:
    merged = dict(base)
    for key, value in overrides.items():
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown configuration key in {source}: {key!r}")
        merged[key] = _coerce(key, value)
    return merged


def _env_overrides(environ) -> dict:
    out = {}
    for name, value in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = name[len(ENV_PREFIX):].lower()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown environment override: {name}")
        out[key] = value
    return out


def parse_config(
    preset: str | None = None,
    config_path: str | Path | None = None,
    assignments: Sequence[str] = (),
    environ=None,
) -> ExperimentConfig:
    """Resolve a configuration from all sources in precedence order."""
    values = asdict(ExperimentConfig())
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(
                f"unknown preset: {preset!r} (have {', '.join(sorted(PRESETS))})"
            )
        values = _merge(values, PRESETS[preset], f"preset {preset}")
    if config_path is not None:
        path = Path(config_path)
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if isinstance(raw, dict) and "config" in raw and isinstance(raw["config"], dict):
            raw = raw["config"]
        if not isinstance(raw, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        values = _merge(values, raw, f"config file {path}")
    env = _env_overrides(os.environ if environ is None else environ)
    values = _merge(values, env, "environment")
    flat = {}
    for item in assignments:
        if "=" not in item:
            raise ConfigError(f"expected KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        flat[key.strip()] = value.strip()
    values = _merge(values, flat, "command line")
    if isinstance(values.get("strategies"), list):
        values["strategies"] = tuple(values["strategies"])
    return ExperimentConfig(**values)


def _curve_rows(curve: StrategyCurve) -> list[list[str]]:
    rows = []
    for i, day in enumerate(curve.days):
        rows.append(
            [str(int(day))]
            + [
                f"{float(col[i]):.6f}"
                for col in (
                    curve.mean_infected,
                    curve.mean_tests,
                    curve.mean_false_neg,
                    curve.mean_false_pos,
                    curve.mean_isolated,
                    curve.entropy_lb,
                    curve.p_min,
                    curve.p_mean,
                    curve.p_max,
                )
            ]
        )
    return rows


def write_curve_csv(path: Path, curve: StrategyCurve) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        writer.writerows(_curve_rows(curve))


def write_gillespie_csv(path: Path, days: np.ndarray, mean_infected: np.ndarray) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("day", "mean_infected"))
        for day, value in zip(days, mean_infected):
            writer.writerow((str(int(day)), f"{float(value):.6f}"))


def run_experiment(config: ExperimentConfig, out_dir: str | Path) -> dict[str, Path]:
    """Run the configured experiment and write CSVs plus a manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = config.model_params()
    strategies = [Strategy(s) for s in config.strategies]
    curves = monte_carlo(
        params=params,
        horizon=config.horizon,
        strategies=strategies,
        mode=Mode(config.mode),
        n_trajectories=config.n_trajectories,
        base_seed=config.base_seed,
        decoder=DecoderName(config.decoder),
        bound_params=config.bound_params(),
        test_cap=config.test_cap,
        workers=config.workers or None,
    )
    files: dict[str, Path] = {}
    for strategy in strategies:
        path = out / f"{strategy.value}.csv"
        write_curve_csv(path, curves[strategy])
        files[strategy.value] = path
    if config.gillespie:
        mean = monte_carlo_gillespie(
            params, config.horizon, config.gillespie_trajectories, config.base_seed
        )
        path = out / "gillespie.csv"
        write_gillespie_csv(path, np.arange(config.horizon), mean)
        files["gillespie"] = path
    manifest = {
        "version": __version__,
        "config": asdict(config),
        "columns": list(CSV_COLUMNS),
        "files": {k: p.name for k, p in files.items()},
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    files["manifest"] = manifest_path
    return files


def _cmd_run(args) -> int:
    assignments = list(args.set or [])
    for flag in ("base_seed", "n_trajectories", "horizon", "workers"):
        value = getattr(args, flag)
        if value is not None:
            assignments.append(f"{flag}={value}")
    try:
        config = parse_config(
            preset=args.preset, config_path=args.config, assignments=assignments
        )
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    files = run_experiment(config, args.out)
    for name in sorted(files):
        print(f"wrote {files[name]}")
    return 0


def _cmd_verify(args) -> int:
    reports = run_all(n_instances=args.trials, seed=args.seed, fast=args.fast)
    failed = 0
    for report in reports:
        print(report.line())
        if not report.passed:
            failed += 1
    if failed:
        print(f"{failed} of {len(reports)} suites failed")
        return 1
    print(f"all {len(reports)} suites passed")
    return 0


def _cmd_bounds(args) -> int:
    n, p = args.n, args.p
    if not 0.0 <= p <= 1.0:
        print("error: p must lie in [0, 1]", file=sys.stderr)
        return 2
    priors = np.full(n, p)
    print(f"entropy_lower_bound: {entropy_lower_bound(priors):.6f}")
    print(f"scaling_lower_bound: {scaling_lower_bound(n, p):.6f}")
    k_bar = args.k_bar if args.k_bar is not None else n * p
    if n > 1 and k_bar > 0:
        print(f"cca_budget: {cca_budget(n, k_bar, args.delta)}")
    print(f"heuristic_budget: {heuristic_budget(n, p, args.multiplier)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epigt",
        description="Dynamic group testing on a stochastic block epidemic model",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment and write CSV curves")
    p_run.add_argument("--preset", choices=sorted(PRESETS), help="named experiment")
    p_run.add_argument("--config", help="JSON config file (a manifest also works)")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--base-seed", dest="base_seed", type=int, default=None)
    p_run.add_argument(
        "--trajectories", dest="n_trajectories", type=int, default=None
    )
    p_run.add_argument("--horizon", type=int, default=None)
    p_run.add_argument("--workers", type=int, default=None)
    p_run.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override any configuration field",
    )
    p_run.set_defaults(func=_cmd_run)

    p_verify = sub.add_parser("verify", help="run the property suites")
    p_verify.add_argument("--trials", type=int, default=200)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--fast", action="store_true", help="trimmed instance counts")
    p_verify.set_defaults(func=_cmd_verify)

    p_bounds = sub.add_parser("bounds", help="print bounds and budgets")
    p_bounds.add_argument("--n", type=int, required=True)
    p_bounds.add_argument("--p", type=float, required=True)
    p_bounds.add_argument("--k-bar", dest="k_bar", type=float, default=None)
    p_bounds.add_argument("--delta", type=float, default=1.0)
    p_bounds.add_argument(
        "--multiplier", type=float, default=DEFAULT_HEURISTIC_MULTIPLIER
    )
    p_bounds.set_defaults(func=_cmd_bounds)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
