"""Command-line benchmark harness.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
The LOWRANK_SEED environment variable overrides the master seed from any
other source.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .bench import ExperimentConfig, render_table, run_experiment
from .errors import NumericalError, ParameterError


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lowrank-bench",
        description="Monte-Carlo matrix-completion benchmark: MCAR vs MAR "
                    "relative errors with Welch p-values.")
    ap.add_argument("--config", help="JSON config file with ExperimentConfig keys")
    ap.add_argument("--m", type=int, help="number of rows")
    ap.add_argument("--n", type=int, help="number of columns")
    ap.add_argument("--ranks", type=_int_list, help="comma-separated ranks")
    ap.add_argument("--props", type=_float_list,
                    help="comma-separated missing proportions in (0,1)")
    ap.add_argument("--reps", type=int, help="replications per cell")
    ap.add_argument("--seed", type=int, help="master seed")
    ap.add_argument("--solver", choices=["SOFT_IMPUTE", "HARD_IMPUTE"])
    ap.add_argument("--scope", choices=["OBSERVED", "MISSING", "ALL"])
    ap.add_argument("--out", help="output path (default: stdout)")
    ap.add_argument("--format", dest="out_format", choices=["ascii", "csv", "json"])
    ap.add_argument("--threads", type=int,
                    help="worker processes (default: available cores)")
    return ap


_OVERRIDES = {
    "m": "m", "n": "n", "ranks": "ranks", "props": "missing_props",
    "reps": "n_reps", "seed": "master_seed", "solver": "solver",
    "scope": "error_scope", "out_format": "out_format", "threads": "threads",
}


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    values: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ParameterError("config file must hold a JSON object")
        fields = set(ExperimentConfig.__dataclass_fields__)
        unknown = set(raw) - fields
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        values.update(raw)
    for arg_name, field_name in _OVERRIDES.items():
        val = getattr(args, arg_name)
        if val is not None:
            values[field_name] = val
    env_seed = os.environ.get("LOWRANK_SEED")
    if env_seed is not None:
        try:
            values["master_seed"] = int(env_seed)
        except ValueError as exc:
            raise ParameterError(f"LOWRANK_SEED={env_seed!r} is not an integer") from exc
    for key in ("ranks", "missing_props", "mechanisms"):
        if key in values:
            values[key] = tuple(values[key])
    cfg = ExperimentConfig(**values)
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
    except (ParameterError, OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run_experiment(cfg)
        text = render_table(report, cfg.out_format)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ParameterError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
