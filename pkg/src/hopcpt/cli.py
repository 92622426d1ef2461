"""Command line entry point: ``hopcpt {generate,run,grid,eval}``.

Exit status is 0 on success, 1 when any (seed, method, alpha) cell failed
and 2 on configuration errors.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .basemodel import RegimeSeriesConfig, generate_regime_series, ridge_fit, ridge_predict
from .core import SplitSpec, write_csv
from .experiment import (
    EVAL_COLUMNS,
    ConfigError,
    ExperimentConfig,
    MethodSpec,
    config_from_dict,
    csv_text,
    eval_files,
    grid_experiment,
    load_config,
    run_experiment,
    write_csv_rows,
)
from .methods import Variant

log = logging.getLogger("hopcpt")

EXIT_OK, EXIT_FAILED_CELL, EXIT_CONFIG = 0, 1, 2


def _float_list(text: str) -> List[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _str_list(text: str) -> List[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hopcpt", description="Conformal prediction intervals for time series")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write the two-regime synthetic series as CSV")
    gen.add_argument("--config", help="YAML file; its data.synthetic block supplies defaults")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--steps", type=int, default=None)
    gen.add_argument("--len-min", type=int, default=None)
    gen.add_argument("--len-max", type=int, default=None)
    gen.add_argument("--lambda", dest="lam", type=float, default=1.0, help="ridge strength for y_hat")
    gen.add_argument("--out", required=True, help="output CSV path")

    for name, help_text in (("run", "evaluate configured methods over seeds"),
                            ("grid", "hyperparameter grid search, then evaluate the winners")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--seeds", type=int, help="number of run seeds (0..N-1)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--alpha", type=_float_list, help="comma-separated miscoverage levels")
        p.add_argument("--method", type=_str_list, help="comma-separated method names or variants")
        p.add_argument("--jobs", type=int, default=1)

    ev = sub.add_parser("eval", help="re-score per-step interval CSV files")
    ev.add_argument("paths", nargs="+", help="interval CSV files or directories")
    ev.add_argument("--out", help="output CSV (default: stdout)")
    ev.add_argument("--rolling", action="store_true", help="overlapping local-coverage windows")
    return parser


def _experiment_config(args) -> ExperimentConfig:
    config = load_config(args.config) if args.config else config_from_dict({})
    if args.seed is not None:
        config.master_seed = args.seed
    if args.seeds is not None:
        if args.seeds < 1:
            raise ConfigError("--seeds must be at least 1")
        config.seeds = list(range(args.seeds))
    if args.out:
        config.output = args.out
    if args.alpha:
        if any(not 0 < a < 1 for a in args.alpha):
            raise ConfigError("--alpha values must lie in (0, 1)")
        config.alphas = args.alpha
    if args.method:
        by_name = {m.name: m for m in config.methods}
        chosen = []
        for item in args.method:
            if item in by_name:
                chosen.append(by_name[item])
                continue
            try:
                variant = Variant(item)
            except ValueError:
                raise ConfigError(f"unknown method {item!r}") from None
            matches = [m for m in config.methods if m.variant is variant]
            chosen.extend(matches or [MethodSpec(variant.value, variant)])
        config.methods = chosen
    if args.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    return config


def cmd_generate(args) -> int:
    params = {}
    if args.config:
        synthetic = load_config(args.config).synthetic
        if synthetic is None:
            raise ConfigError("config has no synthetic data block")
        params.update({k: v for k, v in synthetic.items() if v is not None})
    for key, value in (("seed", args.seed), ("total_steps", args.steps),
                       ("regime_len_min", args.len_min), ("regime_len_max", args.len_max)):
        if value is not None:
            params[key] = value
    try:
        cfg = RegimeSeriesConfig(**params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    ds = generate_regime_series(cfg, name=Path(args.out).stem)
    split = SplitSpec.from_fractions(len(ds))
    model = ridge_fit(ds.features[split.train], ds.targets[split.train], args.lam)
    write_csv(ds.with_predictions(ridge_predict(model, ds.features)), args.out)
    log.info("wrote %d rows to %s", len(ds), args.out)
    return EXIT_OK


def _status(rows) -> int:
    failed = [r for r in rows if r["status"] != "ok"]
    for r in failed:
        log.error("failed cell seed=%s method=%s alpha=%s: %s", r["seed"], r["method"], r["alpha"], r["error"])
    return EXIT_FAILED_CELL if failed else EXIT_OK


def cmd_run(args) -> int:
    config = _experiment_config(args)
    rows, _ = run_experiment(config, config.output, jobs=args.jobs)
    log.info("wrote %s/summary.csv", config.output)
    return _status(rows)


def cmd_grid(args) -> int:
    config = _experiment_config(args)
    _, rows, _ = grid_experiment(config, config.output, jobs=args.jobs)
    log.info("wrote %s/grid.csv", config.output)
    return _status(rows)


def cmd_eval(args) -> int:
    paths = []
    for raw in args.paths:
        p = Path(raw)
        if not p.exists():
            raise ConfigError(f"no such file or directory: {p}")
        paths.extend(sorted(p.rglob("*.csv")) if p.is_dir() else [p])
    if not paths:
        raise ConfigError("no interval files found")
    try:
        rows = eval_files(paths, rolling=args.rolling)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"unreadable interval file: {exc}") from exc
    if args.out:
        write_csv_rows(args.out, rows, EVAL_COLUMNS)
    else:
        sys.stdout.write(csv_text(rows, EVAL_COLUMNS))
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "run": cmd_run, "grid": cmd_grid, "eval": cmd_eval}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
