"""Experiment configuration and the run / grid / eval pipelines.

Config files are YAML with ``schema_version: 1``::

    schema_version: 1
    master_seed: 0
    seeds: 12                    # count (0..11) or explicit list
    data:
      synthetic: {total_steps: 1000, seed: null}   # or  csv: [a.csv, b.csv]
      base_model: ridge          # ridge (refit on train segment) | file (use y_hat)
      ridge_lambda: 1.0
    split: [0.3333333333333333, 0.3333333333333333, 0.3333333333333333]
    alphas: [0.05, 0.10, 0.15]
    window_sizes: [10, 20, 50]
    local_coverage_rolling: false
    output: results
    methods:
      - name: HopCPT             # label used in output files
        variant: HopCPT          # HopCPT | SplitCP | NexCP | EnbPI | KnnCP
        params: {hopcpt_quantile_mode: sampled}    # MethodConfig fields
        train: {epochs: 3000, learning_rate: 0.001} # TrainConfig fields (HopCPT)
        adaptive: {gamma: 0.005, mode: simple}      # optional AdaptiveCI wrapper
        grid: {learning_rate: [0.01, 0.001]}        # grid command only
        adaptive_grid: {gamma: [0.002, 0.005], mode: [simple, momentum]}

A synthetic ``seed`` of null draws a fresh series for every run seed from
the stream ``(master_seed, seed, "data")``; an integer fixes the series.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml

from .basemodel import RegimeSeriesConfig, generate_regime_series, ridge_fit, ridge_predict
from .core import PredictionInterval, SplitSpec, TimeSeriesDataset, read_csv
from .hopfield.training import TrainConfig, TrainResult, select_model, train
from .io import atomic_writer
from .methods import (
    ENBPI_WINDOW_GRID,
    HOPCPT_GRID,
    KNN_SHARE_GRID,
    NEXCP_RHO_GRID,
    AdaptiveState,
    MethodConfig,
    Variant,
    run_method,
)
from .metrics import WINDOW_SIZES, EvalReport, covered_flags, evaluate
from .seeding import stream_seed

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_ALPHAS = (0.05, 0.10, 0.15)
DEFAULT_SEEDS = 12

DEFAULT_GRIDS = {
    Variant.HOPCPT: {k: list(v) for k, v in HOPCPT_GRID.items()},
    Variant.NEXCP: {"nexcp_rho": list(NEXCP_RHO_GRID)},
    Variant.ENBPI: {"enbpi_window": list(ENBPI_WINDOW_GRID)},
    Variant.KNN: {"knn_top_share": list(KNN_SHARE_GRID)},
    Variant.SPLIT: {},
}
TRAIN_FIELDS = {f.name for f in dataclasses.fields(TrainConfig)}
METHOD_FIELDS = {f.name for f in dataclasses.fields(MethodConfig)} - {"variant", "alpha"}

RESULT_COLUMNS = [
    "seed", "method", "series", "alpha", "status", "delta_cov", "mean_pi_width", "mean_winkler",
    "mean_pi_width_norm", "mean_winkler_norm", "local_cov_k10", "local_cov_k20", "local_cov_k50",
    "n_uninformative", "n_test", "error",
]
METRIC_COLUMNS = RESULT_COLUMNS[5:15]
INTERVAL_COLUMNS = ["t", "y", "y_hat", "lower", "upper", "covered", "informative", "regime", "method", "alpha"]


class ConfigError(ValueError):
    pass


@dataclass
class MethodSpec:
    name: str
    variant: Variant
    params: Dict[str, Any] = field(default_factory=dict)
    train: Dict[str, Any] = field(default_factory=dict)
    adaptive: Optional[Dict[str, Any]] = None
    grid: Optional[Dict[str, List[Any]]] = None
    adaptive_grid: Optional[Dict[str, List[Any]]] = None

    def method_config(self, alpha: float, overrides: Optional[Dict[str, Any]] = None) -> MethodConfig:
        params = {**self.params, **{k: v for k, v in (overrides or {}).items() if k in METHOD_FIELDS}}
        return MethodConfig(self.variant, alpha, **params)

    def train_config(self, seed: int, overrides: Optional[Dict[str, Any]] = None) -> TrainConfig:
        params = {**self.train, **{k: v for k, v in (overrides or {}).items() if k in TRAIN_FIELDS}}
        params["seed"] = seed
        return TrainConfig(**params)

    def grid_points(self) -> List[Dict[str, Any]]:
        grid = DEFAULT_GRIDS[self.variant] if self.grid is None else self.grid
        if not grid:
            return [{}]
        keys = list(grid)
        return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


@dataclass
class ExperimentConfig:
    master_seed: int = 0
    seeds: List[int] = field(default_factory=lambda: list(range(DEFAULT_SEEDS)))
    synthetic: Optional[Dict[str, Any]] = field(default_factory=dict)
    csv_paths: List[str] = field(default_factory=list)
    base_model: str = "ridge"
    ridge_lambda: float = 1.0
    split: Tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    alphas: List[float] = field(default_factory=lambda: list(DEFAULT_ALPHAS))
    window_sizes: List[int] = field(default_factory=lambda: list(WINDOW_SIZES))
    local_coverage_rolling: bool = False
    methods: List[MethodSpec] = field(default_factory=list)
    output: str = "results"

    def __post_init__(self):
        if not self.methods:
            self.methods = default_methods()
        if not self.seeds:
            raise ConfigError("need at least one seed")
        if any(not 0 < a < 1 for a in self.alphas) or not self.alphas:
            raise ConfigError("alphas must lie in (0, 1)")
        if len(self.split) != 3 or any(f <= 0 for f in self.split) or sum(self.split) > 1 + 1e-9:
            raise ConfigError(f"split fractions must be three positive numbers summing to <= 1, got {self.split}")
        if self.base_model not in ("ridge", "file"):
            raise ConfigError("base_model must be 'ridge' or 'file'")
        if self.synthetic is None and not self.csv_paths:
            raise ConfigError("data needs a synthetic config or csv paths")
        names = [m.name for m in self.methods]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate method names in {names}")


def default_methods() -> List[MethodSpec]:
    return [MethodSpec(v.value, v) for v in (Variant.HOPCPT, Variant.SPLIT, Variant.NEXCP, Variant.ENBPI, Variant.KNN)]


def _method_from_dict(raw: Dict[str, Any]) -> MethodSpec:
    raw = dict(raw)
    try:
        variant = Variant(raw.pop("variant", raw.get("name")))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    name = raw.pop("name", variant.value)
    params = raw.pop("params", {}) or {}
    train_params = raw.pop("train", {}) or {}
    bad = (set(params) - METHOD_FIELDS) | (set(train_params) - TRAIN_FIELDS)
    if bad:
        raise ConfigError(f"method {name}: unknown parameters {sorted(bad)}")
    spec = MethodSpec(name, variant, params, train_params, raw.pop("adaptive", None),
                      raw.pop("grid", None), raw.pop("adaptive_grid", None))
    if raw:
        raise ConfigError(f"method {name}: unknown keys {sorted(raw)}")
    try:
        spec.method_config(0.1)
        if variant is Variant.HOPCPT:
            spec.train_config(0)
        if spec.adaptive is not None:
            AdaptiveState(0.1, **spec.adaptive)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"method {name}: {exc}") from exc
    return spec


def config_from_dict(raw: Dict[str, Any]) -> ExperimentConfig:
    raw = dict(raw or {})
    version = raw.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version}")
    kwargs: Dict[str, Any] = {}
    if "master_seed" in raw:
        kwargs["master_seed"] = int(raw.pop("master_seed"))
    if "seeds" in raw:
        seeds = raw.pop("seeds")
        kwargs["seeds"] = list(range(int(seeds))) if isinstance(seeds, int) else [int(s) for s in seeds]
    data = dict(raw.pop("data", {}) or {})
    if "csv" in data:
        paths = data.pop("csv")
        kwargs["csv_paths"] = [paths] if isinstance(paths, str) else list(paths)
        kwargs["synthetic"] = None
        data.pop("synthetic", None)
    elif "synthetic" in data:
        kwargs["synthetic"] = dict(data.pop("synthetic") or {})
    for key in ("base_model", "ridge_lambda"):
        if key in data:
            kwargs[key] = data.pop(key)
    if data:
        raise ConfigError(f"unknown data keys {sorted(data)}")
    if "split" in raw:
        kwargs["split"] = tuple(float(f) for f in raw.pop("split"))
    if "alphas" in raw:
        kwargs["alphas"] = [float(a) for a in raw.pop("alphas")]
    if "window_sizes" in raw:
        kwargs["window_sizes"] = [int(k) for k in raw.pop("window_sizes")]
    for key in ("local_coverage_rolling", "output"):
        if key in raw:
            kwargs[key] = raw.pop(key)
    if "methods" in raw:
        kwargs["methods"] = [_method_from_dict(m) for m in raw.pop("methods")]
    if raw:
        raise ConfigError(f"unknown config keys {sorted(raw)}")
    if kwargs.get("synthetic"):
        try:
            RegimeSeriesConfig(**{k: v for k, v in kwargs["synthetic"].items() if v is not None})
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"synthetic: {exc}") from exc
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    return config_from_dict(raw)


# ---------------------------------------------------------------- data


def prepare_datasets(config: ExperimentConfig, seed: int) -> List[Tuple[TimeSeriesDataset, SplitSpec]]:
    """Datasets with base-model predictions and their splits for one run seed."""
    if config.synthetic is not None:
        params = dict(config.synthetic)
        if params.get("seed") is None:
            params["seed"] = stream_seed(config.master_seed, seed, "data")
        raw = [generate_regime_series(RegimeSeriesConfig(**params))]
    else:
        raw = [read_csv(p) for p in config.csv_paths]
    out = []
    for ds in raw:
        split = SplitSpec.from_fractions(len(ds), config.split)
        if config.base_model == "ridge" or ds.predictions is None:
            model = ridge_fit(ds.features[split.train], ds.targets[split.train], config.ridge_lambda)
            ds = ds.with_predictions(ridge_predict(model, ds.features))
        out.append((ds, split))
    return out


# ---------------------------------------------------------------- results


@dataclass
class CellResult:
    seed: int
    method: str
    series: str
    alpha: float
    report: Optional[EvalReport] = None
    intervals: Optional[List[PredictionInterval]] = None
    error: str = ""

    def row(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {"seed": self.seed, "method": self.method, "series": self.series,
                               "alpha": self.alpha, "status": "ok" if self.report else "error",
                               "error": self.error}
        if self.report is not None:
            r = self.report
            row.update(delta_cov=r.delta_cov, mean_pi_width=r.mean_pi_width, mean_winkler=r.mean_winkler,
                       mean_pi_width_norm=r.mean_pi_width_norm, mean_winkler_norm=r.mean_winkler_norm,
                       n_uninformative=r.n_uninformative, n_test=r.n_test)
            for k in (10, 20, 50):
                row[f"local_cov_k{k}"] = r.local_coverage.get(k, float("nan"))
        return row


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def csv_text(rows: Sequence[Dict[str, Any]], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c, "")) for c in columns])
    return buf.getvalue()


def write_csv_rows(path, rows, columns) -> None:
    with atomic_writer(path) as fh:
        fh.write(csv_text(rows, columns))


def summarize(rows: Sequence[Dict[str, Any]]) -> List[Dict[str, Any]]:
    """Mean and population std over seeds per (method, series, alpha); failed cells are counted."""
    groups: Dict[Tuple[str, str, float], List[Dict[str, Any]]] = {}
    for row in rows:
        groups.setdefault((row["method"], row["series"], row["alpha"]), []).append(row)
    out = []
    for (method, series, alpha), members in groups.items():
        ok = [r for r in members if r["status"] == "ok"]
        entry: Dict[str, Any] = {"method": method, "series": series, "alpha": alpha,
                                 "n_seeds": len(ok), "n_failed": len(members) - len(ok)}
        for col in METRIC_COLUMNS:
            vals = np.array([float(r[col]) for r in ok], dtype=np.float64)
            if vals.size == 0:
                mean = std = float("nan")
            elif np.all(vals == vals[0]):
                mean, std = float(vals[0]), 0.0
            else:
                mean = float(np.mean(vals))
                std = float(np.std(vals)) if np.all(np.isfinite(vals)) else float("nan")
            entry[f"{col}_mean"], entry[f"{col}_std"] = mean, std
        out.append(entry)
    return out


SUMMARY_COLUMNS = ["method", "series", "alpha", "n_seeds", "n_failed"] + [
    f"{c}_{s}" for c in METRIC_COLUMNS for s in ("mean", "std")
]


def interval_rows(dataset: TimeSeriesDataset, split: SplitSpec, intervals: Sequence[PredictionInterval],
                  method: str, alpha: float) -> List[Dict[str, Any]]:
    test = range(split.test.start, split.test.stop)
    y = dataset.targets[split.test]
    covered = covered_flags(intervals, y)
    rows = []
    for j, t in enumerate(test):
        rows.append({
            "t": int(dataset.timestamps[t]), "y": float(dataset.targets[t]),
            "y_hat": float(dataset.predictions[t]), "lower": intervals[j].lower, "upper": intervals[j].upper,
            "covered": int(covered[j]), "informative": int(intervals[j].informative),
            "regime": "" if dataset.regime is None else int(dataset.regime[t]),
            "method": method, "alpha": alpha,
        })
    return rows


def read_interval_file(path) -> Tuple[str, float, List[PredictionInterval], np.ndarray]:
    """(method, alpha, intervals, targets) from a per-step interval CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: no interval rows")
    alpha = float(rows[0]["alpha"])
    intervals = [PredictionInterval(float(r["lower"]), float(r["upper"]), alpha, r["informative"] == "1")
                 for r in rows]
    return rows[0]["method"], alpha, intervals, np.array([float(r["y"]) for r in rows])


# ---------------------------------------------------------------- run


def _adaptive_state(spec: MethodSpec, alpha: float, overrides: Optional[Dict[str, Any]] = None):
    params = dict(spec.adaptive or {})
    params.update(overrides or {})
    if not params:
        return None
    return AdaptiveState(alpha_target=alpha, **params)


def _evaluate_cell(config: ExperimentConfig, ds, split, intervals, alpha) -> EvalReport:
    sizes = [k for k in config.window_sizes if k <= split.test.stop - split.test.start]
    return evaluate(intervals, ds.targets[split.test], alpha, sizes, config.local_coverage_rolling)


def _train_hopcpt(config: ExperimentConfig, spec: MethodSpec, seed: int, ds, split,
                  overrides: Optional[Dict[str, Any]] = None) -> TrainResult:
    tcfg = spec.train_config(stream_seed(config.master_seed, seed, spec.name, "train"), overrides)
    return train(ds, split, tcfg, alphas=config.alphas)


def run_seed(config: ExperimentConfig, seed: int, keep_intervals: bool = True) -> List[Tuple[CellResult, Any]]:
    """Every (method, series, alpha) cell for one run seed; failures become error cells."""
    out = []
    try:
        data = prepare_datasets(config, seed)
    except Exception as exc:  # noqa: BLE001 - a bad seed must not kill the run
        log.error("seed %s: data preparation failed: %s", seed, exc)
        return [(CellResult(seed, m.name, "?", a, error=f"data: {exc}"), None)
                for m in config.methods for a in config.alphas]
    for ds, split in data:
        for spec in config.methods:
            trained, train_error = None, ""
            for alpha in config.alphas:
                cell = CellResult(seed, spec.name, ds.name, alpha)
                try:
                    model = None
                    if spec.variant is Variant.HOPCPT:
                        if train_error:
                            raise RuntimeError(train_error)
                        if trained is None:
                            try:
                                trained = _train_hopcpt(config, spec, seed, ds, split)
                            except Exception as exc:
                                train_error = f"training: {type(exc).__name__}: {exc}"
                                raise
                        model = trained.models[alpha]
                    intervals = run_method(ds, split, spec.method_config(alpha), _adaptive_state(spec, alpha), model,
                                           rng_seed=stream_seed(config.master_seed, seed, spec.name, f"sample-{alpha!r}"))
                    cell.report = _evaluate_cell(config, ds, split, intervals, alpha)
                    cell.intervals = intervals if keep_intervals else None
                except Exception as exc:  # noqa: BLE001
                    log.error("seed %s %s alpha=%s failed: %s", seed, spec.name, alpha, exc)
                    cell.error = train_error or f"{type(exc).__name__}: {exc}"
                out.append((cell, (ds, split)))
    return out


def _interval_path(out_dir: Path, cell: CellResult) -> Path:
    return out_dir / "intervals" / cell.series / f"seed{cell.seed}_{cell.method}_alpha{cell.alpha!r}.csv"


def _map_seeds(fn, config, seeds, jobs):
    if jobs <= 1 or len(seeds) <= 1:
        return [fn(config, s) for s in seeds]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, [config] * len(seeds), seeds))


def _write_cells(out_dir: Path, cells) -> List[Dict[str, Any]]:
    rows = []
    for cell, data in cells:
        rows.append(cell.row())
        if cell.intervals is not None:
            ds, split = data
            write_csv_rows(_interval_path(out_dir, cell),
                           interval_rows(ds, split, cell.intervals, cell.method, cell.alpha), INTERVAL_COLUMNS)
    return rows


def run_experiment(config: ExperimentConfig, out_dir=None, jobs: int = 1) -> Tuple[List[Dict[str, Any]], List[Dict[str, Any]]]:
    """Run every seed and write ``results.csv``, ``summary.csv`` and interval files.

    Returns (per-seed rows, summary rows).
    """
    out_dir = Path(out_dir or config.output)
    per_seed = _map_seeds(run_seed, config, config.seeds, jobs)
    rows = []
    for cells in per_seed:
        rows.extend(_write_cells(out_dir, cells))
    summary = summarize(rows)
    write_csv_rows(out_dir / "results.csv", rows, RESULT_COLUMNS)
    write_csv_rows(out_dir / "summary.csv", summary, SUMMARY_COLUMNS)
    return rows, summary


# ---------------------------------------------------------------- grid

GRID_COLUMNS = ["seed", "method", "series", "alpha", "stage", "point", "params", "val_delta_cov",
                "val_pi_width", "selected", "error"]


def _validation_slices(spec: MethodSpec, split: SplitSpec, point: Dict[str, Any]) -> Tuple[slice, slice]:
    start, stop = split.calib.start, split.calib.stop
    if spec.variant is Variant.ENBPI:
        k = int(point.get("enbpi_window", spec.params.get("enbpi_window", 100)))
        if stop - start - k < 1:
            raise ValueError(f"window {k} leaves no calibration steps for validation")
        return slice(start, start + k), slice(start + k, stop)
    half = (stop - start) // 2
    return slice(start, start + half), slice(start + half, stop)


def _validate_point(config, spec, seed, ds, split, alpha, point, adaptive_point=None, trained=None):
    """(delta_cov, width) on the validation part for one grid point."""
    if spec.variant is Variant.HOPCPT and adaptive_point is None:
        return trained.trace[trained.selected_epoch[alpha] - 1].validation[alpha]
    calib, val = _validation_slices(spec, split, point)
    model = trained.models[alpha] if trained is not None else None
    intervals = run_method(ds, split, spec.method_config(alpha, point), _adaptive_state(spec, alpha, adaptive_point),
                           model, rng_seed=stream_seed(config.master_seed, seed, spec.name, f"val-{alpha!r}"),
                           calib=calib, test=val)
    y = ds.targets[val]
    widths = np.array([iv.width for iv in intervals])
    return alpha - float(np.mean(~covered_flags(intervals, y))), float(np.mean(widths))


def grid_seed(config: ExperimentConfig, seed: int):
    """Grid rows and final cells for one run seed."""
    grid_rows: List[Dict[str, Any]] = []
    cells = []
    for ds, split in prepare_datasets(config, seed):
        for spec in config.methods:
            points = spec.grid_points()
            trained_points: Dict[int, Any] = {}
            for alpha in config.alphas:
                base = {"seed": seed, "method": spec.name, "series": ds.name, "alpha": alpha}
                candidates, rows = [], []
                for p_idx, point in enumerate(points):
                    row = {**base, "stage": "params", "point": p_idx, "params": _params_text(point), "selected": 0, "error": ""}
                    try:
                        trained = None
                        if spec.variant is Variant.HOPCPT:
                            if p_idx not in trained_points:
                                trained_points[p_idx] = _train_hopcpt(config, spec, seed, ds, split, point)
                            trained = trained_points[p_idx]
                        dcov, width = _validate_point(config, spec, seed, ds, split, alpha, point, trained=trained)
                    except Exception as exc:  # noqa: BLE001
                        row["error"] = f"{type(exc).__name__}: {exc}"
                        dcov, width = -math.inf, math.inf
                    row.update(val_delta_cov=dcov, val_pi_width=width)
                    candidates.append((dcov, width))
                    rows.append(row)
                best = select_model(candidates)
                rows[best]["selected"] = 1
                grid_rows.extend(rows)
                point = points[best]
                adaptive_point = None
                if spec.adaptive_grid:
                    adaptive_point = _adaptive_search(config, spec, seed, ds, split, alpha, point,
                                                      trained_points.get(best), base, grid_rows)
                cell = CellResult(seed, spec.name, ds.name, alpha)
                try:
                    if rows[best]["error"]:
                        raise RuntimeError("every grid point failed")
                    model = trained_points[best].models[alpha] if spec.variant is Variant.HOPCPT else None
                    intervals = run_method(ds, split, spec.method_config(alpha, point),
                                           _adaptive_state(spec, alpha, adaptive_point), model,
                                           rng_seed=stream_seed(config.master_seed, seed, spec.name, f"sample-{alpha!r}"))
                    cell.report = _evaluate_cell(config, ds, split, intervals, alpha)
                    cell.intervals = intervals
                except Exception as exc:  # noqa: BLE001
                    cell.error = f"{type(exc).__name__}: {exc}"
                cells.append((cell, (ds, split)))
    return grid_rows, cells


def _adaptive_search(config, spec, seed, ds, split, alpha, point, trained, base, grid_rows):
    grid = spec.adaptive_grid
    keys = list(grid)
    combos = [dict(zip(keys, c)) for c in itertools.product(*(grid[k] for k in keys))]
    candidates = []
    rows = []
    for a_idx, combo in enumerate(combos):
        row = {**base, "stage": "adaptive", "point": a_idx, "params": _params_text({**point, **combo}),
               "selected": 0, "error": ""}
        try:
            dcov, width = _validate_point(config, spec, seed, ds, split, alpha, point, combo, trained)
        except Exception as exc:  # noqa: BLE001
            row["error"] = f"{type(exc).__name__}: {exc}"
            dcov, width = -math.inf, math.inf
        row.update(val_delta_cov=dcov, val_pi_width=width)
        candidates.append((dcov, width))
        rows.append(row)
    best = select_model(candidates)
    rows[best]["selected"] = 1
    grid_rows.extend(rows)
    return combos[best]


def _params_text(point: Dict[str, Any]) -> str:
    return ";".join(f"{k}={point[k]}" for k in sorted(point))


def grid_experiment(config: ExperimentConfig, out_dir=None, jobs: int = 1):
    """Grid search per seed and alpha, then final test metrics of the winners.

    Writes ``grid.csv`` (every grid point with its validation metrics and a
    ``selected`` flag), ``results.csv`` and ``summary.csv``.
    """
    out_dir = Path(out_dir or config.output)
    per_seed = _map_seeds(grid_seed, config, config.seeds, jobs)
    grid_rows, rows = [], []
    for g_rows, cells in per_seed:
        grid_rows.extend(g_rows)
        rows.extend(_write_cells(out_dir, cells))
    summary = summarize(rows)
    write_csv_rows(out_dir / "grid.csv", grid_rows, GRID_COLUMNS)
    write_csv_rows(out_dir / "results.csv", rows, RESULT_COLUMNS)
    write_csv_rows(out_dir / "summary.csv", summary, SUMMARY_COLUMNS)
    return grid_rows, rows, summary


# ---------------------------------------------------------------- eval

EVAL_COLUMNS = ["file", "method", "alpha"] + [c for c in RESULT_COLUMNS[5:15]]


def eval_files(paths: Sequence[Path], window_sizes=WINDOW_SIZES, rolling: bool = False) -> List[Dict[str, Any]]:
    rows = []
    for path in paths:
        method, alpha, intervals, y = read_interval_file(path)
        report = evaluate(intervals, y, alpha, [k for k in window_sizes if k <= y.size], rolling)
        row = CellResult(0, method, "", alpha, report).row()
        row["file"] = str(path)
        rows.append(row)
    return rows
