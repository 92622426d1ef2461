"""Shared data model: datasets, splits, intervals and weight vectors."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

PathLike = Union[str, Path]

WEIGHT_SUM_TOL = 1e-9


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def compute_errors(targets, predictions) -> np.ndarray:
    """Signed errors ``targets - predictions`` of a point predictor."""
    y = _as_vector(targets, "targets")
    y_hat = _as_vector(predictions, "predictions")
    if y.size != y_hat.size:
        raise ValueError(f"length mismatch: {y.size} targets vs {y_hat.size} predictions")
    if y.size == 0:
        raise ValueError("need at least one target")
    return y - y_hat


@dataclass(frozen=True)
class WeightVector:
    """Nonnegative weights summing to one."""

    weights: np.ndarray

    def __post_init__(self):
        w = _as_vector(self.weights, "weights")
        if w.size == 0:
            raise ValueError("empty weight vector")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and nonnegative")
        if abs(float(w.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {w.sum()!r}, expected 1")
        object.__setattr__(self, "weights", _frozen(w))

    def __len__(self) -> int:
        return self.weights.size

    @classmethod
    def uniform(cls, n: int) -> "WeightVector":
        return cls(np.full(n, 1.0 / n))


def normalize_weights(raw) -> WeightVector:
    """Scale nonnegative raw weights so they sum to one."""
    w = _as_vector(raw, "raw")
    if w.size == 0 or not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValueError("raw weights must be non-empty, finite and nonnegative")
    total = w.sum()
    if total <= 0:
        raise ValueError("at least one raw weight must be positive")
    return WeightVector(w / total)


@dataclass(frozen=True)
class PredictionInterval:
    """Closed interval ``[lower, upper]`` at miscoverage ``alpha``.

    ``informative`` is False when a bound came from the unbounded quantile
    sentinel; such intervals have infinite bounds on that side.
    """

    lower: float
    upper: float
    alpha: float
    informative: bool = True

    def __post_init__(self):
        for name in ("lower", "upper", "alpha"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "informative", bool(self.informative))
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if math.isnan(self.lower) or math.isnan(self.upper):
            raise ValueError("interval bounds must not be NaN")
        if self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def covers(self, y: float) -> bool:
        return self.lower <= y <= self.upper


@dataclass(frozen=True)
class SplitSpec:
    """Contiguous train / calibration / test index boundaries (end-exclusive)."""

    train_end: int
    calib_end: int
    test_end: int

    def __post_init__(self):
        if not 0 < self.train_end < self.calib_end < self.test_end:
            raise ValueError(f"invalid split {self}")

    def validate_for(self, n: int) -> None:
        if self.test_end > n:
            raise ValueError(f"split ends at {self.test_end} but series has {n} steps")

    @property
    def train(self) -> slice:
        return slice(0, self.train_end)

    @property
    def calib(self) -> slice:
        return slice(self.train_end, self.calib_end)

    @property
    def test(self) -> slice:
        return slice(self.calib_end, self.test_end)

    @classmethod
    def from_fractions(cls, n: int, fractions: Sequence[float] = (1 / 3, 1 / 3, 1 / 3)) -> "SplitSpec":
        """Split ``n`` steps by fractions; the test segment absorbs rounding."""
        if len(fractions) != 3 or any(f <= 0 for f in fractions) or sum(fractions) > 1 + 1e-9:
            raise ValueError(f"bad split fractions {fractions}")
        train_end = int(round(n * fractions[0]))
        calib_end = int(round(n * (fractions[0] + fractions[1])))
        if sum(fractions) >= 1 - 1e-9:
            test_end = n
        else:
            test_end = int(round(n * sum(fractions)))
        return cls(train_end, calib_end, test_end)


@dataclass(frozen=True)
class TimeSeriesDataset:
    """One aligned series: features, targets, optional base predictions and errors.

    ``predictions`` and ``errors`` are both None until a base model has been
    applied (see ``with_predictions``).
    """

    features: np.ndarray
    targets: np.ndarray
    predictions: Optional[np.ndarray] = None
    errors: Optional[np.ndarray] = None
    timestamps: Optional[np.ndarray] = None
    name: str = "series"
    regime: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        y = _as_vector(self.targets, "targets")
        n = y.size
        if n < 1:
            raise ValueError("dataset needs at least one step")
        x = np.asarray(self.features, dtype=np.float64)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.ndim != 2 or x.shape[0] != n:
            raise ValueError(f"features shape {x.shape} does not match {n} targets")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("features and targets must be finite")

        ts = np.arange(n, dtype=np.int64) if self.timestamps is None else np.asarray(self.timestamps)
        if ts.shape != (n,) or not np.issubdtype(ts.dtype, np.integer):
            raise ValueError("timestamps must be an integer vector matching the targets")
        if n > 1 and np.any(np.diff(ts) <= 0):
            raise ValueError("timestamps must be strictly increasing")

        pred = err = None
        if self.predictions is not None:
            pred = _as_vector(self.predictions, "predictions")
            if pred.size != n or not np.all(np.isfinite(pred)):
                raise ValueError("predictions must be finite and match the targets")
            err = compute_errors(y, pred)
            if self.errors is not None and not np.array_equal(_as_vector(self.errors, "errors"), err):
                raise ValueError("errors must equal targets - predictions")
        elif self.errors is not None:
            raise ValueError("errors given without predictions")

        for name, value in (("features", x), ("targets", y), ("timestamps", ts)):
            object.__setattr__(self, name, _frozen(value))
        object.__setattr__(self, "predictions", None if pred is None else _frozen(pred))
        object.__setattr__(self, "errors", None if err is None else _frozen(err))
        if self.regime is not None:
            object.__setattr__(self, "regime", _frozen(np.asarray(self.regime)))

    def __len__(self) -> int:
        return self.targets.size

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def with_predictions(self, predictions) -> "TimeSeriesDataset":
        return TimeSeriesDataset(
            features=self.features,
            targets=self.targets,
            predictions=predictions,
            timestamps=self.timestamps,
            name=self.name,
            regime=self.regime,
        )


def read_csv(path: PathLike, name: Optional[str] = None) -> TimeSeriesDataset:
    """Load a series from the CSV layout ``t, y, y_hat, x0..x{m-1}``.

    Extra columns are ignored except ``regime``, which is kept as a diagnostic.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = {"t", "y", "y_hat"} - set(header)
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        x_cols = sorted((c for c in header if c.startswith("x") and c[1:].isdigit()), key=lambda c: int(c[1:]))
        if [int(c[1:]) for c in x_cols] != list(range(len(x_cols))) or not x_cols:
            raise ValueError(f"{path}: feature columns must be x0..x(m-1)")
        rows = list(reader)

    def parse(row_no: int, col: str, value: Optional[str]) -> float:
        if value is None or value.strip() == "":
            raise ValueError(f"{path}: missing value in column {col!r}, data row {row_no}")
        out = float(value)
        if not math.isfinite(out):
            raise ValueError(f"{path}: non-finite value in column {col!r}, data row {row_no}")
        return out

    t = np.array([int(r["t"]) for r in rows], dtype=np.int64)
    y = np.array([parse(i, "y", r["y"]) for i, r in enumerate(rows, 1)])
    y_hat = np.array([parse(i, "y_hat", r["y_hat"]) for i, r in enumerate(rows, 1)])
    x = np.array([[parse(i, c, r[c]) for c in x_cols] for i, r in enumerate(rows, 1)]).reshape(len(rows), len(x_cols))
    regime = None
    if "regime" in header:
        regime = np.array([int(r["regime"]) for r in rows], dtype=np.int64)
    return TimeSeriesDataset(x, y, y_hat, timestamps=t, name=name or path.stem, regime=regime)


def write_csv(dataset: TimeSeriesDataset, path: PathLike) -> None:
    """Write ``dataset`` in the CSV layout read by ``read_csv`` (atomically)."""
    from .io import atomic_writer

    if dataset.predictions is None:
        raise ValueError("dataset has no predictions to write")
    m = dataset.n_features
    header = ["t", "y", "y_hat"] + [f"x{j}" for j in range(m)]
    if dataset.regime is not None:
        header.append("regime")
    with atomic_writer(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i in range(len(dataset)):
            row = [int(dataset.timestamps[i]), repr(float(dataset.targets[i])), repr(float(dataset.predictions[i]))]
            row += [repr(float(v)) for v in dataset.features[i]]
            if dataset.regime is not None:
                row.append(int(dataset.regime[i]))
            writer.writerow(row)
