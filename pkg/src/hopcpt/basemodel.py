"""Base point predictor (closed-form ridge) and the two-regime synthetic series."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .core import TimeSeriesDataset
from .seeding import make_rng

REGIME_LOW = 0
REGIME_HIGH = 1


class RidgeFitError(RuntimeError):
    pass


@dataclass(frozen=True)
class RidgeModel:
    coefficients: np.ndarray
    intercept: float
    lam: float

    def __post_init__(self):
        w = np.asarray(self.coefficients, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(w)) or not np.isfinite(self.intercept):
            raise ValueError("ridge coefficients must be finite")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "coefficients", w)


def ridge_fit(features, targets, lam: float = 1.0) -> RidgeModel:
    """Ridge regression with an unpenalized intercept.

    Solves ``(Xc^T Xc + lam I) w = Xc^T yc`` on mean-centered data by a
    Cholesky factorization; the intercept restores the means.
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    y = np.asarray(targets, dtype=np.float64).reshape(-1)
    n, m = x.shape
    if y.size != n:
        raise ValueError(f"{n} feature rows vs {y.size} targets")
    if n < m or m < 1:
        raise ValueError(f"need n >= m >= 1, got n={n}, m={m}")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    x_mean, y_mean = x.mean(axis=0), y.mean()
    xc, yc = x - x_mean, y - y_mean
    gram = xc.T @ xc + lam * np.eye(m)
    try:
        factor = linalg.cho_factor(gram, lower=True, check_finite=True)
        w = linalg.cho_solve(factor, xc.T @ yc)
    except linalg.LinAlgError as exc:
        raise RidgeFitError(f"normal equations are singular (lambda={lam})") from exc
    return RidgeModel(w, float(y_mean - x_mean @ w), float(lam))


def ridge_predict(model: RidgeModel, features) -> np.ndarray:
    x = np.asarray(features, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if x.shape[1] != model.coefficients.size:
        raise ValueError(f"model expects {model.coefficients.size} features, got {x.shape[1]}")
    return x @ model.coefficients + model.intercept


@dataclass(frozen=True)
class RegimeSeriesConfig:
    """Alternating low/high-noise regimes with random lengths.

    The low regime has ``x = x_low`` and Gaussian noise with standard
    deviation ``x / 2``; the high regime has ``x = x_high`` and noise uniform
    on ``[-x, x]``. Targets are ``base_level + x + noise``. The series always
    starts in the low regime.
    """

    total_steps: int = 1000
    x_low: float = 3.0
    x_high: float = 21.0
    regime_len_min: int = 1
    regime_len_max: int = 25
    base_level: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.regime_len_min < 1 or self.regime_len_max < self.regime_len_min:
            raise ValueError("need 1 <= regime_len_min <= regime_len_max")
        if self.total_steps < 3:
            raise ValueError("total_steps must be at least 3")


def generate_regime_series(config: RegimeSeriesConfig, name: str = "synthetic") -> TimeSeriesDataset:
    rng = make_rng(config.seed)
    x = np.empty(config.total_steps)
    noise = np.empty(config.total_steps)
    regime = np.empty(config.total_steps, dtype=np.int64)
    pos, current = 0, REGIME_LOW
    while pos < config.total_steps:
        length = int(rng.integers(config.regime_len_min, config.regime_len_max + 1))
        end = min(pos + length, config.total_steps)
        size = end - pos
        if current == REGIME_LOW:
            level = config.x_low
            noise[pos:end] = rng.normal(0.0, level / 2.0, size)
        else:
            level = config.x_high
            noise[pos:end] = rng.uniform(-level, level, size)
        x[pos:end] = level
        regime[pos:end] = current
        pos, current = end, 1 - current
    y = config.base_level + x + noise
    return TimeSeriesDataset(x.reshape(-1, 1), y, name=name, regime=regime)
