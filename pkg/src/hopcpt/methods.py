"""Conformal interval constructors and the online test-segment driver."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np

from .core import PredictionInterval, SplitSpec, TimeSeriesDataset, WeightVector
from .hopfield.inference import QuantileMode, default_n_draws, interval_offsets, retrieval_weights
from .hopfield.network import HopfieldModel
from .hopfield.training import INPUT_SETS, encoder_inputs
from .quantile import (
    UNBOUNDED,
    QuantileResult,
    conformal_quantile,
    empirical_quantile,
    upper_order_statistic,
    weighted_quantile_with_inf,
)

NEXCP_RHO_GRID = (0.999, 0.995, 0.993, 0.99, 0.98, 0.95, 0.90)
ENBPI_WINDOW_GRID = (200, 150, 125, 100, 75, 50, 25, 10)
KNN_SHARE_GRID = (0.025, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35)
ADAPTIVE_GAMMA_GRID = (0.002, 0.005, 0.01, 0.02)
HOPCPT_GRID = {"learning_rate": (0.01, 0.001), "dropout": (0.0, 0.25, 0.5), "use_time_encoding": (True, False)}

ALPHA_MIN, ALPHA_MAX = 0.001, 0.999
MOMENTUM_DECAY = 0.95


class Variant(str, enum.Enum):
    HOPCPT = "HopCPT"
    SPLIT = "SplitCP"
    NEXCP = "NexCP"
    ENBPI = "EnbPI"
    KNN = "KnnCP"


class Memory(str, enum.Enum):
    CALIB_AND_TEST = "calib+test"
    CALIB = "calib"


@dataclass(frozen=True)
class MethodConfig:
    variant: Variant
    alpha: float = 0.1
    nexcp_rho: float = 0.99
    enbpi_window: int = 100
    knn_top_share: float = 0.1
    hopcpt_quantile_mode: QuantileMode = QuantileMode.SAMPLED
    hopcpt_n_draws: Optional[int] = None
    hopcpt_memory: Memory = Memory.CALIB_AND_TEST
    inputs: str = "features+prediction"

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "hopcpt_quantile_mode", QuantileMode(self.hopcpt_quantile_mode))
        object.__setattr__(self, "hopcpt_memory", Memory(self.hopcpt_memory))
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0.0 < self.nexcp_rho <= 1.0:
            raise ValueError("nexcp_rho must lie in (0, 1]")
        if self.enbpi_window < 1:
            raise ValueError("enbpi_window must be >= 1")
        if not 0.0 < self.knn_top_share <= 1.0:
            raise ValueError("knn_top_share must lie in (0, 1]")
        if self.hopcpt_n_draws is not None and self.hopcpt_n_draws < 1:
            raise ValueError("hopcpt_n_draws must be >= 1")
        if self.inputs not in INPUT_SETS:
            raise ValueError(f"inputs must be one of {INPUT_SETS}")


class AdaptiveMode(str, enum.Enum):
    SIMPLE = "simple"
    MOMENTUM = "momentum"


@dataclass(frozen=True)
class AdaptiveState:
    """Online miscoverage level fed to a wrapped method.

    ``miss_avg`` is the exponentially weighted miss rate used by the
    momentum mode; it starts at the target level.
    """

    alpha_target: float
    alpha_current: Optional[float] = None
    gamma: float = 0.005
    mode: AdaptiveMode = AdaptiveMode.SIMPLE
    miss_avg: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.alpha_target < 1.0:
            raise ValueError("alpha_target must lie in (0, 1)")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        object.__setattr__(self, "mode", AdaptiveMode(self.mode))
        current = self.alpha_target if self.alpha_current is None else self.alpha_current
        object.__setattr__(self, "alpha_current", min(max(current, ALPHA_MIN), ALPHA_MAX))
        if self.miss_avg is None:
            object.__setattr__(self, "miss_avg", self.alpha_target)


def adaptive_update(state: AdaptiveState, covered: bool) -> AdaptiveState:
    miss = 0.0 if covered else 1.0
    if state.mode is AdaptiveMode.MOMENTUM:
        avg = MOMENTUM_DECAY * state.miss_avg + (1.0 - MOMENTUM_DECAY) * miss
        signal = avg
    else:
        avg = state.miss_avg
        signal = miss
    alpha = state.alpha_current + state.gamma * (state.alpha_target - signal)
    return replace(state, alpha_current=min(max(alpha, ALPHA_MIN), ALPHA_MAX), miss_avg=avg)


def _interval(prediction: float, lower: QuantileResult, upper: QuantileResult, alpha: float) -> PredictionInterval:
    if lower is UNBOUNDED:
        return PredictionInterval(-math.inf, math.inf, alpha, informative=False)
    if upper is UNBOUNDED:
        return PredictionInterval(prediction + lower, math.inf, alpha, informative=False)
    return PredictionInterval(prediction + lower, prediction + upper, alpha)


def split_cp_interval(calib_abs_errors, prediction: float, alpha: float) -> PredictionInterval:
    """Symmetric split-conformal interval from absolute calibration errors."""
    q = conformal_quantile(np.abs(np.asarray(calib_abs_errors, dtype=np.float64)), alpha)
    if q is UNBOUNDED:
        return PredictionInterval(-math.inf, math.inf, alpha, informative=False)
    return PredictionInterval(prediction - q, prediction + q, alpha)


def split_cp_signed_interval(calib_errors, prediction: float, alpha: float) -> PredictionInterval:
    """Split CP on signed errors with uniform weights and the +inf test mass.

    Bounds are the ceil((n+1) tau)-th smallest errors at tau = alpha/2 and
    1 - alpha/2, computed by order statistics.
    """
    e = np.asarray(calib_errors, dtype=np.float64)
    n_total = e.size + 1
    return _interval(prediction, upper_order_statistic(e, alpha / 2, n_total),
                     upper_order_statistic(e, 1 - alpha / 2, n_total), alpha)


def nexcp_weights(n: int, rho: float):
    """Normalized decay weights for n past errors and the test-point mass.

    Raw weight of the i-th error (1-based, oldest first) is rho^(n+1-i);
    the test point has raw weight 1.
    """
    if n < 1:
        raise ValueError("need at least one error")
    raw = rho ** np.arange(n, 0, -1, dtype=np.float64)
    total = raw.sum() + 1.0
    return raw / total, 1.0 / total


def nexcp_interval(errors, prediction: float, alpha: float, rho: float) -> PredictionInterval:
    """Exponentially decayed weighted quantiles of the signed errors (newest last)."""
    e = np.asarray(errors, dtype=np.float64)
    if not 0.0 < rho <= 1.0:
        raise ValueError("rho must lie in (0, 1]")
    w, w_inf = nexcp_weights(e.size, rho)
    return _interval(prediction, weighted_quantile_with_inf(e, w, w_inf, alpha / 2),
                     weighted_quantile_with_inf(e, w, w_inf, 1 - alpha / 2), alpha)


def enbpi_interval(recent_errors, prediction: float, alpha: float) -> PredictionInterval:
    """Asymmetric empirical quantiles of a window of recent signed errors."""
    e = np.asarray(recent_errors, dtype=np.float64)
    return PredictionInterval(prediction + empirical_quantile(e, alpha / 2),
                              prediction + empirical_quantile(e, 1 - alpha / 2), alpha)


def knn_neighbors(history_features, query_features, k: int) -> np.ndarray:
    """Indices of the k history rows closest to the query after z-scoring.

    Standardization uses the history mean and standard deviation (constant
    columns keep scale 1); distance ties keep the earlier row.
    """
    h = np.asarray(history_features, dtype=np.float64)
    if h.ndim == 1:
        h = h.reshape(-1, 1)
    q = np.asarray(query_features, dtype=np.float64).reshape(-1)
    if h.shape[0] == 0:
        raise ValueError("empty history")
    sd = h.std(axis=0)
    sd[sd == 0] = 1.0
    # centering cancels in the difference; subtracting q first keeps exact ties exact
    d2 = (((h - q) / sd) ** 2).sum(axis=1)
    return np.argsort(d2, kind="stable")[:k]


def knn_cp_interval(history_features, history_errors, query_features, k_share: float,
                    prediction: float, alpha: float) -> PredictionInterval:
    e = np.asarray(history_errors, dtype=np.float64)
    k = max(1, math.ceil(k_share * e.size - e.size * 1e-12))
    idx = knn_neighbors(history_features, query_features, k)
    return enbpi_interval(e[idx], prediction, alpha)


def interval_from_weights(weights, errors, prediction: float, alpha: float,
                          mode=QuantileMode.ECDF, n_draws: Optional[int] = None,
                          rng_seed: int = 0) -> PredictionInterval:
    w = weights.weights if isinstance(weights, WeightVector) else WeightVector(weights).weights
    lo, hi = interval_offsets(w[None, :], errors, alpha, mode, n_draws, rng_seed)
    return PredictionInterval(prediction + lo[0], prediction + hi[0], alpha)


def hopcpt_interval(model: HopfieldModel, memory_inputs, memory_times, memory_errors, query_inputs,
                    query_time: int, prediction: float, alpha: float, total_T: float,
                    mode=QuantileMode.SAMPLED, n_draws: Optional[int] = None,
                    rng_seed: int = 0) -> PredictionInterval:
    """Interval for one query step from the errors of earlier memory steps."""
    if not isinstance(model, HopfieldModel):
        raise ValueError("hopcpt_interval needs a trained HopfieldModel")
    w = retrieval_weights(model, memory_inputs, memory_times, np.atleast_2d(query_inputs),
                          [query_time], total_T, causal=True)
    return interval_from_weights(w[0], memory_errors, prediction, alpha, mode, n_draws, rng_seed)


def run_method(dataset: TimeSeriesDataset, split: SplitSpec, config: MethodConfig,
               adaptive: Optional[AdaptiveState] = None, model: Optional[HopfieldModel] = None,
               rng_seed: int = 0, calib: Optional[slice] = None, test: Optional[slice] = None
               ) -> List[PredictionInterval]:
    """Intervals for every test step, revealing each test error after its step.

    ``calib`` and ``test`` override the split's segments (used for
    validation runs inside the calibration data). Returned intervals carry
    the target alpha even when an adaptive state moves the working level.
    """
    if dataset.errors is None:
        raise ValueError("dataset has no base-model errors")
    split.validate_for(len(dataset))
    calib = split.calib if calib is None else calib
    test = split.test if test is None else test
    err = np.asarray(dataset.errors)
    pred = np.asarray(dataset.predictions)
    y = np.asarray(dataset.targets)
    variant = config.variant
    n_cal = calib.stop - calib.start
    if n_cal < 1:
        raise ValueError("empty calibration segment")
    if variant is Variant.HOPCPT and model is None:
        raise ValueError("HopCPT needs a trained model")

    test_idx = np.arange(test.start, test.stop)
    offsets = None
    weights = None
    if variant in (Variant.HOPCPT, Variant.KNN):
        inputs = encoder_inputs(dataset, config.inputs)
    if variant is Variant.HOPCPT:
        if config.hopcpt_memory is Memory.CALIB:
            mem = np.arange(calib.start, calib.stop)
        else:
            mem = np.arange(calib.start, test.stop)
        ts = np.asarray(dataset.timestamps)
        weights = retrieval_weights(model, inputs[mem], ts[mem], inputs[test_idx], ts[test_idx],
                                    float(len(dataset)), causal=True)
        draws = config.hopcpt_n_draws
        if draws is None:
            draws = default_n_draws(int((weights > 0).sum(axis=1).max()))
        mem_err = err[mem]
        if adaptive is None:
            offsets = interval_offsets(weights, mem_err, config.alpha, config.hopcpt_quantile_mode, draws, rng_seed)

    state = adaptive
    out: List[PredictionInterval] = []
    for j, t in enumerate(test_idx):
        alpha_target = config.alpha if state is None else state.alpha_target
        alpha = config.alpha if state is None else state.alpha_current
        history = err[calib.start:t]
        if variant is Variant.SPLIT:
            iv = split_cp_interval(np.abs(err[calib]), pred[t], alpha)
        elif variant is Variant.NEXCP:
            iv = nexcp_interval(history, pred[t], alpha, config.nexcp_rho)
        elif variant is Variant.ENBPI:
            iv = enbpi_interval(history[-config.enbpi_window:], pred[t], alpha)
        elif variant is Variant.KNN:
            iv = knn_cp_interval(inputs[calib.start:t], history, inputs[t], config.knn_top_share, pred[t], alpha)
        else:
            if offsets is not None:
                iv = PredictionInterval(pred[t] + offsets[0][j], pred[t] + offsets[1][j], alpha)
            else:
                lo, hi = interval_offsets(weights[j:j + 1], mem_err, alpha, config.hopcpt_quantile_mode,
                                          draws, rng_seed + j)
                iv = PredictionInterval(pred[t] + lo[0], pred[t] + hi[0], alpha)
        if iv.alpha != alpha_target:
            iv = replace(iv, alpha=alpha_target)
        out.append(iv)
        if state is not None:
            state = adaptive_update(state, iv.covers(y[t]))
    return out
