"""Coverage gap, interval width, Winkler score and local coverage."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Sequence

import numpy as np

from .core import PredictionInterval

WINDOW_SIZES = (10, 20, 50)


def _bounds(intervals: Sequence[PredictionInterval], targets):
    y = np.asarray(targets, dtype=np.float64).reshape(-1)
    if len(intervals) != y.size:
        raise ValueError(f"{len(intervals)} intervals vs {y.size} targets")
    lo = np.array([iv.lower for iv in intervals], dtype=np.float64)
    hi = np.array([iv.upper for iv in intervals], dtype=np.float64)
    return lo, hi, y


def covered_flags(intervals: Sequence[PredictionInterval], targets) -> np.ndarray:
    """Closed-interval coverage per step (a target on a bound is covered)."""
    lo, hi, y = _bounds(intervals, targets)
    return (lo <= y) & (y <= hi)


def _gap(covered: np.ndarray, alpha: float) -> float:
    return alpha - float(np.mean(~covered))


def delta_cov(intervals: Sequence[PredictionInterval], targets, alpha: float) -> float:
    """Specified minus realized miscoverage; negative means under-coverage."""
    return _gap(covered_flags(intervals, targets), alpha)


def winkler_score(interval: PredictionInterval, target: float, alpha: float) -> float:
    width = interval.upper - interval.lower
    if target < interval.lower:
        return width + 2.0 / alpha * (interval.lower - target)
    if target > interval.upper:
        return width + 2.0 / alpha * (target - interval.upper)
    return width


def local_coverage(intervals: Sequence[PredictionInterval], targets, alpha: float, window_k: int,
                   rolling: bool = False) -> float:
    """Mean coverage deficiency over windows of ``window_k`` steps.

    Each window's coverage gap is capped at zero from above and the negated
    mean is returned, so 0 is best. Windows are disjoint and a trailing
    remainder is dropped; ``rolling`` uses every window with stride one.
    """
    covered = covered_flags(intervals, targets)
    if window_k < 1 or covered.size < window_k:
        raise ValueError(f"series of {covered.size} steps is shorter than window {window_k}")
    if rolling:
        sums = np.convolve(covered.astype(np.float64), np.ones(window_k), mode="valid")
        gaps = alpha - (window_k - sums) / window_k
    else:
        n_win = covered.size // window_k
        blocks = covered[:n_win * window_k].reshape(n_win, window_k)
        gaps = alpha - (~blocks).mean(axis=1)
    return float(-np.mean(np.minimum(gaps, 0.0)))


@dataclass(frozen=True)
class EvalReport:
    """Scalar metrics for one method, series and alpha.

    ``*_norm`` fields divide by the mean absolute target of the scored
    steps; ``local_coverage`` maps window size to the deficiency score.
    """

    alpha: float
    delta_cov: float
    mean_pi_width: float
    mean_winkler: float
    local_coverage: Dict[int, float] = field(default_factory=dict)
    n_test: int = 0
    mean_pi_width_norm: float = float("nan")
    mean_winkler_norm: float = float("nan")
    n_uninformative: int = 0

    def __post_init__(self):
        if self.n_test < 1:
            raise ValueError("report needs at least one test step")
        if self.mean_pi_width < 0:
            raise ValueError("mean width must be nonnegative")


def evaluate(intervals: Sequence[PredictionInterval], targets, alpha: float,
             window_sizes: Sequence[int] = WINDOW_SIZES, rolling: bool = False) -> EvalReport:
    lo, hi, y = _bounds(intervals, targets)
    if y.size == 0:
        raise ValueError("nothing to evaluate")
    widths = hi - lo
    scores = [winkler_score(iv, t, alpha) for iv, t in zip(intervals, y)]
    scale = float(np.mean(np.abs(y)))
    mean_width = float(np.mean(widths))
    mean_winkler = float(np.mean(scores))
    local = {int(k): local_coverage(intervals, y, alpha, k, rolling) for k in window_sizes if k <= y.size}
    return EvalReport(
        alpha=alpha,
        delta_cov=delta_cov(intervals, y, alpha),
        mean_pi_width=mean_width,
        mean_winkler=mean_winkler,
        local_coverage=local,
        n_test=int(y.size),
        mean_pi_width_norm=mean_width / scale if scale > 0 else float("nan"),
        mean_winkler_norm=mean_winkler / scale if scale > 0 else float("nan"),
        n_uninformative=sum(not iv.informative for iv in intervals),
    )
