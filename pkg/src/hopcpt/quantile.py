"""Quantiles over plain, conformal and weighted samples.

All quantiles use the order-statistic convention (inverse ECDF, no
interpolation): the tau-quantile of n values is the ceil(tau * n)-th
smallest value. Cumulative weights are compared against tau with a
tolerance of ``RANK_TOL`` so that float rounding of sums such as
0.1 + 0.1 + ... never moves the answer by one order statistic.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import WeightVector
from .seeding import make_rng

RANK_TOL = 1e-12


class Unbounded(enum.Enum):
    """Quantile that falls on the point mass at +infinity."""

    POS_INF = "+inf"

    def __repr__(self) -> str:
        return "UNBOUNDED"


UNBOUNDED = Unbounded.POS_INF
QuantileResult = Union[float, Unbounded]


@dataclass(frozen=True)
class QuantileLevel:
    tau: float

    def __post_init__(self):
        if not (0.0 < float(self.tau) < 1.0):
            raise ValueError(f"quantile level must lie in (0, 1), got {self.tau}")

    def __float__(self) -> float:
        return float(self.tau)


def _tau(tau) -> float:
    return float(QuantileLevel(float(tau)))


def _values(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise ValueError("cannot take the quantile of an empty sample")
    if not np.all(np.isfinite(v)):
        raise ValueError("values must be finite")
    return v


def order_rank(tau: float, n: int) -> int:
    """1-based rank ``ceil(tau * n)`` with rounding slack, at least 1."""
    return max(1, math.ceil(tau * n - n * RANK_TOL))


def empirical_quantile(values, tau) -> float:
    """The ceil(tau*n)-th smallest value; the maximum if that rank exceeds n."""
    v = _values(values)
    k = min(order_rank(_tau(tau), v.size), v.size)
    return float(np.partition(v, k - 1)[k - 1])


def conformal_quantile(scores, alpha: float) -> QuantileResult:
    """Split-conformal score quantile: the ceil((n+1)(1-alpha))-th smallest score.

    Returns ``UNBOUNDED`` when that rank exceeds n.
    """
    s = _values(scores)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    k = order_rank(1.0 - alpha, s.size + 1)
    if k > s.size:
        return UNBOUNDED
    return float(np.partition(s, k - 1)[k - 1])


def upper_order_statistic(values, tau: float, n_total: int) -> QuantileResult:
    """Order statistic at rank ceil(tau * n_total) of ``values``; UNBOUNDED past the end.

    With ``n_total = len(values) + 1`` this is the quantile of the uniform
    empirical distribution augmented by one point mass at +infinity.
    """
    v = _values(values)
    k = order_rank(_tau(tau), n_total)
    if k > v.size:
        return UNBOUNDED
    return float(np.partition(v, k - 1)[k - 1])


def weighted_quantile_ecdf(values, weights, tau) -> float:
    """Smallest value whose cumulative weight (values sorted ascending) reaches tau."""
    v = _values(values)
    w = weights.weights if isinstance(weights, WeightVector) else WeightVector(weights).weights
    if v.size != w.size:
        raise ValueError(f"length mismatch: {v.size} values vs {w.size} weights")
    t = _tau(tau)
    order = np.argsort(v, kind="stable")
    cum = np.cumsum(w[order])
    idx = int(np.searchsorted(cum, t - RANK_TOL, side="left"))
    return float(v[order[min(idx, v.size - 1)]])


def weighted_quantile_with_inf(values, finite_weights, inf_weight: float, tau) -> QuantileResult:
    """Quantile of ``sum_i w_i delta(v_i) + inf_weight * delta(+inf)``.

    ``finite_weights`` and ``inf_weight`` must together sum to one. Returns
    ``UNBOUNDED`` when the finite mass never reaches tau.
    """
    v = _values(values)
    w = np.asarray(finite_weights, dtype=np.float64).reshape(-1)
    if v.size != w.size:
        raise ValueError(f"length mismatch: {v.size} values vs {w.size} weights")
    if np.any(w < 0) or inf_weight < 0:
        raise ValueError("weights must be nonnegative")
    if abs(w.sum() + inf_weight - 1.0) > 1e-9:
        raise ValueError("finite and infinite weights must sum to one")
    t = _tau(tau)
    order = np.argsort(v, kind="stable")
    cum = np.cumsum(w[order])
    idx = int(np.searchsorted(cum, t - RANK_TOL, side="left"))
    if idx >= v.size:
        return UNBOUNDED
    return float(v[order[idx]])


def weighted_sample(values, weights, n_draws: int, rng_seed: int) -> np.ndarray:
    """``n_draws`` i.i.d. draws from ``values`` with probabilities ``weights``.

    Draws come from a fresh PCG64 generator seeded with ``rng_seed`` via
    inverse-CDF lookup of uniform variates, so the output is reproducible
    across platforms.
    """
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    w = weights.weights if isinstance(weights, WeightVector) else WeightVector(weights).weights
    if v.size != w.size:
        raise ValueError(f"length mismatch: {v.size} values vs {w.size} weights")
    if n_draws < 1:
        raise ValueError("n_draws must be at least 1")
    cdf = np.cumsum(w)
    u = make_rng(rng_seed).random(n_draws) * cdf[-1]
    idx = np.searchsorted(cdf, u, side="right")
    # zero-weight entries own an empty cdf interval; only u rounding up to cdf[-1] can overshoot
    idx = np.minimum(idx, np.flatnonzero(w)[-1])
    return v[idx]


def weighted_quantile_ecdf_rows(sorted_values: np.ndarray, sorted_weights: np.ndarray, tau: float) -> np.ndarray:
    """Row-wise ``weighted_quantile_ecdf`` for many weight vectors over one value set.

    ``sorted_values`` (n,) must be ascending and ``sorted_weights`` (q, n)
    must be permuted to match; each row is one weight vector.
    """
    cum = np.cumsum(sorted_weights, axis=1)
    idx = (cum < tau - RANK_TOL).sum(axis=1)
    return sorted_values[np.minimum(idx, sorted_values.size - 1)]
