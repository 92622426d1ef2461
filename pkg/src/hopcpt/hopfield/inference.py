"""Retrieval of past errors for interval construction."""
from __future__ import annotations

import enum
from typing import Optional, Tuple

import numpy as np

from ..quantile import empirical_quantile, weighted_quantile_ecdf_rows, weighted_sample
from ..seeding import stream_seed
from .network import HopfieldModel, associate, encode


class QuantileMode(str, enum.Enum):
    SAMPLED = "sampled"
    ECDF = "ecdf"


def retrieval_weights(model: HopfieldModel, memory_inputs, memory_times, query_inputs, query_times,
                      total_T: float, causal: bool = True) -> np.ndarray:
    """Association of each query step over the memory steps, shape (n_query, n_memory).

    With ``causal`` a query only sees memory steps strictly earlier in time.
    """
    mem_t = np.asarray(memory_times).reshape(-1)
    qry_t = np.asarray(query_times).reshape(-1)
    keys = encode(model, memory_inputs, mem_t, total_T)
    queries = encode(model, query_inputs, qry_t, total_T)
    allowed = mem_t[None, :] < qry_t[:, None] if causal else None
    return associate(model, queries, keys, allowed=allowed)


def default_n_draws(history_len: int) -> int:
    return max(1000, history_len)


def interval_offsets(weights: np.ndarray, memory_errors, alpha: float, mode=QuantileMode.ECDF,
                     n_draws: Optional[int] = None, rng_seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Lower/upper error quantiles (alpha/2, 1 - alpha/2) for each weight row.

    ``ECDF`` inverts the weighted empirical distribution of the signed
    errors; ``SAMPLED`` draws a multiset of ``n_draws`` errors per row and
    takes its order-statistic quantiles. Row ``j`` of the sampled mode uses
    the stream ``stream_seed(rng_seed, j, "hopcpt-multiset")``.
    """
    w = np.atleast_2d(np.asarray(weights, dtype=np.float64))
    err = np.asarray(memory_errors, dtype=np.float64).reshape(-1)
    if w.shape[1] != err.size:
        raise ValueError("weights and memory errors disagree in length")
    lo_tau, hi_tau = alpha / 2.0, 1.0 - alpha / 2.0
    mode = QuantileMode(mode)
    if mode is QuantileMode.ECDF:
        order = np.argsort(err, kind="stable")
        sv, sw = err[order], w[:, order]
        return weighted_quantile_ecdf_rows(sv, sw, lo_tau), weighted_quantile_ecdf_rows(sv, sw, hi_tau)
    draws = default_n_draws(err.size) if n_draws is None else n_draws
    lower = np.empty(w.shape[0])
    upper = np.empty(w.shape[0])
    for j, row in enumerate(w):
        sample = weighted_sample(err, row, draws, stream_seed(rng_seed, j, "hopcpt-multiset"))
        lower[j] = empirical_quantile(sample, lo_tau)
        upper[j] = empirical_quantile(sample, hi_tau)
    return lower, upper
