"""Similarity-weighted conformal prediction intervals for time series."""
from .core import (
    PredictionInterval,
    SplitSpec,
    TimeSeriesDataset,
    WeightVector,
    compute_errors,
    normalize_weights,
    read_csv,
    write_csv,
)
from .methods import AdaptiveState, MethodConfig, Variant, run_method
from .metrics import EvalReport, evaluate

__version__ = "0.1.0"

__all__ = [
    "AdaptiveState",
    "EvalReport",
    "MethodConfig",
    "PredictionInterval",
    "SplitSpec",
    "TimeSeriesDataset",
    "Variant",
    "WeightVector",
    "compute_errors",
    "evaluate",
    "normalize_weights",
    "read_csv",
    "run_method",
    "write_csv",
]
