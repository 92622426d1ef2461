"""Training loop, checkpoint selection and encoder inputs."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core import SplitSpec, TimeSeriesDataset
from ..seeding import stream_seed
from .inference import QuantileMode, interval_offsets, retrieval_weights
from .network import HopfieldModel, backward, init_model, loss_value
from .optim import AdamW

log = logging.getLogger(__name__)

INPUT_SETS = ("features+prediction", "features", "prediction")


class TrainingError(RuntimeError):
    def __init__(self, epoch: int, message: str):
        super().__init__(f"epoch {epoch}: {message}")
        self.epoch = epoch


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 3000
    validate_every: int = 5
    learning_rate: float = 0.001
    dropout: float = 0.0
    use_time_encoding: bool = True
    adamw_beta1: float = 0.9
    adamw_beta2: float = 0.999
    weight_decay: float = 0.01
    adamw_eps: float = 1e-8
    batch_size: int = 1
    seed: int = 0
    hidden: int = 64
    d_enc: int = 16
    d_attn: int = 16
    beta: Optional[float] = None
    inputs: str = "features+prediction"
    validation_mode: QuantileMode = QuantileMode.ECDF

    def __post_init__(self):
        if self.epochs < 1 or self.validate_every < 1 or self.batch_size < 1:
            raise ValueError("epochs, validate_every and batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")
        if self.inputs not in INPUT_SETS:
            raise ValueError(f"inputs must be one of {INPUT_SETS}")
        object.__setattr__(self, "validation_mode", QuantileMode(self.validation_mode))


def select_model(candidates: Sequence[Tuple[float, float]]) -> int:
    """Index of the chosen (delta_cov, pi_width) candidate.

    Candidates with negative coverage gap are dropped and the narrowest of
    the rest wins; if all are negative, the largest coverage gap wins.
    Ties go to the lowest index.
    """
    if len(candidates) == 0:
        raise ValueError("no candidates to select from")
    valid = [i for i, (dcov, _) in enumerate(candidates) if dcov >= 0]
    if valid:
        return min(valid, key=lambda i: (candidates[i][1], i))
    return min(range(len(candidates)), key=lambda i: (-candidates[i][0], i))


def encoder_inputs(dataset: TimeSeriesDataset, inputs: str = "features+prediction") -> np.ndarray:
    """Raw encoder input matrix for every step of ``dataset``."""
    if inputs not in INPUT_SETS:
        raise ValueError(f"inputs must be one of {INPUT_SETS}")
    if inputs == "features":
        return np.asarray(dataset.features)
    if dataset.predictions is None:
        raise ValueError("dataset has no base-model predictions")
    pred = np.asarray(dataset.predictions).reshape(-1, 1)
    if inputs == "prediction":
        return pred
    return np.hstack([dataset.features, pred])


@dataclass
class _Segment:
    inputs: np.ndarray
    times: np.ndarray
    errors: np.ndarray
    targets: np.ndarray
    predictions: np.ndarray
    total_T: float
    n_fit: int


@dataclass
class TraceEntry:
    epoch: int
    train_loss: float
    validation: Dict[float, Tuple[float, float]] = field(default_factory=dict)


@dataclass
class TrainResult:
    models: Dict[float, HopfieldModel]
    selected_epoch: Dict[float, int]
    final_model: HopfieldModel
    initial_loss: float
    final_loss: float
    trace: List[TraceEntry]

    @property
    def model(self) -> HopfieldModel:
        return next(iter(self.models.values()))


def _segments(datasets, splits, inputs: str) -> List[_Segment]:
    out = []
    for ds, split in zip(datasets, splits):
        split.validate_for(len(ds))
        if ds.errors is None:
            raise ValueError(f"{ds.name}: dataset has no base-model errors")
        sl = split.calib
        n_cal = sl.stop - sl.start
        if n_cal < 8:
            raise ValueError(f"{ds.name}: calibration segment has {n_cal} steps, need at least 8")
        out.append(_Segment(
            inputs=encoder_inputs(ds, inputs)[sl],
            times=np.asarray(ds.timestamps[sl]),
            errors=np.asarray(ds.errors[sl]),
            targets=np.asarray(ds.targets[sl]),
            predictions=np.asarray(ds.predictions[sl]),
            total_T=float(len(ds)),
            n_fit=n_cal // 2,
        ))
    return out


def validation_metrics(model: HopfieldModel, segments: Sequence[_Segment], alphas: Sequence[float],
                       mode=QuantileMode.ECDF, seed: int = 0) -> Dict[float, Tuple[float, float]]:
    """(delta_cov, mean width) per alpha over the validation halves.

    Each validation step retrieves over all earlier calibration steps.
    """
    weights = []
    for seg in segments:
        q = slice(seg.n_fit, None)
        weights.append(retrieval_weights(model, seg.inputs, seg.times, seg.inputs[q], seg.times[q], seg.total_T))
    out = {}
    for alpha in alphas:
        misses = widths = count = 0.0
        for s_idx, (seg, w) in enumerate(zip(segments, weights)):
            lo, hi = interval_offsets(w, seg.errors, alpha, mode, rng_seed=stream_seed(seed, s_idx, "validation"))
            y = seg.targets[seg.n_fit:]
            pred = seg.predictions[seg.n_fit:]
            misses += np.sum((y < pred + lo) | (y > pred + hi))
            widths += np.sum(hi - lo)
            count += y.size
        out[alpha] = (float(alpha - misses / count), float(widths / count))
    return out


def _standardization(segments: Sequence[_Segment]) -> Tuple[np.ndarray, np.ndarray]:
    fit = np.vstack([s.inputs[:s.n_fit] for s in segments])
    shift = fit.mean(axis=0)
    scale = fit.std(axis=0)
    scale[scale == 0] = 1.0
    return shift, scale


def train(datasets: Union[TimeSeriesDataset, Sequence[TimeSeriesDataset]],
          split: Union[SplitSpec, Sequence[SplitSpec]], config: TrainConfig = TrainConfig(),
          alphas: Sequence[float] = (0.1,), initial_model: Optional[HopfieldModel] = None) -> TrainResult:
    """Fit the association model on the first half of each calibration segment.

    Every ``validate_every`` epochs (and after the last epoch) the current
    parameters are scored on the second half; the returned model for each
    alpha is the checkpoint chosen by ``select_model``.
    """
    if isinstance(datasets, TimeSeriesDataset):
        datasets = [datasets]
    splits = [split] * len(datasets) if isinstance(split, SplitSpec) else list(split)
    if len(splits) != len(datasets):
        raise ValueError("need one split per dataset")
    alphas = [float(a) for a in alphas]
    segments = _segments(datasets, splits, config.inputs)

    model = initial_model
    if model is None:
        model = init_model(segments[0].inputs.shape[1], config.hidden, config.d_enc, config.d_attn,
                           beta=config.beta, dropout_rate=config.dropout,
                           use_time_encoding=config.use_time_encoding,
                           seed=stream_seed(config.seed, 0, "hopfield", "init"))
        shift, scale = _standardization(segments)
        model = HopfieldModel(**model.params(), beta=model.beta, dropout_rate=model.dropout_rate,
                              use_time_encoding=model.use_time_encoding, input_shift=shift, input_scale=scale)

    def fit_loss(m: HopfieldModel) -> float:
        return float(np.mean([
            loss_value(m, s.inputs[:s.n_fit], s.times[:s.n_fit], np.abs(s.errors[:s.n_fit]), s.total_T)
            for s in segments
        ]))

    initial_loss = fit_loss(model)
    optimizer = AdamW(config.learning_rate, (config.adamw_beta1, config.adamw_beta2),
                      config.adamw_eps, config.weight_decay)
    training = config.dropout > 0
    trace: List[TraceEntry] = []
    checkpoints: List[HopfieldModel] = []

    for epoch in range(1, config.epochs + 1):
        losses = []
        for start in range(0, len(segments), config.batch_size):
            batch = range(start, min(start + config.batch_size, len(segments)))
            grads_sum = None
            for s_idx in batch:
                s = segments[s_idx]
                loss, grads = backward(model, s.inputs[:s.n_fit], s.times[:s.n_fit], np.abs(s.errors[:s.n_fit]),
                                       s.total_T, training=training,
                                       rng_seed=stream_seed(config.seed, epoch, "dropout", str(s_idx)))
                if not np.isfinite(loss):
                    raise TrainingError(epoch, f"non-finite loss {loss}")
                losses.append(loss)
                grads_sum = grads if grads_sum is None else {k: grads_sum[k] + grads[k] for k in grads}
            grads_mean = {k: g / len(batch) for k, g in grads_sum.items()}
            params = optimizer.step(model.params(), grads_mean)
            if not all(np.all(np.isfinite(p)) for p in params.values()):
                raise TrainingError(epoch, "parameters became non-finite")
            model = model.with_params(params)

        entry = TraceEntry(epoch, float(np.mean(losses)))
        if epoch % config.validate_every == 0 or epoch == config.epochs:
            entry.validation = validation_metrics(model, segments, alphas, config.validation_mode,
                                                  stream_seed(config.seed, epoch, "validation"))
            checkpoints.append(model)
        trace.append(entry)

    validated = [e for e in trace if e.validation]
    models, chosen_epoch = {}, {}
    for alpha in alphas:
        idx = select_model([e.validation[alpha] for e in validated])
        models[alpha] = checkpoints[idx]
        chosen_epoch[alpha] = validated[idx].epoch
    final_loss = fit_loss(model)
    log.debug("trained %d epochs: loss %.6g -> %.6g", config.epochs, initial_loss, final_loss)
    return TrainResult(models, chosen_epoch, model, initial_loss, final_loss, trace)
