"""Encoder MLP, query/key projections and masked softmax association.

Shapes used throughout:

* ``d_in``   raw encoder input width
* ``hidden`` MLP hidden width
* ``d_enc``  MLP output width; the encoding appends one time channel
* ``d_attn`` query/key projection width

Forward pass for a set of T steps::

    H  = relu(Z W1^T + b1) * dropout_mask
    M  = [H W2^T + b2 || t / total_T]
    S  = beta * (M Wq^T)(M Wk^T)^T        (diagonal -> -inf when self-masked)
    A  = softmax(S, axis=1)
    L  = mean((|e| - A |e|)^2)
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np

from ..core import WeightVector
from ..seeding import make_rng

PARAM_NAMES = ("mlp_w1", "mlp_b1", "mlp_w2", "mlp_b2", "wq", "wk")


@dataclass(frozen=True)
class HopfieldModel:
    mlp_w1: np.ndarray
    mlp_b1: np.ndarray
    mlp_w2: np.ndarray
    mlp_b2: np.ndarray
    wq: np.ndarray
    wk: np.ndarray
    beta: float
    dropout_rate: float = 0.0
    use_time_encoding: bool = True
    # fixed input standardization, applied before the MLP
    input_shift: Optional[np.ndarray] = field(default=None)
    input_scale: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        arrays = {name: np.array(getattr(self, name), dtype=np.float64) for name in PARAM_NAMES}
        h, d_in = arrays["mlp_w1"].shape
        d_enc = arrays["mlp_w2"].shape[0]
        d_attn = arrays["wq"].shape[0]
        expected = {
            "mlp_b1": (h,),
            "mlp_w2": (d_enc, h),
            "mlp_b2": (d_enc,),
            "wq": (d_attn, d_enc + 1),
            "wk": (d_attn, d_enc + 1),
        }
        for name, shape in expected.items():
            if arrays[name].shape != shape:
                raise ValueError(f"{name} has shape {arrays[name].shape}, expected {shape}")
        if not all(np.all(np.isfinite(a)) for a in arrays.values()):
            raise ValueError("model parameters must be finite")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout rate must lie in [0, 1)")
        shift = np.zeros(d_in) if self.input_shift is None else np.array(self.input_shift, dtype=np.float64)
        scale = np.ones(d_in) if self.input_scale is None else np.array(self.input_scale, dtype=np.float64)
        if shift.shape != (d_in,) or scale.shape != (d_in,) or np.any(scale <= 0):
            raise ValueError("input standardization must be length d_in with positive scale")
        arrays["input_shift"], arrays["input_scale"] = shift, scale
        for name, arr in arrays.items():
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def d_in(self) -> int:
        return self.mlp_w1.shape[1]

    @property
    def hidden(self) -> int:
        return self.mlp_w1.shape[0]

    @property
    def d_enc(self) -> int:
        return self.mlp_w2.shape[0]

    @property
    def d_attn(self) -> int:
        return self.wq.shape[0]

    def params(self) -> Dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def with_params(self, params: Dict[str, np.ndarray]) -> "HopfieldModel":
        return replace(self, **params)

    def flat_params(self) -> np.ndarray:
        return np.concatenate([getattr(self, n).ravel() for n in PARAM_NAMES])


def init_model(d_in: int, hidden: int = 64, d_enc: int = 16, d_attn: int = 16, *,
               beta: Optional[float] = None, dropout_rate: float = 0.0,
               use_time_encoding: bool = True, seed: int = 0) -> HopfieldModel:
    """Uniform fan-in initialization: each entry ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in))."""
    rng = make_rng(seed)

    def uni(shape, fan_in):
        bound = 1.0 / np.sqrt(fan_in)
        return rng.uniform(-bound, bound, shape)

    return HopfieldModel(
        mlp_w1=uni((hidden, d_in), d_in),
        mlp_b1=uni((hidden,), d_in),
        mlp_w2=uni((d_enc, hidden), hidden),
        mlp_b2=uni((d_enc,), hidden),
        wq=uni((d_attn, d_enc + 1), d_enc + 1),
        wk=uni((d_attn, d_enc + 1), d_enc + 1),
        beta=1.0 / np.sqrt(d_attn) if beta is None else beta,
        dropout_rate=dropout_rate,
        use_time_encoding=use_time_encoding,
    )


def _dropout_mask(model: HopfieldModel, shape, training: bool, rng_seed: Optional[int]) -> Optional[np.ndarray]:
    if not training or model.dropout_rate == 0.0:
        return None
    if rng_seed is None:
        raise ValueError("training-mode dropout needs an rng_seed")
    keep = 1.0 - model.dropout_rate
    return (make_rng(rng_seed).random(shape) < keep) / keep


def _encode(model: HopfieldModel, features, timestamps, total_T: float, training: bool, rng_seed):
    z = np.asarray(features, dtype=np.float64)
    if z.ndim == 1:
        z = z.reshape(-1, 1)
    if z.ndim != 2 or z.shape[1] != model.d_in:
        raise ValueError(f"encoder expects width {model.d_in}, got shape {z.shape}")
    t = np.asarray(timestamps, dtype=np.float64).reshape(-1)
    if t.size != z.shape[0]:
        raise ValueError("timestamps do not match feature rows")
    if total_T <= 0:
        raise ValueError("total_T must be positive")
    zs = (z - model.input_shift) / model.input_scale
    pre = zs @ model.mlp_w1.T + model.mlp_b1
    act = np.maximum(pre, 0.0)
    mask = _dropout_mask(model, act.shape, training, rng_seed)
    hid = act if mask is None else act * mask
    time = t / total_T if model.use_time_encoding else np.zeros_like(t)
    enc = np.column_stack([hid @ model.mlp_w2.T + model.mlp_b2, time])
    return enc, (zs, pre, mask, hid)


def encode(model: HopfieldModel, features, timestamps, total_T: float,
           training: bool = False, rng_seed: Optional[int] = None) -> np.ndarray:
    """Encoded patterns, one row per step: MLP output followed by the time channel."""
    return _encode(model, features, timestamps, total_T, training, rng_seed)[0]


def _masked_softmax(logits: np.ndarray, allowed: Optional[np.ndarray]) -> np.ndarray:
    if allowed is not None:
        if not np.all(allowed.any(axis=1)):
            raise ValueError("every query needs at least one admissible key")
        logits = np.where(allowed, logits, -np.inf)
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def associate(model: HopfieldModel, query_rows, key_rows, mask_self: bool = False,
              allowed: Optional[np.ndarray] = None):
    """Softmax association of encoded queries over encoded keys.

    ``mask_self`` removes the diagonal (queries and keys are the same steps);
    ``allowed`` is an optional boolean (n_query, n_key) admissibility mask.
    A single 1-D query returns a ``WeightVector``.
    """
    q = np.asarray(query_rows, dtype=np.float64)
    k = np.asarray(key_rows, dtype=np.float64)
    single = q.ndim == 1
    q = np.atleast_2d(q)
    if k.ndim != 2 or k.shape[0] == 0:
        raise ValueError("need a non-empty 2-D key matrix")
    width = model.d_enc + 1
    if q.shape[1] != width or k.shape[1] != width:
        raise ValueError(f"encoded rows must have width {width}")
    logits = model.beta * (q @ model.wq.T) @ (k @ model.wk.T).T
    mask = None if allowed is None else np.asarray(allowed, dtype=bool).reshape(logits.shape)
    if mask_self:
        if q.shape[0] != k.shape[0]:
            raise ValueError("self-masking needs as many queries as keys")
        eye = ~np.eye(k.shape[0], dtype=bool)
        mask = eye if mask is None else mask & eye
    a = _masked_softmax(logits, mask)
    return WeightVector(a[0]) if single else a


@dataclass(frozen=True)
class AssociationMatrix:
    """Row-stochastic self-association with an exactly zero diagonal."""

    a: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("association matrix must be square")
        if np.any(np.diag(a) != 0.0):
            raise ValueError("self-association must be masked")
        if np.any(a < 0) or np.any(a > 1):
            raise ValueError("entries must lie in [0, 1]")
        if np.max(np.abs(a.sum(axis=1) - 1.0)) > 1e-6:
            raise ValueError("rows must sum to one")
        object.__setattr__(self, "a", a)


def training_loss(assoc, abs_errors) -> float:
    """Mean squared gap between each |error| and its association-weighted retrieval."""
    a = assoc.a if isinstance(assoc, AssociationMatrix) else np.asarray(assoc, dtype=np.float64)
    v = np.asarray(abs_errors, dtype=np.float64).reshape(-1)
    if a.shape != (v.size, v.size):
        raise ValueError(f"association shape {a.shape} does not match {v.size} errors")
    r = v - a @ v
    return float(r @ r / v.size)


def self_association(model: HopfieldModel, features, timestamps, total_T: float,
                     training: bool = False, rng_seed: Optional[int] = None) -> np.ndarray:
    enc = encode(model, features, timestamps, total_T, training, rng_seed)
    return associate(model, enc, enc, mask_self=True)


def backward(model: HopfieldModel, features, timestamps, abs_errors, total_T: Optional[float] = None,
             training: bool = False, rng_seed: Optional[int] = None) -> Tuple[float, Dict[str, np.ndarray]]:
    """Self-masked training loss and its exact gradient for every parameter.

    ``total_T`` defaults to the number of rows. The dropout mask (training
    mode) is drawn from ``rng_seed`` exactly as in ``encode``.
    """
    v = np.asarray(abs_errors, dtype=np.float64).reshape(-1)
    n = v.size
    if n < 2:
        raise ValueError("self-masked association needs at least two steps")
    total_T = float(n if total_T is None else total_T)
    enc, (zs, pre, mask, hid) = _encode(model, features, timestamps, total_T, training, rng_seed)
    if enc.shape[0] != n:
        raise ValueError("errors do not match feature rows")

    q = enc @ model.wq.T
    k = enc @ model.wk.T
    allowed = ~np.eye(n, dtype=bool)
    a = _masked_softmax(model.beta * q @ k.T, allowed)
    r = v - a @ v
    loss = float(r @ r / n)

    d_pred = -2.0 * r / n                           # dL/d(A v)
    d_a = np.outer(d_pred, v)
    d_s = a * (d_a - (d_a * a).sum(axis=1, keepdims=True))
    d_q = model.beta * d_s @ k
    d_k = model.beta * d_s.T @ q
    grads = {"wq": d_q.T @ enc, "wk": d_k.T @ enc}
    d_enc = (d_q @ model.wq + d_k @ model.wk)[:, :model.d_enc]
    grads["mlp_w2"] = d_enc.T @ hid
    grads["mlp_b2"] = d_enc.sum(axis=0)
    d_hid = d_enc @ model.mlp_w2
    if mask is not None:
        d_hid = d_hid * mask
    d_pre = d_hid * (pre > 0)
    grads["mlp_w1"] = d_pre.T @ zs
    grads["mlp_b1"] = d_pre.sum(axis=0)
    return loss, grads


def loss_value(model: HopfieldModel, features, timestamps, abs_errors, total_T: Optional[float] = None,
               training: bool = False, rng_seed: Optional[int] = None) -> float:
    """Training loss computed through ``associate`` and ``training_loss`` (no gradients)."""
    v = np.asarray(abs_errors, dtype=np.float64).reshape(-1)
    total_T = float(v.size if total_T is None else total_T)
    a = self_association(model, features, timestamps, total_T, training, rng_seed)
    return training_loss(a, v)
