"""Learned error retrieval: encoder, association, loss, gradients and training."""
from .checkpoint import load_model, save_model
from .inference import QuantileMode, interval_offsets, retrieval_weights
from .network import (
    PARAM_NAMES,
    AssociationMatrix,
    HopfieldModel,
    associate,
    backward,
    encode,
    init_model,
    loss_value,
    self_association,
    training_loss,
)
from .optim import AdamW
from .training import TrainConfig, TrainingError, TrainResult, encoder_inputs, select_model, train

__all__ = [
    "PARAM_NAMES",
    "AdamW",
    "AssociationMatrix",
    "HopfieldModel",
    "QuantileMode",
    "TrainConfig",
    "TrainResult",
    "TrainingError",
    "associate",
    "backward",
    "encode",
    "encoder_inputs",
    "init_model",
    "interval_offsets",
    "load_model",
    "loss_value",
    "retrieval_weights",
    "save_model",
    "select_model",
    "self_association",
    "train",
    "training_loss",
]
