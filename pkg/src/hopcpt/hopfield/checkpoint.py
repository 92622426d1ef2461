"""Model checkpoints as versioned JSON.

Layout (``format_version`` 1)::

    {
      "format": "hopcpt-hopfield",
      "format_version": 1,
      "beta": float, "dropout_rate": float, "use_time_encoding": bool,
      "tensors": {name: {"shape": [...], "data": [flat row-major floats]}},
      "config": {...}            # optional free-form training config
    }

``tensors`` holds the six trainable arrays plus ``input_shift`` and
``input_scale``. Floats are written with ``repr`` precision, so a
save/load round trip reproduces every parameter bit for bit.
"""
from __future__ import annotations

import dataclasses
import enum
import json
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..io import atomic_writer
from .network import PARAM_NAMES, HopfieldModel

FORMAT = "hopcpt-hopfield"
FORMAT_VERSION = 1
_TENSORS = PARAM_NAMES + ("input_shift", "input_scale")


def _jsonable(value):
    if isinstance(value, enum.Enum):
        return value.value
    return value


def model_to_dict(model: HopfieldModel, config: Optional[Any] = None) -> Dict[str, Any]:
    out = {
        "format": FORMAT,
        "format_version": FORMAT_VERSION,
        "beta": model.beta,
        "dropout_rate": model.dropout_rate,
        "use_time_encoding": model.use_time_encoding,
        "tensors": {
            name: {"shape": list(getattr(model, name).shape), "data": getattr(model, name).ravel().tolist()}
            for name in _TENSORS
        },
    }
    if config is not None:
        cfg = dataclasses.asdict(config) if dataclasses.is_dataclass(config) else dict(config)
        out["config"] = {k: _jsonable(v) for k, v in cfg.items()}
    return out


def model_from_dict(payload: Dict[str, Any]) -> Tuple[HopfieldModel, Optional[Dict[str, Any]]]:
    if payload.get("format") != FORMAT:
        raise ValueError("not a hopfield checkpoint")
    if payload.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint version {payload.get('format_version')}")
    tensors = {
        name: np.asarray(spec["data"], dtype=np.float64).reshape(spec["shape"])
        for name, spec in payload["tensors"].items()
    }
    model = HopfieldModel(**tensors, beta=payload["beta"], dropout_rate=payload["dropout_rate"],
                          use_time_encoding=payload["use_time_encoding"])
    return model, payload.get("config")


def save_model(model: HopfieldModel, path, config: Optional[Any] = None) -> None:
    with atomic_writer(path) as fh:
        json.dump(model_to_dict(model, config), fh, indent=1)
        fh.write("\n")


def load_model(path) -> Tuple[HopfieldModel, Optional[Dict[str, Any]]]:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
