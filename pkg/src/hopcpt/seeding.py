"""Deterministic random streams.

Every random draw in the package comes from numpy's PCG64 bit generator.
Streams are derived from a master seed through ``numpy.random.SeedSequence``
with an entropy tuple ``(master, run_seed, crc32(scope), crc32(component))``,
so a stream depends only on its own labels: adding a method to an
experiment never changes the draws of another method.
"""
from __future__ import annotations

import zlib

import numpy as np


def _label(text: str) -> int:
    return zlib.crc32(text.encode("utf-8"))


def stream_seed(master: int, run_seed: int, scope: str, component: str = "") -> int:
    """A 63-bit integer seed for the stream named by ``(scope, component)``."""
    ss = np.random.SeedSequence([int(master) & 0xFFFFFFFF, int(run_seed) & 0xFFFFFFFF, _label(scope), _label(component)])
    return int(ss.generate_state(1, dtype=np.uint64)[0]) >> 1


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))
