"""Seed-derived random streams.

Every random draw in the package comes from :func:`stream`, keyed by the master seed and a tuple
of non-negative integers, so results never depend on evaluation order or thread count.
"""
from __future__ import annotations

from enum import IntEnum

import numpy as np


class Stream(IntEnum):
    """Stream tags separating the independent consumers of one master seed."""

    TASKS = 1
    NLOS = 2
    SWARM_INIT = 3
    SWARM_STEP = 4
    RPA = 5
    CELL = 6
    VALIDATION = 7


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Return a generator for the sub-stream ``(seed, *keys)``."""
    if seed < 0 or any(k < 0 for k in keys):
        raise ValueError("seed and stream keys must be non-negative")
    return np.random.default_rng(np.random.SeedSequence([seed, *keys]))


def derive_seed(seed: int, *keys: int) -> int:
    """Hash ``(seed, *keys)`` into a fresh 32-bit master seed."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])
