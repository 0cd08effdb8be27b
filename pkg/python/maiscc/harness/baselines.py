"""Fixed-position (FPA) and random-position (RPA) antenna baselines."""
from __future__ import annotations

import logging
import math

import numpy as np

from maiscc.config import ScenarioConfig
from maiscc.errors import InfeasibleScenarioError
from maiscc.system.geometry import AntennaLayout, FloatArray, sample_feasible_layout

logger = logging.getLogger("maiscc.harness.baselines")

RPA_MAX_ATTEMPTS = 10_000


def fpa_array(n_antennas: int, min_spacing: float, region_size: float) -> FloatArray:
    """Uniform grid at ``min_spacing`` pitch, filled row-major and centred in the region.

    The grid has ``ceil(√N)`` columns, so ``N = 4`` gives a 2×2 array.
    """
    cols = math.ceil(math.sqrt(n_antennas))
    rows = math.ceil(n_antennas / cols)
    width = (cols - 1) * min_spacing
    height = (rows - 1) * min_spacing
    if width > region_size or height > region_size:
        raise InfeasibleScenarioError(
            f"a {rows}x{cols} grid at spacing {min_spacing:g} does not fit in U={region_size:g}"
        )
    x0 = (region_size - width) / 2.0
    y0 = (region_size - height) / 2.0
    idx = np.arange(n_antennas)
    return np.column_stack([x0 + (idx % cols) * min_spacing, y0 + (idx // cols) * min_spacing])


def fpa_layout(config: ScenarioConfig) -> AntennaLayout:
    """The same centred grid on every AAV."""
    array = fpa_array(config.n_antennas, config.min_spacing, config.region_size)
    return AntennaLayout(np.repeat(array[None, :, :], config.n_aavs, axis=0))


def rpa_layout(rng: np.random.Generator, config: ScenarioConfig) -> AntennaLayout:
    """Independent uniformly random arrays that respect the spacing constraint.

    Raises
    ------
    SamplingBudgetError:
        If some AAV's array was not found within ``RPA_MAX_ATTEMPTS`` draws.
    """
    return sample_feasible_layout(
        rng,
        config.n_aavs,
        config.n_antennas,
        config.min_spacing,
        config.region_size,
        max_attempts=RPA_MAX_ATTEMPTS,
    )
