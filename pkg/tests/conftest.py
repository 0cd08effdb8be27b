"""Shared pytest fixtures for the maiscc test suite."""
from __future__ import annotations

import math

import numpy as np
import pytest

from maiscc.config import PsoParams
from maiscc.harness.baselines import fpa_layout
from maiscc.harness.scenario import build_scenario
from maiscc.system.channel import ScenarioInstance
from maiscc.system.geometry import AntennaLayout

# Default AAV-to-target distance (m): 50 m altitude, 20 m horizontal offset.
DEFAULT_TARGET_DISTANCE = math.hypot(50.0, 20.0)


@pytest.fixture()
def default_instance() -> ScenarioInstance:
    """Default scenario (M=3, N=4) at seed 0."""
    return build_scenario(0)


@pytest.fixture()
def small_instance() -> ScenarioInstance:
    """Two AAVs with two antennas each and a binding sensing requirement."""
    return build_scenario(
        3, {"n_aavs": 2, "n_antennas": 2, "gamma_min": 0.5 * 2 / DEFAULT_TARGET_DISTANCE**2}
    )


@pytest.fixture()
def default_fpa(default_instance: ScenarioInstance) -> AntennaLayout:
    return fpa_layout(default_instance.config)


@pytest.fixture()
def fast_pso() -> PsoParams:
    """A swarm small enough for unit tests."""
    return PsoParams(swarm_size=8, max_iterations=6, log_every=2)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
