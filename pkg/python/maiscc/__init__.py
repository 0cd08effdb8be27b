"""maiscc - movable-antenna placement and latency minimization for multi-AAV ISCC."""
from __future__ import annotations

from maiscc.config import PsoParams, RunConfig, ScenarioConfig, ScenarioSettings, Scheme, SweepSpec
from maiscc.errors import (
    ConfigError,
    DegenerateGeometryError,
    InfeasibleScenarioError,
    MaisccError,
    NotPsdError,
    OutputError,
    SamplingBudgetError,
)
from maiscc.harness.scenario import build_scenario
from maiscc.harness.sweep import run_sweep
from maiscc.solver.inner import solve_inner
from maiscc.swarm.optimizer import run_optimizer

__version__ = "0.1.0"

__all__ = [
    # Config
    "PsoParams",
    "RunConfig",
    "ScenarioConfig",
    "ScenarioSettings",
    "Scheme",
    "SweepSpec",
    # Errors
    "ConfigError",
    "DegenerateGeometryError",
    "InfeasibleScenarioError",
    "MaisccError",
    "NotPsdError",
    "OutputError",
    "SamplingBudgetError",
    # Entry points
    "build_scenario",
    "run_optimizer",
    "run_sweep",
    "solve_inner",
    "__version__",
]
