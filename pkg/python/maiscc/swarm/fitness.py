"""Penalized fitness of one particle (a stacked MA-coordinate vector)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

from maiscc.config import PsoParams
from maiscc.solver.inner import BeamSolver, solve_inner
from maiscc.system.channel import ChannelRealization, ScenarioInstance
from maiscc.system.geometry import AntennaLayout
from maiscc.system.metrics import InnerSolution

# Stand-in latency (s) for an infinite Φ so penalties still order the particles.
INFEASIBLE_PHI = 1e6


@dataclass(frozen=True)
class Violations:
    """Per-particle violation counts: antenna pairs below ``u_min`` and sensing-failed AAVs."""

    spacing: int = 0
    sensing: int = 0

    @property
    def total(self) -> int:
        return self.spacing + self.sensing


@dataclass
class FitnessResult:
    fitness: float
    solution: InnerSolution
    violations: Violations
    layout: AntennaLayout
    channels: ChannelRealization


def penalized_fitness(phi: float, violations: Violations, params: PsoParams) -> float:
    """``Φ + ψ1·|Ψ1| + ψ2·|Ψ2|`` with ``INFEASIBLE_PHI`` substituted for an infinite ``Φ``."""
    base = phi if math.isfinite(phi) else INFEASIBLE_PHI
    return base + params.psi_spacing * violations.spacing + params.psi_sensing * violations.sensing


def evaluate_fitness(
    position: Any,
    instance: ScenarioInstance,
    params: PsoParams,
    beam_solver: BeamSolver | None = None,
) -> FitnessResult:
    """Solve the inner layer for the layout encoded by *position* and penalize violations."""
    config = instance.config
    layout = AntennaLayout.from_vector(position, config.n_aavs, config.n_antennas)
    channels = instance.channels(layout)
    solution = solve_inner(layout, config, channels, beam_solver=beam_solver)
    violations = Violations(
        spacing=layout.spacing_violations(config.min_spacing),
        sensing=solution.sensing_violations,
    )
    return FitnessResult(
        fitness=penalized_fitness(solution.phi, violations, params),
        solution=solution,
        violations=violations,
        layout=layout,
        channels=channels,
    )
