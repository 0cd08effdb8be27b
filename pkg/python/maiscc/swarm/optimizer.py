"""Two-layer optimizer: swarm over antenna positions, inner solve per particle."""
from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from maiscc.config import PsoParams, ScenarioConfig
from maiscc.errors import InfeasibleScenarioError
from maiscc.solver.beamforming import sensing_feasibility
from maiscc.solver.inner import BeamSolver
from maiscc.swarm.fitness import FitnessResult, Violations, evaluate_fitness
from maiscc.swarm.pso import Initializer, ParticleSwarm, SwarmState
from maiscc.system.channel import ChannelRealization, ScenarioInstance
from maiscc.system.geometry import (
    AntennaLayout,
    FloatArray,
    direction_cosines,
    repair_spacing,
    sample_feasible_layout,
)
from maiscc.system.metrics import InnerSolution

logger = logging.getLogger("maiscc.swarm.optimizer")


@dataclass
class OptimizationResult:
    """Best layout found by the swarm, its re-solved inner solution and the gbest trace."""

    layout: AntennaLayout
    solution: InnerSolution
    channels: ChannelRealization
    fitness: float
    violations: Violations
    trace: list[float] = field(default_factory=list)
    feasible: bool = True
    repaired: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "fitness": self.fitness,
            "feasible": self.feasible,
            "repaired": self.repaired,
            "violations": {"spacing": self.violations.spacing, "sensing": self.violations.sensing},
            "layout": self.layout.to_dict(),
            "solution": self.solution.to_dict(),
            "trace": list(self.trace),
        }


def repair_layout(layout: AntennaLayout, config: ScenarioConfig) -> tuple[AntennaLayout, bool]:
    """Nudge violating antenna pairs apart inside the region; returns the copy and success."""
    return repair_spacing(layout, config.min_spacing, config.region_size)


def check_sensing_feasible(config: ScenarioConfig) -> None:
    """Raise if any AAV cannot meet its sensing requirement with any layout.

    The best achievable gain ``P_max·N`` does not depend on antenna positions.
    """
    for m in range(config.n_aavs):
        d = direction_cosines(config.aav_positions[m], config.target_positions[m]).dist
        if not sensing_feasibility(config.p_max[m], config.n_antennas, d, config.gamma_min):
            raise InfeasibleScenarioError(
                f"AAV {m}: sensing infeasible (P_max·N={config.p_max[m] * config.n_antennas:.4g}"
                f" < d²·Γ_min={config.sensing_threshold(d):.4g})"
            )


def run_optimizer(
    instance: ScenarioInstance,
    params: PsoParams,
    seeded_layouts: Sequence[AntennaLayout] = (),
    workers: int = 1,
    beam_solver: BeamSolver | None = None,
) -> OptimizationResult:
    """Minimize the penalized max latency over MA positions.

    *seeded_layouts* replace the first particles of the initial swarm, so the result is never
    worse than any of them. If the best particle still violates the spacing constraint, a
    repair pass nudges the offending antennas apart and the layout is re-evaluated.

    Raises
    ------
    InfeasibleScenarioError:
        If the sensing requirement is unattainable for some AAV.
    """
    config = instance.config
    check_sensing_feasible(config)

    def fitness(x: FloatArray) -> float:
        return evaluate_fitness(x, instance, params, beam_solver).fitness

    def feasible_draw(rng: np.random.Generator) -> FloatArray:
        return sample_feasible_layout(
            rng, config.n_aavs, config.n_antennas, config.min_spacing, config.region_size
        ).to_vector()

    initializer: Initializer | None = feasible_draw if params.init == "feasible" else None

    swarm = ParticleSwarm(
        fitness=fitness,
        dim=config.dim,
        upper=config.region_size,
        params=params,
        seed=config.seed,
        workers=workers,
        initializer=initializer,
        seeded_positions=[layout.to_vector() for layout in seeded_layouts],
    )
    state = swarm.run()
    best = evaluate_fitness(state.gbest_position, instance, params, beam_solver)
    return _finalize(best, state, instance, params, beam_solver)


def _finalize(
    best: FitnessResult,
    state: SwarmState,
    instance: ScenarioInstance,
    params: PsoParams,
    beam_solver: BeamSolver | None,
) -> OptimizationResult:
    config = instance.config
    repaired = False
    if best.violations.spacing:
        logger.warning(
            "Best particle violates spacing on %d pair(s); running repair", best.violations.spacing
        )
        layout, ok = repair_layout(best.layout, config)
        best = evaluate_fitness(layout.to_vector(), instance, params, beam_solver)
        repaired = True
        if not ok:
            logger.error("Repair failed; reporting an infeasible layout")
    feasible = best.violations.total == 0 and best.solution.feasible
    logger.info(
        "Optimization finished: fitness=%.6g phi=%.6g feasible=%s", best.fitness,
        best.solution.phi, feasible,
    )
    return OptimizationResult(
        layout=best.layout,
        solution=best.solution,
        channels=best.channels,
        fitness=best.fitness,
        violations=best.violations,
        trace=list(state.trace),
        feasible=feasible,
        repaired=repaired,
    )
