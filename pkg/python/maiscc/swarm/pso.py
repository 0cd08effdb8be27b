"""Box-constrained particle swarm with deterministic, parallel-safe bookkeeping."""
from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from maiscc.config import PsoParams
from maiscc.rng import Stream, stream
from maiscc.system.geometry import FloatArray

logger = logging.getLogger("maiscc.swarm.pso")

FitnessFn = Callable[[FloatArray], float]
Initializer = Callable[[np.random.Generator], FloatArray]


@dataclass
class SwarmState:
    """Positions, velocities and best-so-far bookkeeping of the whole swarm.

    Attributes
    ----------
    positions, velocities:
        ``(P, D)`` arrays; positions always lie in ``[0, upper]``.
    pbest_positions, pbest_fitness:
        Best position and fitness seen by each particle.
    gbest_position, gbest_fitness, gbest_index:
        Best position/fitness seen by any particle and the particle that found it.
    iteration:
        Completed iterations (0 right after initialization).
    trace:
        ``gbest_fitness`` after initialization and after every iteration.
    """

    positions: FloatArray
    velocities: FloatArray
    pbest_positions: FloatArray
    pbest_fitness: FloatArray
    gbest_position: FloatArray
    gbest_fitness: float = float("inf")
    gbest_index: int = -1
    iteration: int = 0
    trace: list[float] = field(default_factory=list)

    @classmethod
    def empty(cls, positions: FloatArray) -> SwarmState:
        n, dim = positions.shape
        return cls(
            positions=positions,
            velocities=np.zeros((n, dim)),
            pbest_positions=positions.copy(),
            pbest_fitness=np.full(n, np.inf),
            gbest_position=positions[0].copy(),
        )

    @property
    def size(self) -> int:
        return int(self.positions.shape[0])


def inertia_weight(iteration: int, params: PsoParams) -> float:
    """Linearly decayed inertia ``ω_max − (ω_max − ω_min)·i/i_max``."""
    if params.max_iterations == 0:
        return params.omega_max
    frac = min(max(iteration, 0), params.max_iterations) / params.max_iterations
    return params.omega_max - (params.omega_max - params.omega_min) * frac


def update_velocity(
    state: SwarmState,
    p: int,
    tau1: float,
    tau2: float,
    omega: float,
    params: PsoParams,
    v_max: float | None = None,
) -> FloatArray:
    """``ν' = ω·ν + c1·τ1·(pbest − x) + c2·τ2·(gbest − x)``, optionally clamped to ``±v_max``."""
    x = state.positions[p]
    v = (
        omega * state.velocities[p]
        + params.c1 * tau1 * (state.pbest_positions[p] - x)
        + params.c2 * tau2 * (state.gbest_position - x)
    )
    if v_max is not None:
        v = np.clip(v, -v_max, v_max)
    return v


def update_position_project(
    state: SwarmState,
    p: int,
    velocity: FloatArray,
    params: PsoParams,
    upper: float,
) -> FloatArray:
    """``x' = clip(x + ϖ·ν', 0, upper)`` elementwise."""
    return np.clip(state.positions[p] + params.step * velocity, 0.0, upper)


def update_bests(state: SwarmState, p: int, fitness: float, position: FloatArray) -> SwarmState:
    """Record *fitness* at *position* for particle *p*; only strict improvements replace a best."""
    if fitness < state.pbest_fitness[p]:
        state.pbest_fitness[p] = fitness
        state.pbest_positions[p] = position
    if fitness < state.gbest_fitness:
        state.gbest_fitness = float(fitness)
        state.gbest_position = position.copy()
        state.gbest_index = p
    return state


class ParticleSwarm:
    """Minimize *fitness* over the box ``[0, upper]^dim``.

    Fitness values of one iteration are evaluated independently (optionally on a thread pool)
    and folded into the bests in ascending particle index, so results are identical for any
    ``workers`` value. Every random draw comes from a stream keyed by ``(seed, iteration,
    particle)``.

    Parameters
    ----------
    fitness:
        Objective to minimize; must be safe to call concurrently when ``workers > 1``.
    dim:
        Dimension of the search space.
    upper:
        Upper bound of every coordinate (the lower bound is 0).
    params:
        Swarm hyper-parameters.
    seed:
        Master seed.
    workers:
        Thread count for fitness evaluation.
    initializer:
        Optional draw of one initial position from a generator (default: uniform in the box).
    seeded_positions:
        Positions that replace the first particles of the initial swarm.
    """

    def __init__(
        self,
        fitness: FitnessFn,
        dim: int,
        upper: float,
        params: PsoParams,
        seed: int = 0,
        workers: int = 1,
        initializer: Initializer | None = None,
        seeded_positions: Sequence[FloatArray] = (),
    ) -> None:
        if len(seeded_positions) > params.swarm_size:
            raise ValueError("more seeded positions than particles")
        self._fitness = fitness
        self._dim = dim
        self._upper = upper
        self._params = params
        self._seed = seed
        self._workers = max(1, workers)
        self._initializer = initializer
        self._seeded = [np.asarray(s, dtype=float).reshape(dim) for s in seeded_positions]
        self._v_max = params.velocity_limit if params.velocity_limit is not None else upper
        self._pool: ThreadPoolExecutor | None = None

    # ------------------------------------------------------------------
    # Public API
    # ------------------------------------------------------------------

    def initialize(self) -> SwarmState:
        """Draw the initial swarm, evaluate it and seed the bests (zero velocities)."""
        n = self._params.swarm_size
        rng = stream(self._seed, Stream.SWARM_INIT)
        if self._initializer is None:
            positions = rng.uniform(0.0, self._upper, size=(n, self._dim))
        else:
            positions = np.stack([self._initializer(rng) for _ in range(n)])
        for k, seeded in enumerate(self._seeded):
            positions[k] = np.clip(seeded, 0.0, self._upper)

        state = SwarmState.empty(positions)
        for p, fit in enumerate(self._evaluate(positions)):
            update_bests(state, p, fit, positions[p].copy())
        state.trace.append(state.gbest_fitness)
        logger.info(
            "Swarm initialized: %d particles, dim=%d, gbest=%.6g (particle %d)",
            n, self._dim, state.gbest_fitness, state.gbest_index,
        )
        return state

    def step(self, state: SwarmState) -> SwarmState:
        """Advance every particle once, then fold the new fitness values into the bests."""
        omega = inertia_weight(state.iteration, self._params)
        new_positions = np.empty_like(state.positions)
        for p in range(state.size):
            tau1, tau2 = stream(self._seed, Stream.SWARM_STEP, state.iteration, p).random(2)
            v = update_velocity(state, p, float(tau1), float(tau2), omega, self._params, self._v_max)
            state.velocities[p] = v
            new_positions[p] = update_position_project(state, p, v, self._params, self._upper)
        state.positions = new_positions

        for p, fit in enumerate(self._evaluate(new_positions)):
            update_bests(state, p, fit, new_positions[p].copy())
        state.iteration += 1
        state.trace.append(state.gbest_fitness)
        if state.iteration % self._params.log_every == 0:
            logger.info(
                "Iteration %d/%d: omega=%.3f gbest=%.6g",
                state.iteration, self._params.max_iterations, omega, state.gbest_fitness,
            )
        return state

    def run(self) -> SwarmState:
        """Initialize and run ``max_iterations`` iterations on one shared thread pool."""
        if self._workers == 1:
            return self._run()
        with ThreadPoolExecutor(max_workers=self._workers) as pool:
            self._pool = pool
            try:
                return self._run()
            finally:
                self._pool = None

    # ------------------------------------------------------------------
    # Internal helpers
    # ------------------------------------------------------------------

    def _run(self) -> SwarmState:
        state = self.initialize()
        for _ in range(self._params.max_iterations):
            self.step(state)
        return state

    def _evaluate(self, positions: FloatArray) -> list[float]:
        rows = [positions[p] for p in range(positions.shape[0])]
        if self._workers == 1:
            return [float(self._fitness(x)) for x in rows]
        if self._pool is not None:
            return [float(f) for f in self._pool.map(self._fitness, rows)]
        with ThreadPoolExecutor(max_workers=self._workers) as pool:
            return [float(f) for f in pool.map(self._fitness, rows)]
