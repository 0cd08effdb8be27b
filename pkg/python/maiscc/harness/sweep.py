"""Monte-Carlo sweeps over one system parameter, comparing MA against the baselines."""
from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, get_args

import numpy as np

from maiscc.config import PsoParams, Scheme, ScenarioSettings, SweepSpec, SweepVariable
from maiscc.errors import ConfigError, MaisccError, SamplingBudgetError
from maiscc.harness.baselines import fpa_layout, rpa_layout
from maiscc.harness.scenario import build_scenario
from maiscc.rng import Stream, derive_seed, stream
from maiscc.solver.inner import BeamSolver
from maiscc.swarm.fitness import evaluate_fitness
from maiscc.swarm.optimizer import (
    OptimizationResult,
    check_sensing_feasible,
    run_optimizer,
)
from maiscc.system.channel import ScenarioInstance
from maiscc.system.geometry import AntennaLayout

logger = logging.getLogger("maiscc.harness.sweep")

SWEEP_VARIABLES: tuple[str, ...] = get_args(SweepVariable)


@dataclass(frozen=True)
class SweepRow:
    """One (value, scheme, instance) cell of a sweep."""

    variable: str
    value: float
    scheme: str
    instance: int
    seed: int
    phi: float
    t_tran_max: float
    t_comp_max: float
    feasible: bool
    fitness: float = math.inf
    error: str = ""


@dataclass(frozen=True)
class SummaryRow:
    value: float
    scheme: str
    mean_phi: float
    std_phi: float
    count: int
    failed: int


@dataclass
class SweepTable:
    """Rows ordered by (value, scheme, instance)."""

    variable: str
    rows: list[SweepRow] = field(default_factory=list)

    def summary(self) -> list[SummaryRow]:
        """Mean and sample standard deviation of ``phi`` per (value, scheme).

        Failed or infeasible cells are counted but excluded from the statistics; a group with a
        single usable cell has an undefined (NaN) standard deviation.
        """
        groups: dict[tuple[float, str], list[SweepRow]] = {}
        for row in self.rows:
            groups.setdefault((row.value, row.scheme), []).append(row)
        out: list[SummaryRow] = []
        for (value, scheme), rows in groups.items():
            phis = np.array([r.phi for r in rows if r.feasible and math.isfinite(r.phi)])
            mean = float(phis.mean()) if phis.size else math.nan
            std = float(phis.std(ddof=1)) if phis.size > 1 else math.nan
            out.append(
                SummaryRow(
                    value=value,
                    scheme=scheme,
                    mean_phi=mean,
                    std_phi=std,
                    count=int(phis.size),
                    failed=len(rows) - int(phis.size),
                )
            )
        return out

    def column(self, scheme: str, instance: int) -> list[float]:
        """``phi`` along the swept values for one (scheme, instance)."""
        return [r.phi for r in self.rows if r.scheme == scheme and r.instance == instance]


def apply_sweep_value(settings: ScenarioSettings, variable: str, value: float) -> ScenarioSettings:
    """Copy of *settings* with the swept parameter set to *value*."""
    if variable == "f_bs_max":
        update: dict[str, Any] = {"f_bs_max": float(value)}
    elif variable == "P_max":
        update = {"p_max": float(value)}
    elif variable == "N":
        update = {"n_antennas": int(value)}
    elif variable == "M":
        if any(
            v is not None
            for v in (settings.aav_positions, settings.target_positions, settings.task_bits)
        ) or isinstance(settings.p_max, list):
            raise ConfigError(
                "sweeping M requires derived per-AAV lists",
                field="scenario",
                expected="aav_positions, target_positions, task_bits unset and scalar p_max",
            )
        update = {"n_aavs": int(value)}
    else:
        raise ConfigError(f"unknown sweep variable {variable!r}", field="sweep.variable",
                          expected=" | ".join(SWEEP_VARIABLES))
    return ScenarioSettings(**{**settings.model_dump(), **update})


def baseline_layouts(instance: ScenarioInstance) -> list[AntennaLayout]:
    """FPA and (when it can be sampled) RPA layouts of *instance*, in that order."""
    layouts = [fpa_layout(instance.config)]
    try:
        layouts.append(rpa_layout(stream(instance.config.seed, Stream.RPA), instance.config))
    except SamplingBudgetError:
        logger.warning("RPA sampling failed for seed %d; seeding FPA only", instance.config.seed)
    return layouts


def evaluate_scheme(
    instance: ScenarioInstance,
    scheme: Scheme | str,
    params: PsoParams,
    workers: int = 1,
    seed_baselines: bool = True,
    beam_solver: BeamSolver | None = None,
) -> OptimizationResult:
    """Layout and inner solution of one scheme on one instance.

    FPA and RPA evaluate their fixed layout once (a one-point trace); MA runs the swarm with
    the baseline layouts injected as the first particles when *seed_baselines* is set.

    Raises
    ------
    InfeasibleScenarioError:
        If the sensing requirement is unattainable (checked for every scheme).
    """
    scheme = Scheme(scheme)
    config = instance.config
    check_sensing_feasible(config)
    if scheme is Scheme.MA:
        seeded = baseline_layouts(instance) if seed_baselines else []
        return run_optimizer(
            instance, params, seeded_layouts=seeded, workers=workers, beam_solver=beam_solver
        )
    if scheme is Scheme.FPA:
        layout = fpa_layout(config)
    else:
        layout = rpa_layout(stream(config.seed, Stream.RPA), config)
    fit = evaluate_fitness(layout.to_vector(), instance, params, beam_solver)
    return OptimizationResult(
        layout=fit.layout,
        solution=fit.solution,
        channels=fit.channels,
        fitness=fit.fitness,
        violations=fit.violations,
        trace=[fit.fitness],
        feasible=fit.violations.total == 0 and fit.solution.feasible,
    )


def convergence_trace(
    instance: ScenarioInstance,
    params: PsoParams,
    workers: int = 1,
) -> list[float]:
    """gbest fitness after initialization and after each of the ``max_iterations`` iterations."""
    return run_optimizer(instance, params, workers=workers).trace


def plateau_iteration(trace: Sequence[float], rtol: float = 1e-2) -> int:
    """First iteration whose gbest lies within *rtol* (relative) of the final gbest.

    A trace "plateaus before i_max" when this is smaller than ``len(trace) - 1``. Non-finite
    finals (every particle infeasible) plateau only where the trace first reaches them.
    """
    if not trace:
        raise ValueError("empty trace")
    final = trace[-1]
    if not math.isfinite(final):
        return next(i for i, v in enumerate(trace) if v == final)
    bound = final + rtol * abs(final)
    return next(i for i, v in enumerate(trace) if v <= bound)


@dataclass(frozen=True)
class _Cell:
    value_index: int
    value: float
    scheme: Scheme
    instance: int


def run_sweep(
    spec: SweepSpec,
    base: ScenarioSettings,
    params: PsoParams,
    master_seed: int = 0,
    workers: int = 1,
) -> SweepTable:
    """Evaluate every (value, scheme, instance) cell of *spec*.

    Instance ``k`` uses the seed ``derive_seed(master, variable, k)`` for every value, so task
    sizes, NLoS draws and the FPA/RPA layouts stay fixed along the sweep whenever ``M`` and
    ``N`` do. Cells run on a thread pool of *workers*; a structured error in one cell is recorded
    as a failed row and the sweep continues. Row order never depends on *workers*.
    """
    variable_index = SWEEP_VARIABLES.index(spec.variable)
    params = spec.pso_params(params)
    cells = [
        _Cell(vi, value, Scheme(scheme), k)
        for vi, value in enumerate(spec.values)
        for scheme in spec.schemes
        for k in range(spec.instances)
    ]

    def run_cell(cell: _Cell) -> SweepRow:
        seed = derive_seed(master_seed, Stream.CELL, variable_index, cell.instance)
        try:
            settings = apply_sweep_value(base, spec.variable, cell.value)
            instance = build_scenario(seed, settings)
            result = evaluate_scheme(instance, cell.scheme, params)
        except MaisccError as exc:
            logger.warning(
                "Sweep cell %s=%g %s #%d failed: %s",
                spec.variable, cell.value, cell.scheme.value, cell.instance, exc,
            )
            return SweepRow(
                variable=spec.variable, value=cell.value, scheme=cell.scheme.value,
                instance=cell.instance, seed=seed, phi=math.inf, t_tran_max=math.inf,
                t_comp_max=math.inf, feasible=False, error=str(exc),
            )
        sol = result.solution
        logger.info(
            "Sweep cell %s=%g %s #%d: phi=%.6g",
            spec.variable, cell.value, cell.scheme.value, cell.instance, sol.phi,
        )
        return SweepRow(
            variable=spec.variable,
            value=cell.value,
            scheme=cell.scheme.value,
            instance=cell.instance,
            seed=seed,
            phi=sol.phi,
            t_tran_max=float(np.max(sol.t_tran)),
            t_comp_max=float(np.max(sol.t_comp)),
            feasible=result.feasible,
            fitness=result.fitness,
        )

    rows = _map(run_cell, cells, workers)
    return SweepTable(variable=spec.variable, rows=rows)


def _map(fn: Any, items: Sequence[Any], workers: int) -> list[Any]:
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
