"""Tests for maiscc.harness.sweep."""
from __future__ import annotations

import math

import pytest

from maiscc.config import PsoParams, Scheme, ScenarioSettings, SweepSpec
from maiscc.errors import ConfigError, InfeasibleScenarioError
from maiscc.harness.scenario import build_scenario
from maiscc.harness.sweep import (
    SweepRow,
    SweepTable,
    apply_sweep_value,
    baseline_layouts,
    convergence_trace,
    evaluate_scheme,
    plateau_iteration,
    run_sweep,
)
from maiscc.system.channel import ScenarioInstance

TINY_PSO = PsoParams(swarm_size=4, max_iterations=2)


def _row(value: float, scheme: str, phi: float, feasible: bool = True) -> SweepRow:
    return SweepRow("f_bs_max", value, scheme, 0, 0, phi, 0.0, 0.0, feasible)


class TestSweepTable:
    def test_summary_statistics(self) -> None:
        table = SweepTable("f_bs_max", [_row(1.0, "fpa", 2.0), _row(1.0, "fpa", 4.0)])
        (s,) = table.summary()
        assert (s.mean_phi, s.count, s.failed) == (3.0, 2, 0)
        assert s.std_phi == pytest.approx(math.sqrt(2.0))

    def test_single_cell_std_is_nan(self) -> None:
        (s,) = SweepTable("f_bs_max", [_row(1.0, "fpa", 2.0)]).summary()
        assert math.isnan(s.std_phi)

    def test_failed_cells_excluded(self) -> None:
        table = SweepTable(
            "f_bs_max", [_row(1.0, "ma", 2.0), _row(1.0, "ma", math.inf, feasible=False)]
        )
        (s,) = table.summary()
        assert (s.mean_phi, s.count, s.failed) == (2.0, 1, 1)


class TestApplySweepValue:
    def test_power(self) -> None:
        assert apply_sweep_value(ScenarioSettings(), "P_max", 2.0).p_max == 2.0

    def test_antennas_cast_to_int(self) -> None:
        assert apply_sweep_value(ScenarioSettings(), "N", 6.0).n_antennas == 6

    def test_m_requires_derived_lists(self) -> None:
        settings = ScenarioSettings(n_aavs=1, task_bits=[1e7])
        with pytest.raises(ConfigError):
            apply_sweep_value(settings, "M", 2.0)

    def test_unknown_variable(self) -> None:
        with pytest.raises(ConfigError):
            apply_sweep_value(ScenarioSettings(), "kappa", 1.0)


class TestEvaluateScheme:
    def test_baselines_have_single_point_trace(self, default_instance: ScenarioInstance) -> None:
        for scheme in (Scheme.FPA, Scheme.RPA):
            result = evaluate_scheme(default_instance, scheme, TINY_PSO)
            assert len(result.trace) == 1
            assert result.feasible

    def test_ma_never_worse_than_baselines(self, default_instance: ScenarioInstance) -> None:
        ma = evaluate_scheme(default_instance, "ma", TINY_PSO)
        for scheme in ("fpa", "rpa"):
            assert ma.fitness <= evaluate_scheme(default_instance, scheme, TINY_PSO).fitness

    def test_infeasible_for_every_scheme(self) -> None:
        inst = build_scenario(0, {"gamma_min": 1.0})
        for scheme in Scheme:
            with pytest.raises(InfeasibleScenarioError):
                evaluate_scheme(inst, scheme, TINY_PSO)

    def test_baseline_layouts_order(self, default_instance: ScenarioInstance) -> None:
        layouts = baseline_layouts(default_instance)
        assert len(layouts) == 2

    def test_convergence_trace_length(self, small_instance: ScenarioInstance) -> None:
        assert len(convergence_trace(small_instance, TINY_PSO)) == 3


class TestRunSweep:
    def test_fpa_monotone_in_compute(self) -> None:
        spec = SweepSpec(values=[5e9, 1e10, 2e10], instances=2, schemes=["fpa"])
        table = run_sweep(spec, ScenarioSettings(), TINY_PSO, master_seed=1)
        assert len(table.rows) == 6
        for k in range(2):
            phis = table.column("fpa", k)
            assert all(b < a for a, b in zip(phis, phis[1:]))

    def test_fpa_monotone_in_power(self) -> None:
        spec = SweepSpec(variable="P_max", values=[0.5, 1.0, 2.0], instances=1, schemes=["FPA"])
        phis = run_sweep(spec, ScenarioSettings(), TINY_PSO).column("fpa", 0)
        assert all(b <= a for a, b in zip(phis, phis[1:]))

    def test_row_order_independent_of_workers(self) -> None:
        spec = SweepSpec(values=[1e10, 2e10], instances=2, schemes=["ma", "fpa"],
                         pso={"swarm_size": 3, "max_iterations": 1})
        a = run_sweep(spec, ScenarioSettings(n_aavs=2), TINY_PSO, workers=1)
        b = run_sweep(spec, ScenarioSettings(n_aavs=2), TINY_PSO, workers=3)
        assert a.rows == b.rows
        assert [(r.value, r.scheme, r.instance) for r in a.rows] == [
            (v, s, k) for v in (1e10, 2e10) for s in ("ma", "fpa") for k in (0, 1)
        ]

    def test_failed_cells_recorded(self) -> None:
        spec = SweepSpec(variable="N", values=[1, 4], instances=1, schemes=["fpa"])
        table = run_sweep(spec, ScenarioSettings(), TINY_PSO)
        first, second = table.rows
        assert not first.feasible and math.isinf(first.phi) and "sensing infeasible" in first.error
        assert second.feasible


class TestPlateauIteration:
    def test_flat_trace(self) -> None:
        assert plateau_iteration([2.0, 2.0, 2.0]) == 0

    def test_first_point_within_tolerance(self) -> None:
        assert plateau_iteration([3.0, 2.5, 2.015, 2.01, 2.0]) == 2

    def test_late_drop_has_no_plateau(self) -> None:
        trace = [2.0] * 10 + [1.0]
        assert plateau_iteration(trace) == len(trace) - 1

    def test_tolerance(self) -> None:
        assert plateau_iteration([1.1, 1.0], rtol=0.2) == 0
        assert plateau_iteration([1.1, 1.0], rtol=0.05) == 1

    def test_empty(self) -> None:
        with pytest.raises(ValueError):
            plateau_iteration([])


ACCEPTANCE_PSO = PsoParams(swarm_size=10, max_iterations=10)


@pytest.mark.slow
class TestAcceptance:
    """Seeded acceptance runs on the default scenario (M=3, N=4)."""

    def test_swarm_contract_on_ten_seeds(self) -> None:
        params = PsoParams(swarm_size=30, max_iterations=50)
        settled = 0
        for seed in range(10):
            instance = build_scenario(seed)
            serial = evaluate_scheme(instance, "ma", params).trace
            threaded = evaluate_scheme(instance, "ma", params, workers=4).trace
            assert serial == threaded
            assert len(serial) == params.max_iterations + 1
            assert all(b <= a for a, b in zip(serial, serial[1:]))
            settled += plateau_iteration(serial) < params.max_iterations
        assert settled >= 8

    def test_ma_never_worse_than_baselines_on_twenty_seeds(self) -> None:
        for seed in range(20):
            instance = build_scenario(seed)
            ma = evaluate_scheme(instance, "ma", ACCEPTANCE_PSO)
            assert ma.feasible
            for scheme in ("fpa", "rpa"):
                base = evaluate_scheme(instance, scheme, ACCEPTANCE_PSO)
                assert ma.fitness <= base.fitness
                assert ma.solution.phi <= base.solution.phi

    def test_more_antennas_lower_mean_latency(self) -> None:
        spec = SweepSpec(variable="N", values=[2, 4, 6, 8], instances=20, schemes=["ma"])
        summary = run_sweep(spec, ScenarioSettings(), ACCEPTANCE_PSO).summary()
        means = [s.mean_phi for s in summary]
        assert all(s.failed == 0 for s in summary)
        assert all(b <= a for a, b in zip(means, means[1:])), means

    def test_more_aavs_higher_mean_latency(self) -> None:
        spec = SweepSpec(variable="M", values=[2, 3, 4], instances=20, schemes=["ma"])
        summary = run_sweep(spec, ScenarioSettings(), ACCEPTANCE_PSO).summary()
        means = [s.mean_phi for s in summary]
        assert all(s.failed == 0 for s in summary)
        assert all(b >= a for a, b in zip(means, means[1:])), means
