"""Tests for maiscc.solver.beamforming."""
from __future__ import annotations

import math

import numpy as np
import pytest

from maiscc.solver.beamforming import (
    BeamMethod,
    decompose,
    residual_split,
    sensing_feasibility,
    solve_beamforming_per_aav,
)
from maiscc.solver.oracles import oracle_beamforming_grid
from maiscc.system.geometry import DirectionCosines, steering_vector
from maiscc.system.metrics import beampattern_gain


def _random_case(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    h = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * 1e-5
    g = steering_vector(rng.uniform(0, 5, size=(n, 2)), DirectionCosines(0.4, -0.3, 1.0))
    return h, g


class TestSensingFeasibility:
    def test_boundary_is_feasible(self) -> None:
        assert sensing_feasibility(1.0, 4, 1.0, 4.0)

    def test_exceeding_gain_bound(self) -> None:
        assert not sensing_feasibility(1.0, 4, 1.0, 5.0)

    def test_zero_threshold(self) -> None:
        assert sensing_feasibility(1e-9, 1, 1e3, 0.0)


class TestDecompose:
    def test_reconstructs_target_vector(self, rng: np.random.Generator) -> None:
        h, g = _random_case(rng, 3)
        sub = decompose(h, g)
        np.testing.assert_allclose(sub.a * sub.h_hat + sub.b * sub.e_hat, g, atol=1e-12)
        assert abs(np.vdot(sub.h_hat, sub.e_hat)) < 1e-12
        assert sub.g_norm2 == pytest.approx(3.0)

    def test_zero_channel_rejected(self) -> None:
        with pytest.raises(ValueError):
            decompose(np.zeros(2), np.ones(2))

    def test_dimension_mismatch(self) -> None:
        with pytest.raises(ValueError, match="dimension mismatch"):
            decompose(np.ones(2), np.ones(3))


class TestResidualSplit:
    def test_gain_constant_below_knee(self, rng: np.random.Generator) -> None:
        h, g = _random_case(rng, 4)
        sub = decompose(h, g)
        knee = abs(sub.a) / math.sqrt(sub.g_norm2)
        alphas = np.linspace(0.0, 0.95 * knee, 20)
        _, gain = residual_split(alphas, 1.0, sub)
        np.testing.assert_allclose(gain, 4.0, rtol=1e-12)

    def test_gain_decreasing_above_knee(self, rng: np.random.Generator) -> None:
        h, g = _random_case(rng, 4)
        sub = decompose(h, g)
        knee = abs(sub.a) / math.sqrt(sub.g_norm2)
        _, gain = residual_split(np.linspace(knee, 1.0, 50), 1.0, sub)
        assert np.all(np.diff(gain) <= 1e-12)


class TestSolveBeamformingPerAav:
    def test_no_sensing_requirement_is_mrt(self, rng: np.random.Generator) -> None:
        h, g = _random_case(rng, 4)
        res = solve_beamforming_per_aav(h, g, 2.0, 50.0, 0.0, 1e-13)
        np.testing.assert_allclose(res.w, math.sqrt(2.0) * h / np.linalg.norm(h), atol=1e-12)
        assert res.p_v == 0.0
        assert res.snr == pytest.approx(2.0 * float(np.vdot(h, h).real) / 1e-13)
        assert res.feasible

    def test_aligned_channels_use_mrt(self, rng: np.random.Generator) -> None:
        _, g = _random_case(rng, 3)
        h = 3e-6 * np.exp(0.7j) * g
        res = solve_beamforming_per_aav(h, g, 1.0, 1.0, 2.9, 1e-13)
        np.testing.assert_allclose(res.w, g / math.sqrt(3.0) * np.exp(0.7j), atol=1e-12)
        assert res.p_v == 0.0

    def test_two_antenna_example_matches_oracle(self) -> None:
        h = np.array([1.0, 0.5j]) * 1e-5
        g = np.array([1.0, -1.0], dtype=complex)
        res = solve_beamforming_per_aav(h, g, 1.0, 1.0, 1.5, 1e-13)
        ref = oracle_beamforming_grid(h, g, 1.0, 1.0, 1.5, 1e-13)
        assert res.feasible and ref.feasible
        assert res.snr == pytest.approx(ref.snr, rel=1e-3)
        assert res.gain >= 1.5 * (1 - 1e-9)

    def test_infeasible_flagged_not_raised(self, rng: np.random.Generator) -> None:
        h, g = _random_case(rng, 4)
        res = solve_beamforming_per_aav(h, g, 1.0, 1.0, 5.0, 1e-13)
        assert not res.feasible
        assert float(np.vdot(res.w, res.w).real) == pytest.approx(1.0)

    def test_orthogonal_boundary_spends_all_on_sensing(self) -> None:
        h = np.array([1.0, -1.0], dtype=complex) * 1e-5
        g = np.array([1.0, 1.0], dtype=complex)
        res = solve_beamforming_per_aav(h, g, 1.0, 1.0, 2.0, 1e-13)
        assert res.feasible
        assert res.snr == pytest.approx(0.0, abs=1e-9)
        assert res.p_v == pytest.approx(1.0)

    @pytest.mark.parametrize("method", ["closed_form", "search"])
    def test_constraints_hold(self, rng: np.random.Generator, method: BeamMethod) -> None:
        for _ in range(30):
            n = int(rng.integers(2, 6))
            h, g = _random_case(rng, n)
            sub = decompose(h, g)
            threshold = abs(sub.a) ** 2 + float(rng.uniform(0.1, 0.9)) * (n - abs(sub.a) ** 2)
            res = solve_beamforming_per_aav(h, g, 1.0, 1.0, threshold, 1e-13, method=method)
            power = float(np.vdot(res.w, res.w).real) + res.p_v
            assert power <= 1.0 + 1e-6
            assert beampattern_gain(res.w, res.p_v, g) >= threshold - 1e-6 * max(1.0, threshold)

    def test_search_agrees_with_closed_form(self, rng: np.random.Generator) -> None:
        for _ in range(30):
            h, g = _random_case(rng, 3)
            sub = decompose(h, g)
            threshold = abs(sub.a) ** 2 + 0.5 * (3 - abs(sub.a) ** 2)
            a = solve_beamforming_per_aav(h, g, 1.0, 1.0, threshold, 1e-13)
            b = solve_beamforming_per_aav(h, g, 1.0, 1.0, threshold, 1e-13, method="search")
            assert b.snr == pytest.approx(a.snr, rel=1e-9)

    def test_oracle_agreement_random(self, rng: np.random.Generator) -> None:
        for _ in range(10):
            n = int(rng.integers(2, 4))
            h, g = _random_case(rng, n)
            sub = decompose(h, g)
            threshold = abs(sub.a) ** 2 + float(rng.uniform(0.05, 0.95)) * (n - abs(sub.a) ** 2)
            fast = solve_beamforming_per_aav(h, g, 1.0, 1.0, threshold, 1e-13)
            ref = oracle_beamforming_grid(h, g, 1.0, 1.0, threshold, 1e-13)
            assert fast.snr == pytest.approx(ref.snr, rel=1e-3)

    def test_band_scales_rate(self, rng: np.random.Generator) -> None:
        h, g = _random_case(rng, 2)
        res = solve_beamforming_per_aav(h, g, 1.0, 1.0, 0.0, 1e-13, band=1e6)
        assert res.rate == pytest.approx(1e6 * math.log2(1 + res.snr))
