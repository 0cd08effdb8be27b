"""Tests for maiscc.system.channel."""
from __future__ import annotations

import math

import numpy as np
import pytest

from maiscc.errors import DegenerateGeometryError
from maiscc.harness.scenario import build_scenario
from maiscc.system.channel import ScenarioInstance, draw_nlos, generate_channel, rician_weights
from maiscc.system.geometry import AntennaLayout


def _single_aav(kappa: float, seed: int = 0, n: int = 4) -> ScenarioInstance:
    """One AAV 100 m above the BS with h0 = -60 dB."""
    return build_scenario(
        seed,
        {
            "n_aavs": 1,
            "n_antennas": n,
            "aav_positions": [(0.0, 0.0, 100.0)],
            "rician_factor": kappa,
            "ref_gain_db": -60.0,
        },
    )


def _grid_layout(n: int) -> AntennaLayout:
    return AntennaLayout(np.array([[[0.5 * k, 0.3 * k] for k in range(n)]]))


class TestRicianWeights:
    def test_los_only(self) -> None:
        assert rician_weights(math.inf) == (1.0, 0.0)

    def test_nlos_only(self) -> None:
        assert rician_weights(0.0) == (0.0, 1.0)

    def test_power_split_sums_to_one(self) -> None:
        los, nlos = rician_weights(10.0)
        assert los**2 + nlos**2 == pytest.approx(1.0)


class TestGenerateChannel:
    def test_los_limit_magnitude(self) -> None:
        inst = _single_aav(math.inf)
        ch = inst.channels(_grid_layout(4))
        np.testing.assert_allclose(np.abs(ch.h[0]), 1e-5, rtol=1e-9)

    def test_nlos_limit_is_scaled_draw(self) -> None:
        inst = _single_aav(0.0)
        ch = inst.channels(_grid_layout(4))
        np.testing.assert_allclose(ch.h[0], math.sqrt(1e-6) / 100.0 * inst.nlos[0], rtol=1e-12)

    def test_repeated_calls_bit_identical(self) -> None:
        inst = _single_aav(1.0)
        layout = _grid_layout(4)
        a = generate_channel(inst.config, layout, inst.nlos)
        b = generate_channel(inst.config, layout, inst.nlos)
        assert np.array_equal(a.h, b.h)
        assert np.array_equal(a.g, b.g)

    def test_target_steering_norm(
        self, default_instance: ScenarioInstance, default_fpa: AntennaLayout
    ) -> None:
        ch = default_instance.channels(default_fpa)
        np.testing.assert_allclose(np.sum(np.abs(ch.g) ** 2, axis=1), 4.0, atol=1e-12)
        assert ch.target_distance(0) == pytest.approx(math.hypot(50.0, 20.0))

    def test_layout_shape_mismatch(self, default_instance: ScenarioInstance) -> None:
        with pytest.raises(ValueError, match="layout shape"):
            default_instance.channels(AntennaLayout(np.zeros((1, 4, 2))))

    def test_aav_on_bs_raises(self) -> None:
        inst = build_scenario(
            0, {"n_aavs": 1, "aav_positions": [(0.0, 0.0, 0.0)], "target_positions": [(1.0, 0.0, 0.0)]}
        )
        with pytest.raises(DegenerateGeometryError):
            inst.channels(_grid_layout(4))

    def test_nlos_frozen_per_instance(
        self, default_instance: ScenarioInstance, rng: np.random.Generator
    ) -> None:
        a = default_instance.channels(AntennaLayout(rng.uniform(0, 20, size=(3, 4, 2))))
        b = default_instance.channels(AntennaLayout(rng.uniform(0, 20, size=(3, 4, 2))))
        assert np.array_equal(a.nlos, b.nlos)


class TestNlosDraws:
    def test_same_seed_same_draw(self) -> None:
        assert np.array_equal(draw_nlos(5, 3, 4), draw_nlos(5, 3, 4))

    def test_aav_streams_independent_of_count(self) -> None:
        np.testing.assert_array_equal(draw_nlos(5, 2, 4), draw_nlos(5, 3, 4)[:2])

    def test_unit_variance(self) -> None:
        z = draw_nlos(1, 1, 200_000)
        assert float(np.mean(np.abs(z) ** 2)) == pytest.approx(1.0, rel=0.02)

    @pytest.mark.slow
    def test_average_channel_power(self) -> None:
        # E‖h‖² = N·h0/d² for any κ.
        layout = _grid_layout(4)
        for kappa in (0.0, 1.0, 10.0):
            powers = [
                float(np.sum(np.abs(_single_aav(kappa, seed=s).channels(layout).h[0]) ** 2))
                for s in range(10_000)
            ]
            assert np.mean(powers) == pytest.approx(4 * 1e-6 / 100.0**2, rel=0.03)
