"""Tests for maiscc.solver.allocation and maiscc.solver.search."""
from __future__ import annotations

import math

import numpy as np
import pytest

from maiscc.solver.allocation import allocate_computation
from maiscc.solver.oracles import oracle_allocation_grid
from maiscc.solver.search import bisect_boundary
from maiscc.system.metrics import latency_components


def _latencies(rates: np.ndarray, bits: np.ndarray, f: np.ndarray) -> np.ndarray:
    return np.array([latency_components(d, r, x, 100.0)[2] for d, r, x in zip(bits, rates, f)])


class TestBisectBoundary:
    def test_returns_good_end(self) -> None:
        x = bisect_boundary(lambda t: t >= 2.0, good=10.0, bad=0.0, abs_tol=1e-9)
        assert x >= 2.0
        assert x == pytest.approx(2.0, abs=1e-8)

    def test_reversed_orientation(self) -> None:
        x = bisect_boundary(lambda t: t <= 3.0, good=0.0, bad=5.0, rel_tol=1e-12)
        assert x <= 3.0
        assert x == pytest.approx(3.0, rel=1e-10)


class TestAllocateComputation:
    def test_single_aav_gets_full_budget(self) -> None:
        f, phi = allocate_computation([1e6], [1e7], 100.0, 1e9)
        assert f[0] == pytest.approx(1e9)
        assert phi == pytest.approx(11.0)

    def test_symmetric_split(self) -> None:
        f, phi = allocate_computation([2e6, 2e6], [1e7, 1e7], 100.0, 4e9)
        assert f[0] == pytest.approx(f[1], rel=1e-12)
        assert phi == pytest.approx(5.0 + 0.5)

    def test_asymmetric_matches_grid_oracle(self) -> None:
        rates, bits = np.array([1e6, 2e6]), np.array([1e7, 1.5e7])
        _, phi = allocate_computation(rates, bits, 100.0, 2e9)
        ref = oracle_allocation_grid(rates, bits, 100.0, 2e9)
        assert phi == pytest.approx(ref, rel=1e-4)

    def test_zero_rate_is_infinite(self) -> None:
        f, phi = allocate_computation([1e6, 0.0], [1e7, 1e7], 100.0, 1e9)
        assert math.isinf(phi)
        np.testing.assert_array_equal(f, [0.0, 0.0])

    def test_equalization_and_budget(self, rng: np.random.Generator) -> None:
        for _ in range(50):
            m = int(rng.integers(1, 6))
            rates = rng.uniform(1e5, 1e8, size=m)
            bits = rng.uniform(1e7, 1.5e7, size=m)
            budget = float(rng.uniform(1e8, 1e11))
            f, phi = allocate_computation(rates, bits, 100.0, budget)
            lat = _latencies(rates, bits, f)
            assert lat.max() - lat.min() <= 1e-6 * phi
            assert abs(f.sum() - budget) <= 1e-6 * budget
            assert phi == lat.max()
            assert np.all(f >= 0)

    def test_budget_indicator_monotone(self) -> None:
        rates, bits = np.array([1e6, 3e6, 2e6]), np.array([1e7, 1.2e7, 1.4e7])
        t_tran = bits / rates
        phis = np.linspace(t_tran.max() * 1.001, t_tran.max() * 5, 200)
        need = [float(np.sum(100.0 * bits / (p - t_tran))) for p in phis]
        assert all(b <= a for a, b in zip(need, need[1:]))

    def test_more_compute_never_hurts(self) -> None:
        rates, bits = [1e6, 2e6, 5e5], [1e7, 1.1e7, 1.3e7]
        phis = [allocate_computation(rates, bits, 100.0, F).phi for F in (1e9, 2e9, 4e9, 8e9)]
        assert all(b < a for a, b in zip(phis, phis[1:]))

    def test_input_validation(self) -> None:
        with pytest.raises(ValueError):
            allocate_computation([1e6], [1e7, 1e7], 100.0, 1e9)
        with pytest.raises(ValueError):
            allocate_computation([], [], 100.0, 1e9)
        with pytest.raises(ValueError):
            allocate_computation([1e6], [1e7], 100.0, 0.0)

    @pytest.mark.slow
    def test_oracle_agreement_many(self, rng: np.random.Generator) -> None:
        for _ in range(200):
            m = int(rng.integers(2, 4))
            rates = rng.uniform(1e6, 1e8, size=m)
            bits = rng.uniform(1e7, 1.5e7, size=m)
            budget = float(rng.uniform(1e9, 5e10))
            phi = allocate_computation(rates, bits, 100.0, budget).phi
            assert phi == pytest.approx(oracle_allocation_grid(rates, bits, 100.0, budget), rel=1e-4)
