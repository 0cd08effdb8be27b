"""Tests for maiscc.solver.lifted."""
from __future__ import annotations

import numpy as np
import pytest

from maiscc.errors import NotPsdError
from maiscc.solver.beamforming import decompose, solve_beamforming_per_aav
from maiscc.solver.lifted import extract_rank_one, recover_from_lifted, solve_beamforming_lifted
from maiscc.system.geometry import DirectionCosines, steering_vector
from maiscc.system.metrics import beampattern_gain


class TestExtractRankOne:
    def test_recovers_outer_product_up_to_phase(self, rng: np.random.Generator) -> None:
        w = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        out = extract_rank_one(np.outer(w, w.conj()))
        np.testing.assert_allclose(np.outer(out, out.conj()), np.outer(w, w.conj()), atol=1e-10)

    def test_identity_gives_unit_trace(self) -> None:
        out = extract_rank_one(np.eye(3))
        assert float(np.vdot(out, out).real) == pytest.approx(1.0)

    def test_power_never_exceeds_trace(self, rng: np.random.Generator) -> None:
        for _ in range(20):
            X = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            W = X @ X.conj().T
            out = extract_rank_one(W)
            assert float(np.vdot(out, out).real) <= float(np.trace(W).real) + 1e-9

    def test_indefinite_matrix_rejected(self) -> None:
        with pytest.raises(NotPsdError):
            extract_rank_one(np.diag([1.0, -0.1]))

    def test_non_square_rejected(self) -> None:
        with pytest.raises(ValueError):
            extract_rank_one(np.zeros((2, 3)))


class TestRecoverFromLifted:
    def test_rank_one_pair_is_preserved(self) -> None:
        g = steering_vector([[0.0, 0.0], [0.7, 0.2]], DirectionCosines(0.3, 0.1, 1.0))
        h = np.array([1.0, 0.4j]) * 1e-5
        w = np.array([0.6, 0.3j])
        p_v = 0.2
        g_hat = g / np.linalg.norm(g)
        V = p_v * np.outer(g_hat, g_hat.conj())
        threshold = beampattern_gain(w, p_v, g)
        res = recover_from_lifted(np.outer(w, w.conj()), V, h, g, 1.0, 1.0, threshold, 1e-13)
        assert res.feasible
        assert res.p_v == pytest.approx(p_v)
        assert res.gain == pytest.approx(threshold, rel=1e-9)

    def test_shortfall_topped_up_from_budget(self) -> None:
        g = np.array([1.0, 1.0], dtype=complex)
        h = np.array([1.0, -1.0]) * 1e-5
        w = np.array([0.5, -0.5], dtype=complex)
        res = recover_from_lifted(np.outer(w, w.conj()), np.zeros((2, 2)), h, g, 1.0, 1.0, 1.0,
                                  1e-13)
        assert res.feasible
        assert float(np.vdot(res.w, res.w).real) + res.p_v <= 1.0 + 1e-9


class TestLiftedSolver:
    def test_agrees_with_decoupled_solver(self, rng: np.random.Generator) -> None:
        pytest.importorskip("cvxpy")
        h = (rng.standard_normal(3) + 1j * rng.standard_normal(3)) * 1e-5
        g = steering_vector(rng.uniform(0, 4, size=(3, 2)), DirectionCosines(0.2, -0.4, 1.0))
        sub = decompose(h, g)
        threshold = abs(sub.a) ** 2 + 0.5 * (3 - abs(sub.a) ** 2)
        fast = solve_beamforming_per_aav(h, g, 1.0, 1.0, threshold, 1e-13)
        lifted = solve_beamforming_lifted(h, g, 1.0, 1.0, threshold, 1e-13)
        assert lifted.snr == pytest.approx(fast.snr, rel=1e-3)

    def test_infeasible_short_circuits(self) -> None:
        pytest.importorskip("cvxpy")
        g = np.ones(2, dtype=complex)
        res = solve_beamforming_lifted(np.array([1.0, 0.0]), g, 1.0, 1.0, 5.0, 1.0)
        assert not res.feasible
