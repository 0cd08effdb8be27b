"""Lifted (semidefinite-relaxation) per-AAV beamforming and rank-one extraction.

This path is an optional cross-check of :mod:`maiscc.solver.beamforming`. It relaxes
``w w^H`` to a PSD matrix ``W``, solves the resulting convex program with ``cvxpy`` (extra
``maiscc[sdp]``) and extracts a beamformer from the principal eigenpair, re-verifying the power
and sensing constraints on the extracted vector.
"""
from __future__ import annotations

import logging
import math
from typing import Any

import numpy as np

from maiscc.errors import NotPsdError
from maiscc.solver.beamforming import PerAavBeamResult, sensing_feasibility
from maiscc.system.geometry import ComplexArray
from maiscc.system.metrics import POWER_TOL, beampattern_gain, rate_from_snr

logger = logging.getLogger("maiscc.solver.lifted")

PSD_TOL = 1e-6


def extract_rank_one(W: Any) -> ComplexArray:
    """Return ``√λ₁·u₁`` for the principal eigenpair of the Hermitian PSD matrix *W*.

    Raises
    ------
    NotPsdError:
        If an eigenvalue is below ``−1e-6``.
    """
    Wm = np.asarray(W, dtype=complex)
    if Wm.ndim != 2 or Wm.shape[0] != Wm.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {Wm.shape}")
    Wm = 0.5 * (Wm + Wm.conj().T)
    eigvals, eigvecs = np.linalg.eigh(Wm)
    if eigvals[0] < -PSD_TOL:
        raise NotPsdError(float(eigvals[0]))
    lam = max(float(eigvals[-1]), 0.0)
    return math.sqrt(lam) * eigvecs[:, -1]


def recover_from_lifted(
    W: Any,
    V: Any,
    h: Any,
    g: Any,
    p_max: float,
    distance: float,
    gamma_min: float,
    sigma2: float,
    band: float = 1.0,
) -> PerAavBeamResult:
    """Turn a lifted ``(W, V)`` pair into a beamformer and compact sensing power.

    ``V`` is compressed to ``p_v = g^H V g/‖g‖²`` (same gain, no more power than
    ``tr V``). If extraction loses sensing gain, the shortfall is topped up from the unused
    budget; when that is not enough the result is flagged infeasible.
    """
    h = np.asarray(h, dtype=complex).reshape(-1)
    g = np.asarray(g, dtype=complex).reshape(-1)
    g_norm2 = float(np.vdot(g, g).real)
    threshold = distance * distance * gamma_min

    w = extract_rank_one(W)
    Vm = np.asarray(V, dtype=complex)
    p_v = max(0.0, float(np.vdot(g, Vm @ g).real) / g_norm2)
    lost = float(np.trace(np.asarray(W, dtype=complex)).real) - float(np.vdot(w, w).real)
    if lost > 1e-9 * max(1.0, p_max):
        logger.warning("Rank-one extraction dropped %.3g W of beamforming power", lost)

    shortfall = threshold - beampattern_gain(w, p_v, g)
    if shortfall > 0.0:
        p_v += shortfall / g_norm2
    power = float(np.vdot(w, w).real) + p_v
    if power > p_max + POWER_TOL * max(1.0, p_max):
        # Scale the information beam back into budget; sensing may then fall short.
        excess = power - p_max
        w_norm2 = float(np.vdot(w, w).real)
        if w_norm2 > excess:
            w = w * math.sqrt((w_norm2 - excess) / w_norm2)
        else:
            w = np.zeros_like(w)
            p_v = p_max

    gain = beampattern_gain(w, p_v, g)
    feasible = gain >= threshold * (1.0 - 1e-6)
    snr = abs(np.vdot(h, w)) ** 2 / sigma2
    return PerAavBeamResult(
        w=w, p_v=p_v, snr=snr, rate=rate_from_snr(snr, band), feasible=feasible, gain=gain
    )


def solve_beamforming_lifted(
    h: Any,
    g: Any,
    p_max: float,
    distance: float,
    gamma_min: float,
    sigma2: float,
    band: float = 1.0,
    solver: str | None = None,
) -> PerAavBeamResult:
    """Solve the relaxed per-AAV block with ``cvxpy`` and recover a rank-one beamformer.

    The objective is normalized by ``‖h‖²`` so the solver works with O(1) data.
    """
    try:
        import cvxpy as cp
    except ImportError as exc:  # pragma: no cover - depends on the environment
        raise ImportError(
            "the lifted solver needs cvxpy; install it with: pip install maiscc[sdp]"
        ) from exc

    h = np.asarray(h, dtype=complex).reshape(-1)
    g = np.asarray(g, dtype=complex).reshape(-1)
    n = h.size
    g_norm2 = float(np.vdot(g, g).real)
    if not sensing_feasibility(p_max, g_norm2, distance, gamma_min):
        w = math.sqrt(p_max) * g / math.sqrt(g_norm2)
        snr = abs(np.vdot(h, w)) ** 2 / sigma2
        return PerAavBeamResult(w, 0.0, snr, rate_from_snr(snr, band), False,
                                beampattern_gain(w, 0.0, g))

    h_hat = h / np.linalg.norm(h)
    H = np.outer(h_hat, h_hat.conj())
    G = np.outer(g, g.conj())
    W = cp.Variable((n, n), hermitian=True)
    V = cp.Variable((n, n), hermitian=True)
    threshold = distance * distance * gamma_min
    problem = cp.Problem(
        cp.Maximize(cp.real(cp.trace(H @ W))),
        [
            W >> 0,
            V >> 0,
            cp.real(cp.trace(W) + cp.trace(V)) <= p_max,
            cp.real(cp.trace(G @ (W + V))) >= threshold,
        ],
    )
    problem.solve(solver=solver)
    if problem.status not in ("optimal", "optimal_inaccurate") or W.value is None:
        logger.warning("Lifted solve ended with status %s", problem.status)
        w = np.zeros(n, dtype=complex)
        return PerAavBeamResult(w, 0.0, 0.0, 0.0, False, 0.0)

    # Clip solver noise off the spectrum before extraction.
    W_val = _project_psd(W.value)
    V_val = _project_psd(V.value)
    return recover_from_lifted(W_val, V_val, h, g, p_max, distance, gamma_min, sigma2, band)


def _project_psd(X: Any) -> ComplexArray:
    Xm = np.asarray(X, dtype=complex)
    Xm = 0.5 * (Xm + Xm.conj().T)
    vals, vecs = np.linalg.eigh(Xm)
    vals = np.maximum(vals, 0.0)
    return (vecs * vals) @ vecs.conj().T
