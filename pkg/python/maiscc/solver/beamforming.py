"""Per-AAV transmit beamforming under a sensing beampattern-gain constraint.

For one AAV the inner problem is::

    maximize   |h^H w|²
    subject to ‖w‖² + p_v ≤ P_max
               |g^H w|² + p_v·‖g‖² ≥ d²·Γ_min

with the sensing covariance restricted to ``V = p_v·ĝĝ^H``. An optimal ``w`` lies in
``span{ĥ, ê}`` where ``ê`` is the unit residual of ``g`` orthogonal to ``ĥ``; writing
``g = a·ĥ + b·ê`` and ``w = α·ĥ + β·e^{jφ}·ê`` reduces the problem to choosing the largest
communication amplitude ``α`` whose best residual split still meets the sensing requirement.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
import numpy.typing as npt

from maiscc.solver.search import bisect_boundary
from maiscc.system.geometry import ComplexArray
from maiscc.system.metrics import beampattern_gain, rate_from_snr

logger = logging.getLogger("maiscc.solver.beamforming")

ALPHA_GRID = 512
ALPHA_TOL = 1e-12
_ORTHO_TOL = 1e-12

BeamMethod = Literal["closed_form", "search"]


@dataclass
class PerAavBeamResult:
    """Solution of the per-AAV beamforming block.

    Attributes
    ----------
    w:
        Information beamformer (√W).
    p_v:
        Dedicated sensing power along ``ĝ`` (W).
    snr:
        ``|h^H w|²/σ²`` (linear).
    rate:
        ``band·log2(1 + snr)`` (bits/s; spectral efficiency when ``band = 1``).
    feasible:
        Whether the sensing requirement can be met at all.
    gain:
        Achieved beampattern gain toward the target.
    """

    w: ComplexArray
    p_v: float
    snr: float
    rate: float
    feasible: bool
    gain: float = 0.0


@dataclass(frozen=True)
class Subspace:
    """Decomposition ``g = a·ĥ + b·ê`` of the target steering vector."""

    h_hat: ComplexArray
    e_hat: ComplexArray
    a: complex
    b: float
    h_norm2: float
    g_norm2: float


def decompose(h: Any, g: Any) -> Subspace:
    """Split *g* into its component along ``ĥ`` and the orthogonal residual ``ê``."""
    h = np.asarray(h, dtype=complex).reshape(-1)
    g = np.asarray(g, dtype=complex).reshape(-1)
    if h.shape != g.shape:
        raise ValueError(f"dimension mismatch: h has {h.size} entries, g has {g.size}")
    h_norm = float(np.linalg.norm(h))
    if h_norm == 0.0:
        raise ValueError("channel vector h is identically zero")
    h_hat = h / h_norm
    a = complex(np.vdot(h_hat, g))
    residual = g - a * h_hat
    b = float(np.linalg.norm(residual))
    g_norm2 = float(np.vdot(g, g).real)
    if b <= _ORTHO_TOL * math.sqrt(g_norm2):
        return Subspace(h_hat, np.zeros_like(h_hat), a, 0.0, h_norm**2, g_norm2)
    return Subspace(h_hat, residual / b, a, b, h_norm**2, g_norm2)


def sensing_feasibility(p_max: float, n_antennas: float, distance: float, gamma_min: float) -> bool:
    """Whether ``P_max·N ≥ d²·Γ_min`` (the largest gain puts all power along ``ĝ``)."""
    return p_max * n_antennas >= distance * distance * gamma_min


def residual_split(
    alpha: npt.ArrayLike,
    p_max: float,
    sub: Subspace,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Best split of the residual power ``P − α²`` between ``ê`` and sensing power.

    The sensing gain ``(|a|α + bβ)² + (r − β²)‖g‖²`` is concave in ``β``; its maximizer is
    ``β* = b·α/|a|`` clipped to ``[0, √r]`` (any ``β`` is optimal when ``|a| = 0``).

    Returns
    -------
    (beta, gain):
        Optimal ``β`` and the resulting maximal gain, elementwise in *alpha*.
    """
    alpha = np.asarray(alpha, dtype=float)
    r = np.maximum(p_max - alpha * alpha, 0.0)
    abs_a = abs(sub.a)
    if abs_a > 0.0:
        beta = np.minimum(np.sqrt(r), sub.b * alpha / abs_a)
    else:
        beta = np.zeros_like(alpha)
    gain = (abs_a * alpha + sub.b * beta) ** 2 + (r - beta * beta) * sub.g_norm2
    return beta, gain


def _alpha_closed_form(p_max: float, threshold: float, sub: Subspace) -> float:
    # On the boundary all power sits in span{ĥ, ê}: |a|cos t + b sin t = √‖g‖² cos(t − t0).
    t0 = math.atan2(sub.b, abs(sub.a))
    ratio = min(1.0, math.sqrt(threshold / (p_max * sub.g_norm2)))
    t = max(0.0, t0 - math.acos(ratio))
    return math.sqrt(p_max) * math.cos(t)


def _alpha_search(p_max: float, threshold: float, sub: Subspace) -> float:
    grid = np.linspace(0.0, math.sqrt(p_max), ALPHA_GRID)
    _, gain = residual_split(grid, p_max, sub)
    ok = np.flatnonzero(gain >= threshold)
    if ok.size == 0:
        return 0.0
    k = int(ok[-1])
    if k == grid.size - 1:
        return float(grid[-1])

    def satisfiable(alpha: float) -> bool:
        return bool(residual_split(alpha, p_max, sub)[1] >= threshold)

    return bisect_boundary(satisfiable, float(grid[k]), float(grid[k + 1]), abs_tol=ALPHA_TOL)


def solve_beamforming_per_aav(
    h: Any,
    g: Any,
    p_max: float,
    distance: float,
    gamma_min: float,
    sigma2: float,
    band: float = 1.0,
    method: BeamMethod = "closed_form",
) -> PerAavBeamResult:
    """Maximize the AAV's SNR subject to its power budget and sensing requirement.

    ``method="closed_form"`` solves the boundary equation analytically;
    ``method="search"`` scans a 512-point ``α`` grid and bisects the last feasible cell.
    An infeasible sensing requirement returns ``feasible=False`` with all power along ``ĝ``.
    """
    sub = decompose(h, g)
    g = np.asarray(g, dtype=complex).reshape(-1)
    h = np.asarray(h, dtype=complex).reshape(-1)
    threshold = distance * distance * gamma_min

    if not sensing_feasibility(p_max, sub.g_norm2, distance, gamma_min):
        w = math.sqrt(p_max) * g / math.sqrt(sub.g_norm2)
        snr = abs(np.vdot(h, w)) ** 2 / sigma2
        logger.debug("Sensing infeasible: P·N=%.4g < d²Γ=%.4g", p_max * sub.g_norm2, threshold)
        return PerAavBeamResult(
            w=w, p_v=0.0, snr=snr, rate=rate_from_snr(snr, band), feasible=False,
            gain=beampattern_gain(w, 0.0, g),
        )

    if p_max * abs(sub.a) ** 2 >= threshold:
        # Maximum-ratio transmission already meets the sensing requirement.
        w = math.sqrt(p_max) * sub.h_hat
        p_v = 0.0
    else:
        alpha = (_alpha_closed_form if method == "closed_form" else _alpha_search)(
            p_max, threshold, sub
        )
        beta_arr, _ = residual_split(alpha, p_max, sub)
        beta = float(beta_arr)
        phase = sub.a.conjugate() / abs(sub.a) if abs(sub.a) > 0.0 else 1.0
        w = alpha * sub.h_hat + beta * phase * sub.e_hat
        p_v = max(0.0, p_max - alpha * alpha - beta * beta)

    snr = abs(np.vdot(h, w)) ** 2 / sigma2
    return PerAavBeamResult(
        w=w,
        p_v=p_v,
        snr=snr,
        rate=rate_from_snr(snr, band),
        feasible=True,
        gain=beampattern_gain(w, p_v, g),
    )
