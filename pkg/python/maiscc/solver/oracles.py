"""Brute-force reference solvers used to validate the inner layer.

These are deliberately slow and independent of the analytic shortcuts in
:mod:`maiscc.solver.beamforming` and :mod:`maiscc.solver.allocation`: they enumerate nested
grids (each level zooms into a window around the incumbent, which is always kept, so a finer
level never worsens the result). Never used inside the swarm loop.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from maiscc.config import ScenarioConfig
from maiscc.rng import Stream, stream
from maiscc.solver.beamforming import decompose, sensing_feasibility
from maiscc.system.channel import ChannelRealization
from maiscc.system.geometry import AntennaLayout
from maiscc.system.metrics import rate_from_snr

logger = logging.getLogger("maiscc.solver.oracles")

MIN_RESOLUTION = 128
_ZOOM_CELLS = 2
_ALPHA_CHUNK = 16


@dataclass
class OracleBeam:
    """Best grid point of the beamforming oracle."""

    snr: float
    feasible: bool
    alpha: float = 0.0
    split: float = 0.0
    phase: float = 0.0


@dataclass
class JointOracleResult:
    """Reference max latency of a small instance and its per-AAV sensing flags."""

    phi: float
    feasible: npt.NDArray[np.bool_]
    snr: npt.NDArray[np.float64]


def _window(grid: npt.NDArray[np.float64], k: int, lo: float, hi: float) -> tuple[float, float]:
    step = grid[1] - grid[0] if grid.size > 1 else 0.0
    return max(lo, grid[k] - _ZOOM_CELLS * step), min(hi, grid[k] + _ZOOM_CELLS * step)


def oracle_beamforming_grid(
    h: Any,
    g: Any,
    p_max: float,
    distance: float,
    gamma_min: float,
    sigma2: float,
    resolution: int = MIN_RESOLUTION,
    levels: int = 4,
) -> OracleBeam:
    """Exhaustive search over ``(α, split, relative phase)`` in ``span{ĥ, ê}``.

    ``w = α·ĥ + √(s·r)·e^{jφ}·ê`` and ``p_v = (1 − s)·r`` with ``r = P − α²``; the best
    feasible SNR is ``‖h‖²·α²/σ²`` at the largest feasible ``α``.
    """
    if resolution < MIN_RESOLUTION:
        raise ValueError(f"resolution must be >= {MIN_RESOLUTION}")
    sub = decompose(h, g)
    threshold = distance * distance * gamma_min
    if not sensing_feasibility(p_max, sub.g_norm2, distance, gamma_min):
        return OracleBeam(snr=0.0, feasible=False)

    conj_a = sub.a.conjugate()
    a_rng = (0.0, math.sqrt(p_max))
    s_rng = (0.0, 1.0)
    f_rng = (0.0, 2.0 * math.pi)
    best: OracleBeam | None = None
    for level in range(levels):
        alphas = np.linspace(*a_rng, resolution)
        splits = np.linspace(*s_rng, resolution)
        phases = np.linspace(*f_rng, resolution, endpoint=level > 0)
        s = splits[:, None]
        rot = np.exp(1j * phases)[None, :]
        level_best: tuple[int, int, int] | None = None
        # Scan from the largest α down; the first feasible slice holds the level optimum.
        for start in range(resolution, 0, -_ALPHA_CHUNK):
            idx = np.arange(max(0, start - _ALPHA_CHUNK), start)[::-1]
            alpha = alphas[idx][:, None, None]
            r = np.maximum(p_max - alpha * alpha, 0.0)
            beta = np.sqrt(s * r)
            gain = np.abs(conj_a * alpha + sub.b * beta * rot) ** 2 + (1.0 - s) * r * sub.g_norm2
            ok = gain >= threshold
            hits = np.flatnonzero(ok.any(axis=(1, 2)))
            if hits.size:
                i = int(hits[0])
                # Highest-gain point of the slice; the next level zooms around it.
                j, k = np.unravel_index(int(np.argmax(gain[i])), gain[i].shape)
                level_best = (int(idx[i]), int(j), int(k))
                break
        if level_best is None:
            break
        i, j, k = level_best
        cand = OracleBeam(
            snr=sub.h_norm2 * alphas[i] ** 2 / sigma2,
            feasible=True,
            alpha=float(alphas[i]),
            split=float(splits[j]),
            phase=float(phases[k]),
        )
        if best is None or cand.snr > best.snr:
            best = cand
        a_rng = _window(alphas, i, 0.0, math.sqrt(p_max))
        s_rng = _window(splits, j, 0.0, 1.0)
        f_rng = _window(phases, k, -math.inf, math.inf)
    if best is None:
        # Only reachable when the requirement sits on the feasibility boundary.
        return OracleBeam(snr=0.0, feasible=True)
    return best


def oracle_beamforming_random(
    h: Any,
    g: Any,
    p_max: float,
    distance: float,
    gamma_min: float,
    sigma2: float,
    samples: int = 100_000,
    seed: int = 0,
) -> float:
    """Best sensing-feasible SNR over random beamformers drawn from the full space ``C^N``.

    Each sample spends a uniform fraction of the budget on ``w`` (random direction) and the
    rest on sensing power along ``ĝ``. Returns 0 when no sample is feasible.
    """
    h = np.asarray(h, dtype=complex).reshape(-1)
    g = np.asarray(g, dtype=complex).reshape(-1)
    rng = stream(seed, Stream.VALIDATION)
    z = rng.standard_normal((samples, h.size)) + 1j * rng.standard_normal((samples, h.size))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    t = rng.random(samples)
    w = z * np.sqrt(t * p_max)[:, None]
    p_v = (1.0 - t) * p_max
    g_norm2 = float(np.vdot(g, g).real)
    gain = np.abs(w @ g.conj()) ** 2 + p_v * g_norm2
    snr = np.abs(w @ h.conj()) ** 2 / sigma2
    ok = gain >= distance * distance * gamma_min
    return float(snr[ok].max()) if ok.any() else 0.0


def oracle_allocation_grid(
    rates: Any,
    task_bits: Any,
    cycles_per_bit: float,
    f_bs_max: float,
    resolution: int = 100_000,
    levels: int = 3,
) -> float:
    """Min over the simplex ``Σf = F`` of the max latency, by nested grid search (M ≤ 3)."""
    R = np.asarray(rates, dtype=float).reshape(-1)
    D = np.asarray(task_bits, dtype=float).reshape(-1)
    M = R.size
    if M == 0 or M > 3:
        raise ValueError("oracle_allocation_grid supports 1 to 3 AAVs")
    if np.any(R <= 0.0):
        return math.inf
    t_tran = D / R
    demand = cycles_per_bit * D
    if M == 1:
        return float(t_tran[0] + demand[0] / f_bs_max)

    def max_latency(frac: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        # frac has shape (..., M) with rows on the open simplex.
        with np.errstate(divide="ignore"):
            lat = t_tran + demand / (frac * f_bs_max)
        return np.asarray(lat.max(axis=-1))

    n = resolution if M == 2 else min(resolution, 600)
    lo = np.zeros(M - 1)
    hi = np.ones(M - 1)
    best = math.inf
    for _ in range(levels):
        axes = [np.linspace(lo[d], hi[d], n) for d in range(M - 1)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        last = 1.0 - mesh.sum(axis=-1, keepdims=True)
        frac = np.concatenate([mesh, last], axis=-1)
        valid = np.all(frac > 0.0, axis=-1)
        lat = np.where(valid, max_latency(np.where(frac > 0.0, frac, 1.0)), np.inf)
        flat = int(np.argmin(lat))
        value = float(lat.reshape(-1)[flat])
        if not math.isfinite(value):
            break
        best = min(best, value)
        centre = np.unravel_index(flat, lat.shape)
        for d in range(M - 1):
            lo[d], hi[d] = _window(axes[d], int(centre[d]), 0.0, 1.0)
    return best


def oracle_joint_small(
    layout: AntennaLayout,
    config: ScenarioConfig,
    channels: ChannelRealization,
    resolution: int = MIN_RESOLUTION,
) -> JointOracleResult:
    """Reference inner-layer optimum: per-AAV beam oracle composed with the allocation oracle."""
    M, N = layout.n_aavs, layout.n_antennas
    if M > 2 or N > 3:
        raise ValueError("oracle_joint_small supports at most 2 AAVs with 3 antennas")
    feasible = np.zeros(M, dtype=bool)
    snr = np.zeros(M)
    for m in range(M):
        beam = oracle_beamforming_grid(
            channels.h[m],
            channels.g[m],
            config.p_max[m],
            channels.target_distance(m),
            config.gamma_min,
            config.noise_power,
            resolution=resolution,
        )
        feasible[m], snr[m] = beam.feasible, beam.snr
    rates = [rate_from_snr(s, config.band_per_aav) for s in snr]
    phi = oracle_allocation_grid(rates, config.task_bits, config.cycles_per_bit, config.f_bs_max)
    return JointOracleResult(phi=phi, feasible=feasible, snr=snr)
