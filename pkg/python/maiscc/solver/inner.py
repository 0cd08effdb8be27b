"""Inner layer: beamforming and compute allocation for a fixed antenna layout.

Maximizing each AAV's rate never increases any per-AAV latency, so the min–max problem
decouples exactly into per-AAV rate maximization followed by a compute-allocation bisection.
"""
from __future__ import annotations

import logging
import math
from typing import Any, Protocol

import numpy as np

from maiscc.config import ScenarioConfig
from maiscc.solver.allocation import allocate_computation
from maiscc.solver.beamforming import PerAavBeamResult, solve_beamforming_per_aav
from maiscc.system.channel import ChannelRealization, generate_channel
from maiscc.system.geometry import AntennaLayout, ComplexArray
from maiscc.system.metrics import InnerSolution, latency_components, system_objective

logger = logging.getLogger("maiscc.solver.inner")


class BeamSolver(Protocol):
    """Per-AAV beamforming solver signature accepted by :func:`solve_inner`."""

    def __call__(
        self,
        h: Any,
        g: Any,
        p_max: float,
        distance: float,
        gamma_min: float,
        sigma2: float,
        band: float = ...,
    ) -> PerAavBeamResult: ...


def solve_inner(
    layout: AntennaLayout,
    config: ScenarioConfig,
    channels: ChannelRealization,
    beam_solver: BeamSolver | None = None,
) -> InnerSolution:
    """Optimal beamformers, sensing powers and compute allocation for *layout*.

    AAVs whose sensing requirement cannot be met are flagged in ``sensing_ok`` (the outer
    layer turns the count into a penalty); their beam puts all power toward the target.
    """
    solve = beam_solver or solve_beamforming_per_aav
    M, N = config.n_aavs, config.n_antennas
    if layout.coords.shape != (M, N, 2):
        raise ValueError(f"layout shape {layout.coords.shape} does not match M={M}, N={N}")

    w = np.zeros((M, N), dtype=complex)
    p_v = np.zeros(M)
    snr = np.zeros(M)
    rate = np.zeros(M)
    sensing_ok = np.zeros(M, dtype=bool)
    for m in range(M):
        beam = solve(
            channels.h[m],
            channels.g[m],
            config.p_max[m],
            channels.target_distance(m),
            config.gamma_min,
            config.noise_power,
            band=config.band_per_aav,
        )
        w[m], p_v[m], snr[m], rate[m] = beam.w, beam.p_v, beam.snr, beam.rate
        sensing_ok[m] = beam.feasible

    f, _ = allocate_computation(rate, config.task_bits, config.cycles_per_bit, config.f_bs_max)
    t_tran = np.empty(M)
    t_comp = np.empty(M)
    latency = np.empty(M)
    for m in range(M):
        t_tran[m], t_comp[m], latency[m] = latency_components(
            config.task_bits[m], float(rate[m]), float(f[m]), config.cycles_per_bit
        )
    phi = system_objective(latency)
    if not sensing_ok.all():
        logger.debug("Inner solve: %d AAV(s) sensing-infeasible", int((~sensing_ok).sum()))
    return InnerSolution(
        w=w,
        sensing_power=p_v,
        f=f,
        rate=rate,
        snr=snr,
        t_tran=t_tran,
        t_comp=t_comp,
        latency=latency,
        phi=phi,
        sensing_ok=sensing_ok,
    )


def evaluate_layout(
    config: ScenarioConfig,
    layout: AntennaLayout,
    nlos: ComplexArray,
    beam_solver: BeamSolver | None = None,
) -> tuple[ChannelRealization, InnerSolution]:
    """Build the channels of *layout* under the frozen *nlos* draw and solve the inner layer."""
    channels = generate_channel(config, layout, nlos)
    return channels, solve_inner(layout, config, channels, beam_solver=beam_solver)


def interior_point_complexity(
    n_aavs: int,
    n_antennas: int,
    swarm_size: int = 1,
    max_iterations: int = 1,
    eps: float = 1e-6,
) -> dict[str, float]:
    """Operation-count expressions of a generic interior-point treatment of the inner layer.

    ``inner = (2MN² + M)^3.5·log(1/ε)`` and ``outer = i_max·P·inner``. Reported only; the
    decoupled solver used here is far cheaper.
    """
    size = 2 * n_aavs * n_antennas**2 + n_aavs
    inner = size**3.5 * math.log(1.0 / eps)
    return {"inner": inner, "outer": max_iterations * swarm_size * inner}
