"""Rician air-to-ground channels between the AAV arrays and the BS."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from maiscc.config import ScenarioConfig
from maiscc.rng import Stream, stream
from maiscc.system.geometry import (
    AntennaLayout,
    ComplexArray,
    DirectionCosines,
    direction_cosines,
    steering_vector,
)

logger = logging.getLogger("maiscc.system.channel")


@dataclass
class ChannelRealization:
    """Channels of one layout under one frozen NLoS draw.

    Attributes
    ----------
    h:
        ``(M, N)`` AAV→BS channel vectors (linear amplitude).
    nlos:
        ``(M, N)`` frozen CN(0, 1) scattering draw the channels were built from.
    g:
        ``(M, N)`` steering vectors of each array toward its sensing target.
    bs_dir, tgt_dir:
        Direction cosines and distances from each AAV to the BS and to its target.
    """

    h: ComplexArray
    nlos: ComplexArray
    g: ComplexArray
    bs_dir: list[DirectionCosines]
    tgt_dir: list[DirectionCosines]

    @property
    def n_aavs(self) -> int:
        return int(self.h.shape[0])

    def target_distance(self, m: int) -> float:
        return self.tgt_dir[m].dist


def draw_nlos(seed: int, n_aavs: int, n_antennas: int) -> ComplexArray:
    """Draw the per-AAV NLoS vectors, one seed-derived stream per AAV."""
    out = np.empty((n_aavs, n_antennas), dtype=complex)
    for m in range(n_aavs):
        z = stream(seed, Stream.NLOS, m).standard_normal((2, n_antennas))
        out[m] = (z[0] + 1j * z[1]) / math.sqrt(2.0)
    return out


def rician_weights(kappa: float) -> tuple[float, float]:
    """``(√(κ/(κ+1)), √(1/(κ+1)))``; κ = inf gives the pure LoS split."""
    if math.isinf(kappa):
        return 1.0, 0.0
    return math.sqrt(kappa / (kappa + 1.0)), math.sqrt(1.0 / (kappa + 1.0))


def generate_channel(
    config: ScenarioConfig,
    layout: AntennaLayout,
    nlos: ComplexArray,
) -> ChannelRealization:
    """Build ``h_m = √(h0)/d_BS,m · (√(κ/(κ+1))·a_m + √(1/(κ+1))·h̃_m)`` for every AAV.

    Raises
    ------
    DegenerateGeometryError:
        If an AAV coincides with the BS or with its target.
    """
    M, N = config.n_aavs, config.n_antennas
    if layout.coords.shape != (M, N, 2):
        raise ValueError(f"layout shape {layout.coords.shape} does not match M={M}, N={N}")
    if nlos.shape != (M, N):
        raise ValueError(f"nlos shape {nlos.shape} does not match M={M}, N={N}")

    los_w, nlos_w = rician_weights(config.rician_factor)
    amp = math.sqrt(config.ref_gain)
    h = np.empty((M, N), dtype=complex)
    g = np.empty((M, N), dtype=complex)
    bs_dir: list[DirectionCosines] = []
    tgt_dir: list[DirectionCosines] = []
    for m in range(M):
        to_bs = direction_cosines(config.aav_positions[m], config.bs_position)
        to_tgt = direction_cosines(config.aav_positions[m], config.target_positions[m])
        a = steering_vector(layout.coords[m], to_bs)
        h[m] = (amp / to_bs.dist) * (los_w * a + nlos_w * nlos[m])
        g[m] = steering_vector(layout.coords[m], to_tgt)
        bs_dir.append(to_bs)
        tgt_dir.append(to_tgt)
    return ChannelRealization(h=h, nlos=nlos, g=g, bs_dir=bs_dir, tgt_dir=tgt_dir)


@dataclass
class ScenarioInstance:
    """One Monte-Carlo instance: a resolved scenario and its frozen NLoS draw."""

    config: ScenarioConfig
    nlos: ComplexArray

    def channels(self, layout: AntennaLayout) -> ChannelRealization:
        return generate_channel(self.config, layout, self.nlos)
