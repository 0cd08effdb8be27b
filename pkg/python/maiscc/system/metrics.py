"""Beampattern gain, achievable rate, latencies and the inner-layer solution record."""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import numpy.typing as npt

from maiscc.config import ScenarioConfig
from maiscc.system.channel import ChannelRealization
from maiscc.system.geometry import AntennaLayout, ComplexArray, FloatArray

POWER_TOL = 1e-6
SENSING_TOL = 1e-6
COMPUTE_TOL = 1e-6


def beampattern_gain(w: Any, V: float | Any, g: Any) -> float:
    """Gain ``g^H (w w^H + V) g`` toward steering vector *g*.

    *V* is either the compact sensing power ``p_v`` (meaning ``V = p_v·ĝĝ^H`` with
    ``ĝ = g/‖g‖``) or a full Hermitian ``N×N`` covariance.
    """
    w = np.asarray(w, dtype=complex).reshape(-1)
    g = np.asarray(g, dtype=complex).reshape(-1)
    if w.shape != g.shape:
        raise ValueError(f"dimension mismatch: w has {w.size} entries, g has {g.size}")
    comm = abs(np.vdot(g, w)) ** 2
    if np.isscalar(V):
        sensing = float(V) * float(np.vdot(g, g).real)  # type: ignore[arg-type]
    else:
        Vm = np.asarray(V, dtype=complex)
        if Vm.shape != (g.size, g.size):
            raise ValueError(f"dimension mismatch: V has shape {Vm.shape}, expected {g.size}x{g.size}")
        sensing = float(np.vdot(g, Vm @ g).real)
    return float(comm + sensing)


def rate_from_snr(snr: float, band: float) -> float:
    """Shannon rate ``band·log2(1 + snr)`` in bits/s."""
    return band * math.log2(1.0 + snr)


def achievable_rate(h: Any, w: Any, config: ScenarioConfig) -> float:
    """Rate ``(B/M)·log2(1 + |h^H w|²/σ²)`` of one AAV on its FDMA sub-band."""
    h = np.asarray(h, dtype=complex).reshape(-1)
    w = np.asarray(w, dtype=complex).reshape(-1)
    if h.shape != w.shape:
        raise ValueError(f"dimension mismatch: h has {h.size} entries, w has {w.size}")
    snr = abs(np.vdot(h, w)) ** 2 / config.noise_power
    return rate_from_snr(snr, config.band_per_aav)


def latency_components(
    task_bits: float,
    rate: float,
    compute: float,
    cycles_per_bit: float,
) -> tuple[float, float, float]:
    """``(T_tran, T_comp, T)`` for one AAV; zero rate or compute gives ``inf``."""
    if task_bits < 0 or rate < 0 or compute < 0 or cycles_per_bit < 0:
        raise ValueError("latency inputs must be non-negative")
    t_tran = task_bits / rate if rate > 0 else math.inf
    t_comp = cycles_per_bit * task_bits / compute if compute > 0 else math.inf
    return t_tran, t_comp, t_tran + t_comp


def system_objective(solution: InnerSolution | Sequence[float] | FloatArray) -> float:
    """Maximum per-AAV latency Φ (seconds)."""
    latencies = solution.latency if isinstance(solution, InnerSolution) else solution
    values = [float(t) for t in latencies]
    if not values:
        raise ValueError("system_objective of an empty system")
    return max(values)


@dataclass
class ConstraintReport:
    """Outcome of auditing a solution against the hard constraints."""

    region: bool
    spacing: bool
    power: bool
    sensing: bool
    compute: bool
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.region and self.spacing and self.power and self.sensing and self.compute

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "region": self.region,
            "spacing": self.spacing,
            "power": self.power,
            "sensing": self.sensing,
            "compute": self.compute,
            **self.details,
        }


@dataclass
class InnerSolution:
    """Beamforming, sensing power and compute allocation for one fixed layout.

    All arrays are indexed by AAV. ``phi`` always equals ``max(latency)``.
    """

    w: ComplexArray
    sensing_power: FloatArray
    f: FloatArray
    rate: FloatArray
    snr: FloatArray
    t_tran: FloatArray
    t_comp: FloatArray
    latency: FloatArray
    phi: float
    sensing_ok: npt.NDArray[np.bool_]

    @property
    def n_aavs(self) -> int:
        return int(self.w.shape[0])

    @property
    def feasible(self) -> bool:
        return bool(np.all(self.sensing_ok)) and math.isfinite(self.phi)

    @property
    def sensing_violations(self) -> int:
        return int(np.count_nonzero(~self.sensing_ok))

    def sensing_covariance(self, m: int, g: Any) -> ComplexArray:
        """Materialize ``V_m = p_v·ĝĝ^H`` for AAV *m* given its target steering vector."""
        g = np.asarray(g, dtype=complex).reshape(-1)
        g_hat = g / np.linalg.norm(g)
        return self.sensing_power[m] * np.outer(g_hat, g_hat.conj())

    def check_constraints(
        self,
        config: ScenarioConfig,
        channels: ChannelRealization,
        layout: AntennaLayout,
    ) -> ConstraintReport:
        """Audit region, spacing, power, sensing and compute-budget constraints."""
        power_used = np.sum(np.abs(self.w) ** 2, axis=1) + self.sensing_power
        p_max = np.asarray(config.p_max)
        power_ok = bool(np.all(power_used <= p_max + POWER_TOL * np.maximum(1.0, p_max)))

        gains = np.array(
            [beampattern_gain(self.w[m], float(self.sensing_power[m]), channels.g[m])
             for m in range(self.n_aavs)]
        )
        required = np.array(
            [config.sensing_threshold(channels.target_distance(m)) for m in range(self.n_aavs)]
        )
        sensing_ok = bool(np.all(gains >= required * (1.0 - SENSING_TOL)))

        total_f = float(np.sum(self.f))
        compute_ok = bool(np.all(self.f >= 0.0)) and total_f <= config.f_bs_max * (1.0 + COMPUTE_TOL)

        return ConstraintReport(
            region=layout.in_region(config.region_size),
            spacing=layout.spacing_violations(config.min_spacing) == 0,
            power=power_ok,
            sensing=sensing_ok,
            compute=compute_ok,
            details={
                "power_used": power_used.tolist(),
                "beampattern_gain": gains.tolist(),
                "gain_required": required.tolist(),
                "compute_used": total_f,
            },
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "phi_seconds": self.phi,
            "feasible": self.feasible,
            "w": [[[float(z.real), float(z.imag)] for z in row] for row in self.w],
            "sensing_power": self.sensing_power.tolist(),
            "f": self.f.tolist(),
            "rate": self.rate.tolist(),
            "snr": self.snr.tolist(),
            "t_tran": self.t_tran.tolist(),
            "t_comp": self.t_comp.tolist(),
            "latency": self.latency.tolist(),
            "sensing_ok": self.sensing_ok.tolist(),
        }
