"""Pydantic models for scenario, swarm and sweep configuration."""
from __future__ import annotations

import math
from enum import StrEnum
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Point3 = tuple[float, float, float]

# Non-measured defaults. They reproduce orderings and trends, not absolute latencies.
DEFAULT_AAV_HEIGHT = 50.0
DEFAULT_TARGET_OFFSET = 20.0
DEFAULT_P_MAX = 1.0
DEFAULT_N_ANTENNAS = 4
# d²·Γ_min = 0.5·P_max·N at the default AAV-to-target distance (binding but feasible).
DEFAULT_GAMMA_MIN = (
    0.5 * DEFAULT_P_MAX * DEFAULT_N_ANTENNAS / (DEFAULT_AAV_HEIGHT**2 + DEFAULT_TARGET_OFFSET**2)
)


class Scheme(StrEnum):
    """Antenna placement scheme."""

    MA = "ma"
    FPA = "fpa"
    RPA = "rpa"


SweepVariable = Literal["f_bs_max", "P_max", "N", "M"]


def db_to_linear(db: float) -> float:
    return float(10.0 ** (db / 10.0))


def dbm_to_watts(dbm: float) -> float:
    return db_to_linear(dbm - 30.0)


class ScenarioSettings(BaseModel):
    """File-facing scenario section. Every field has a documented default.

    Per-AAV lists left as ``None`` are derived when the scenario is built: AAV positions are
    spread on a ring inside the deployment area, targets sit on the ground offset horizontally
    from their AAV, and task sizes are drawn from ``task_bits_range``.
    """

    model_config = ConfigDict(extra="forbid")

    n_aavs: int = Field(default=3, ge=1, description="Number of AAVs (M)")
    n_antennas: int = Field(default=DEFAULT_N_ANTENNAS, ge=1, description="MAs per AAV (N)")
    region_size: float = Field(default=20.0, gt=0, description="MA region side U (wavelengths)")
    min_spacing: float = Field(default=0.5, gt=0, description="u_min (wavelengths)")
    wavelength: float = Field(default=0.1, gt=0, description="Carrier wavelength (m), 3 GHz")
    area_size: float = Field(default=600.0, gt=0, description="Deployment area side (m)")
    bs_position: Point3 = Field(default=(0.0, 0.0, 0.0), description="BS position (m)")
    aav_height: float = Field(default=DEFAULT_AAV_HEIGHT, gt=0, description="AAV altitude (m)")
    aav_positions: list[Point3] | None = Field(default=None, description="AAV positions (m)")
    target_offset: float = Field(
        default=DEFAULT_TARGET_OFFSET, ge=0, description="Horizontal target offset (m)"
    )
    target_positions: list[Point3] | None = Field(default=None, description="Targets (m)")
    task_bits: list[float] | None = Field(default=None, description="Task sizes D_m (bits)")
    task_bits_range: tuple[float, float] = Field(
        default=(1e7, 1.5e7), description="Draw range for D_m (bits)"
    )
    p_max: float | list[float] = Field(default=DEFAULT_P_MAX, description="P_max per AAV (W)")
    gamma_min: float = Field(default=DEFAULT_GAMMA_MIN, ge=0, description="Γ_min (linear)")
    f_bs_max: float = Field(default=1e10, gt=0, description="BS compute (cycles/s)")
    cycles_per_bit: float = Field(default=100.0, gt=0, description="β (cycles/bit)")
    bandwidth: float = Field(default=3e6, gt=0, description="Total bandwidth B (Hz)")
    noise_power_dbm: float = Field(default=-110.0, description="σ² (dBm)")
    ref_gain_db: float = Field(default=-60.0, description="h0 at 1 m (dB)")
    rician_factor: float = Field(default=10.0, ge=0, description="κ (linear)")

    @field_validator("task_bits_range")
    @classmethod
    def _ordered_range(cls, v: tuple[float, float]) -> tuple[float, float]:
        lo, hi = v
        if not 0 < lo <= hi:
            raise ValueError("task_bits_range must satisfy 0 < low <= high")
        return v


class ScenarioConfig(BaseModel):
    """Fully resolved scenario in linear units (all per-AAV quantities populated)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_aavs: int = Field(ge=1)
    n_antennas: int = Field(ge=1)
    region_size: float = Field(gt=0)
    min_spacing: float = Field(gt=0)
    wavelength: float = Field(gt=0)
    bs_position: Point3
    aav_positions: tuple[Point3, ...]
    target_positions: tuple[Point3, ...]
    task_bits: tuple[float, ...]
    task_bits_range: tuple[float, float] = (1e7, 1.5e7)
    p_max: tuple[float, ...]
    gamma_min: float = Field(ge=0)
    f_bs_max: float = Field(gt=0)
    cycles_per_bit: float = Field(gt=0)
    bandwidth: float = Field(gt=0)
    noise_power: float = Field(gt=0)
    ref_gain: float = Field(gt=0)
    rician_factor: float = Field(ge=0)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_consistency(self) -> ScenarioConfig:
        m = self.n_aavs
        for name in ("aav_positions", "target_positions", "task_bits", "p_max"):
            if len(getattr(self, name)) != m:
                raise ValueError(f"{name} must have n_aavs={m} entries")
        if self.min_spacing > self.region_size * math.sqrt(2.0):
            raise ValueError("min_spacing must not exceed region_size * sqrt(2)")
        if any(p <= 0 for p in self.p_max):
            raise ValueError("p_max entries must be strictly positive")
        lo, hi = self.task_bits_range
        if any(not lo <= d <= hi for d in self.task_bits):
            raise ValueError(f"task_bits must lie in [{lo:g}, {hi:g}]")
        return self

    @property
    def band_per_aav(self) -> float:
        """FDMA sub-band width B/M (Hz)."""
        return self.bandwidth / self.n_aavs

    @property
    def dim(self) -> int:
        """Dimension of the stacked MA-coordinate space (2·M·N)."""
        return 2 * self.n_aavs * self.n_antennas

    def sensing_threshold(self, distance: float) -> float:
        """Beampattern-gain requirement d²·Γ_min for a target at *distance*."""
        return distance * distance * self.gamma_min


class PsoParams(BaseModel):
    """Outer-layer swarm hyper-parameters."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    swarm_size: int = Field(default=100, ge=1, description="Particles P")
    max_iterations: int = Field(default=200, ge=0, description="Iterations i_max")
    c1: float = Field(default=1.5, ge=0, description="Individual learning factor")
    c2: float = Field(default=1.5, ge=0, description="Global learning factor")
    omega_max: float = Field(default=0.9, gt=0)
    omega_min: float = Field(default=0.4, gt=0)
    step: float = Field(default=1.0, gt=0, description="Position-update constant ϖ")
    psi_spacing: float = Field(default=100.0, ge=0, description="Penalty ψ1 per spacing pair")
    psi_sensing: float = Field(default=100.0, ge=0, description="Penalty ψ2 per sensing AAV")
    velocity_limit: float | None = Field(
        default=None, gt=0, description="Per-component |ν| bound; None means region_size"
    )
    init: Literal["uniform", "feasible"] = "uniform"
    log_every: int = Field(default=10, ge=1)

    @model_validator(mode="after")
    def _check_inertia(self) -> PsoParams:
        if self.omega_max < self.omega_min:
            raise ValueError("omega_max must be >= omega_min")
        return self


class SweepSpec(BaseModel):
    """One experiment sweep over a scalar system parameter."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    variable: SweepVariable = "f_bs_max"
    values: list[float] = Field(default_factory=lambda: [5e9, 1e10, 2e10, 4e10])
    instances: int = Field(default=5, ge=1)
    schemes: list[Scheme] = Field(default_factory=lambda: [Scheme.MA, Scheme.FPA, Scheme.RPA])
    pso: dict[str, Any] = Field(default_factory=dict, description="PsoParams overrides")

    @field_validator("schemes", mode="before")
    @classmethod
    def _lower_schemes(cls, v: Any) -> Any:
        if isinstance(v, list):
            return [s.lower() if isinstance(s, str) else s for s in v]
        return v

    @field_validator("values")
    @classmethod
    def _sorted_values(cls, v: list[float]) -> list[float]:
        if not v:
            raise ValueError("values must be non-empty")
        if any(b < a for a, b in zip(v, v[1:])):
            raise ValueError("values must be sorted ascending")
        return v

    @model_validator(mode="after")
    def _check_pso_overrides(self) -> SweepSpec:
        PsoParams(**self.pso)
        if self.variable in ("N", "M") and any(x != int(x) or x < 1 for x in self.values):
            raise ValueError(f"values for {self.variable} must be positive integers")
        return self

    def pso_params(self, base: PsoParams) -> PsoParams:
        if not self.pso:
            return base
        return PsoParams(**{**base.model_dump(), **self.pso})


class RunConfig(BaseModel):
    """Top-level configuration file: ``{"seed", "scenario", "pso", "sweep"}``."""

    model_config = ConfigDict(extra="forbid")

    seed: int = Field(default=0, ge=0)
    scenario: ScenarioSettings = Field(default_factory=ScenarioSettings)
    pso: PsoParams = Field(default_factory=PsoParams)
    sweep: SweepSpec = Field(default_factory=SweepSpec)
