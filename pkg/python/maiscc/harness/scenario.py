"""Scenario construction: defaults, derived geometry and seeded instance draws."""
from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from typing import Any

from pydantic import ValidationError

from maiscc.config import (
    Point3,
    ScenarioConfig,
    ScenarioSettings,
    db_to_linear,
    dbm_to_watts,
)
from maiscc.errors import ConfigError, InfeasibleScenarioError
from maiscc.rng import Stream, stream
from maiscc.system.channel import ScenarioInstance, draw_nlos

logger = logging.getLogger("maiscc.harness.scenario")

# Ring radius of the default AAV placement, as a fraction of the area side.
_RING_FRACTION = 1.0 / 3.0


def ring_positions(n_aavs: int, area_size: float, height: float) -> list[Point3]:
    """AAVs evenly spread on a ring centred in the deployment area."""
    c = area_size / 2.0
    r = area_size * _RING_FRACTION
    return [
        (
            c + r * math.cos(2.0 * math.pi * m / n_aavs),
            c + r * math.sin(2.0 * math.pi * m / n_aavs),
            height,
        )
        for m in range(n_aavs)
    ]


def check_packable(n_antennas: int, min_spacing: float, region_size: float) -> None:
    """Reject arrays that cannot possibly fit.

    Disks of radius ``u_min/2`` around the antennas are disjoint and lie in the region grown
    by ``u_min/2`` on every side, so their total area bounds ``N`` from above.
    """
    if n_antennas <= 1:
        return
    disk = math.pi * min_spacing * min_spacing / 4.0
    if n_antennas * disk > (region_size + min_spacing) ** 2:
        raise InfeasibleScenarioError(
            f"{n_antennas} antennas at spacing {min_spacing:g} cannot fit in a "
            f"{region_size:g}x{region_size:g} region"
        )


def resolve_settings(seed: int, settings: ScenarioSettings) -> ScenarioConfig:
    """Fill in derived per-AAV quantities and convert to linear units."""
    M = settings.n_aavs
    check_packable(settings.n_antennas, settings.min_spacing, settings.region_size)

    aavs = settings.aav_positions or ring_positions(M, settings.area_size, settings.aav_height)
    if settings.target_positions is not None:
        targets = settings.target_positions
    else:
        targets = [(x + settings.target_offset, y, 0.0) for x, y, _ in aavs]

    if settings.task_bits is not None:
        task_bits = [float(d) for d in settings.task_bits]
    else:
        lo, hi = settings.task_bits_range
        task_bits = stream(seed, Stream.TASKS).uniform(lo, hi, size=M).tolist()

    p_max = settings.p_max if isinstance(settings.p_max, list) else [settings.p_max] * M

    try:
        return ScenarioConfig(
            n_aavs=M,
            n_antennas=settings.n_antennas,
            region_size=settings.region_size,
            min_spacing=settings.min_spacing,
            wavelength=settings.wavelength,
            bs_position=settings.bs_position,
            aav_positions=tuple(aavs),
            target_positions=tuple(targets),
            task_bits=tuple(task_bits),
            task_bits_range=settings.task_bits_range,
            p_max=tuple(p_max),
            gamma_min=settings.gamma_min,
            f_bs_max=settings.f_bs_max,
            cycles_per_bit=settings.cycles_per_bit,
            bandwidth=settings.bandwidth,
            noise_power=dbm_to_watts(settings.noise_power_dbm),
            ref_gain=db_to_linear(settings.ref_gain_db),
            rician_factor=settings.rician_factor,
            seed=seed,
        )
    except ValidationError as exc:
        err = exc.errors()[0]
        field = ".".join(str(p) for p in err.get("loc", ()))
        raise ConfigError(f"inconsistent scenario: {err['msg']}", field=f"scenario.{field}") from exc


def build_scenario(
    seed: int = 0,
    overrides: ScenarioSettings | Mapping[str, Any] | None = None,
) -> ScenarioInstance:
    """Resolve a scenario and draw its frozen NLoS components.

    *overrides* is either a full :class:`ScenarioSettings` or a mapping of fields to replace in
    the defaults. The same seed always yields the same task sizes and NLoS draws.

    Raises
    ------
    ConfigError:
        Unknown or ill-typed override fields, or per-AAV lists of the wrong length.
    InfeasibleScenarioError:
        If the antenna count cannot fit in the region at the requested spacing.
    """
    if isinstance(overrides, ScenarioSettings):
        settings = overrides
    else:
        try:
            settings = ScenarioSettings(**dict(overrides or {}))
        except ValidationError as exc:
            err = exc.errors()[0]
            field = ".".join(str(p) for p in err.get("loc", ()))
            raise ConfigError(f"invalid override: {err['msg']}", field=field) from exc
    config = resolve_settings(seed, settings)
    nlos = draw_nlos(seed, config.n_aavs, config.n_antennas)
    logger.debug(
        "Built scenario seed=%d M=%d N=%d D=%s", seed, config.n_aavs, config.n_antennas,
        [f"{d:.3g}" for d in config.task_bits],
    )
    return ScenarioInstance(config=config, nlos=nlos)
