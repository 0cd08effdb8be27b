"""Array geometry: direction cosines, steering vectors and MA layouts."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from maiscc.errors import DegenerateGeometryError, SamplingBudgetError

logger = logging.getLogger("maiscc.system.geometry")

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]

# Spacing checks tolerate this much float noise (wavelengths).
SPACING_TOL = 1e-12


@dataclass(frozen=True)
class DirectionCosines:
    """Horizontal components of a unit direction plus the 3-D distance.

    Attributes
    ----------
    dx, dy:
        ``sinθ·cosϑ`` and ``sinθ·sinϑ`` of the direction (dimensionless).
    dist:
        Euclidean distance between the two points (meters).
    """

    dx: float
    dy: float
    dist: float


def direction_cosines(src: Any, dst: Any) -> DirectionCosines:
    """Direction from *src* to *dst*, both 3-D points in meters."""
    a = np.asarray(src, dtype=float)
    b = np.asarray(dst, dtype=float)
    if a.shape != (3,) or b.shape != (3,):
        raise ValueError("direction_cosines expects two 3-D points")
    delta = b - a
    dist = float(np.linalg.norm(delta))
    if dist == 0.0:
        raise DegenerateGeometryError()
    return DirectionCosines(dx=float(delta[0] / dist), dy=float(delta[1] / dist), dist=dist)


def steering_vector(coords: Any, direction: DirectionCosines) -> ComplexArray:
    """Steering vector of one array toward *direction*.

    *coords* is an ``(N, 2)`` array of antenna positions in wavelengths; entry ``n`` is
    ``exp(j·2π·(x_n·dx + y_n·dy))``.
    """
    u = np.asarray(coords, dtype=float).reshape(-1, 2)
    phase = 2.0 * np.pi * (u[:, 0] * direction.dx + u[:, 1] * direction.dy)
    return np.exp(1j * phase)


@dataclass
class AntennaLayout:
    """MA coordinates of every AAV, shape ``(M, N, 2)``, in wavelengths."""

    coords: FloatArray

    def __post_init__(self) -> None:
        self.coords = np.asarray(self.coords, dtype=float)
        if self.coords.ndim != 3 or self.coords.shape[2] != 2:
            raise ValueError(f"layout coords must have shape (M, N, 2), got {self.coords.shape}")

    @classmethod
    def from_vector(cls, vec: Any, n_aavs: int, n_antennas: int) -> AntennaLayout:
        """Reshape a stacked particle position of length ``2·M·N``."""
        return cls(np.asarray(vec, dtype=float).reshape(n_aavs, n_antennas, 2).copy())

    def to_vector(self) -> FloatArray:
        return self.coords.reshape(-1).copy()

    @property
    def n_aavs(self) -> int:
        return int(self.coords.shape[0])

    @property
    def n_antennas(self) -> int:
        return int(self.coords.shape[1])

    def in_region(self, region_size: float) -> bool:
        return bool(np.all(self.coords >= 0.0) and np.all(self.coords <= region_size))

    def pair_distances(self, m: int) -> tuple[FloatArray, tuple[npt.NDArray[np.intp], ...]]:
        """Distances of every antenna pair ``i < j`` of AAV *m* with their index arrays."""
        u = self.coords[m]
        iu = np.triu_indices(u.shape[0], k=1)
        diff = u[iu[0]] - u[iu[1]]
        return np.hypot(diff[:, 0], diff[:, 1]), iu

    def violating_pairs(self, min_spacing: float) -> list[tuple[int, int, int, float]]:
        """``(m, i, j, distance)`` for every pair closer than *min_spacing*."""
        out: list[tuple[int, int, int, float]] = []
        for m in range(self.n_aavs):
            dist, (ii, jj) = self.pair_distances(m)
            for k in np.flatnonzero(dist < min_spacing - SPACING_TOL):
                out.append((m, int(ii[k]), int(jj[k]), float(dist[k])))
        return out

    def spacing_violations(self, min_spacing: float) -> int:
        """Number of antenna pairs (within any AAV) closer than *min_spacing*."""
        total = 0
        for m in range(self.n_aavs):
            dist, _ = self.pair_distances(m)
            total += int(np.count_nonzero(dist < min_spacing - SPACING_TOL))
        return total

    def is_feasible(self, region_size: float, min_spacing: float) -> bool:
        return self.in_region(region_size) and self.spacing_violations(min_spacing) == 0

    def to_dict(self) -> dict[str, Any]:
        return {"coords_wavelengths": self.coords.tolist()}


def repair_spacing(
    layout: AntennaLayout,
    min_spacing: float,
    region_size: float,
    max_rounds: int = 200,
) -> tuple[AntennaLayout, bool]:
    """Push violating antenna pairs apart until every pair respects *min_spacing*.

    Each round moves both antennas of every violating pair half the deficit (plus a small
    margin) along their separating direction, then clamps back into ``[0, region_size]²``.
    Coincident antennas separate along a deterministic pair-dependent direction.

    Returns
    -------
    (layout, ok):
        The repaired copy and whether it is free of spacing violations.
    """
    fixed = AntennaLayout(layout.coords.copy())
    margin = 1e-9 * max(1.0, min_spacing)
    for round_no in range(max_rounds):
        pairs = fixed.violating_pairs(min_spacing)
        if not pairs:
            if round_no:
                logger.debug("Spacing repaired after %d round(s)", round_no)
            return fixed, True
        for m, i, j, dist in pairs:
            ui, uj = fixed.coords[m, i], fixed.coords[m, j]
            sep = uj - ui
            norm = float(np.hypot(sep[0], sep[1]))
            if norm <= SPACING_TOL:
                angle = 2.0 * math.pi * ((i * 7 + j * 13 + round_no) % 32) / 32.0
                direction = np.array([math.cos(angle), math.sin(angle)])
            else:
                direction = sep / norm
            push = 0.5 * (min_spacing - dist) + margin
            fixed.coords[m, i] = ui - push * direction
            fixed.coords[m, j] = uj + push * direction
        np.clip(fixed.coords, 0.0, region_size, out=fixed.coords)
    ok = fixed.spacing_violations(min_spacing) == 0
    if not ok:
        logger.warning("Spacing repair gave up after %d rounds", max_rounds)
    return fixed, ok


def sample_feasible_array(
    rng: np.random.Generator,
    n_antennas: int,
    min_spacing: float,
    region_size: float,
    max_attempts: int = 10_000,
) -> FloatArray:
    """Rejection-sample ``n_antennas`` uniform positions in ``[0, region_size]²`` at spacing.

    Raises
    ------
    SamplingBudgetError:
        If no admissible array was drawn within *max_attempts*.
    """
    iu = np.triu_indices(n_antennas, k=1)
    for _ in range(max_attempts):
        u = rng.uniform(0.0, region_size, size=(n_antennas, 2))
        diff = u[iu[0]] - u[iu[1]]
        if np.all(np.hypot(diff[:, 0], diff[:, 1]) >= min_spacing):
            return u
    raise SamplingBudgetError(max_attempts, what=f"{n_antennas}-antenna array")


def sample_feasible_layout(
    rng: np.random.Generator,
    n_aavs: int,
    n_antennas: int,
    min_spacing: float,
    region_size: float,
    max_attempts: int = 10_000,
) -> AntennaLayout:
    """Independent feasible arrays for every AAV, drawn in AAV order from *rng*."""
    return AntennaLayout(
        np.stack(
            [
                sample_feasible_array(rng, n_antennas, min_spacing, region_size, max_attempts)
                for _ in range(n_aavs)
            ]
        )
    )
