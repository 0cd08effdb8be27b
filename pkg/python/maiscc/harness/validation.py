"""Cross-checks of the analytic solvers against the brute-force oracles."""
from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from maiscc.errors import NotPsdError
from maiscc.harness.baselines import fpa_layout, rpa_layout
from maiscc.harness.scenario import build_scenario
from maiscc.rng import Stream, stream
from maiscc.solver.allocation import allocate_computation
from maiscc.solver.beamforming import sensing_feasibility, solve_beamforming_per_aav
from maiscc.solver.inner import solve_inner
from maiscc.solver.lifted import extract_rank_one
from maiscc.solver.oracles import (
    oracle_allocation_grid,
    oracle_beamforming_grid,
    oracle_beamforming_random,
    oracle_joint_small,
)
from maiscc.system.geometry import DirectionCosines, steering_vector
from maiscc.system.metrics import latency_components

logger = logging.getLogger("maiscc.harness.validation")

BEAM_REL_TOL = 1e-3
ALLOC_REL_TOL = 1e-4
EQUALIZE_REL_TOL = 1e-6
DECOUPLING_REL_TOL = 1e-2
UNIT_MODULUS_TOL = 1e-12

_DEFAULT_DISTANCE = math.hypot(50.0, 20.0)


@dataclass
class ValidationResult:
    """Outcome of one named check over its random cases."""

    name: str
    passed: bool
    cases: int = 0
    failures: int = 0
    message: str = ""

    def __bool__(self) -> bool:
        return self.passed


@dataclass
class ValidationReport:
    """Aggregated results of every check."""

    results: list[ValidationResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list[ValidationResult]:
        return [r for r in self.results if not r.passed]

    @property
    def counts(self) -> tuple[int, int]:
        """``(passed, failed)`` check counts."""
        failed = len(self.failures)
        return len(self.results) - failed, failed

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "results": [
                {
                    "name": r.name,
                    "passed": r.passed,
                    "cases": r.cases,
                    "failures": r.failures,
                    "message": r.message,
                }
                for r in self.results
            ],
        }


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _random_beam_case(rng: np.random.Generator) -> tuple[Any, Any, float]:
    """Random channel, random target steering vector and a binding sensing threshold."""
    n = int(rng.integers(2, 4))
    h = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)
    coords = rng.uniform(0.0, 5.0, size=(n, 2))
    theta, psi = rng.uniform(0.0, math.pi / 2.0), rng.uniform(0.0, 2.0 * math.pi)
    direction = DirectionCosines(math.sin(theta) * math.cos(psi), math.sin(theta) * math.sin(psi), 1.0)
    g = steering_vector(coords, direction)
    a2 = abs(np.vdot(h / np.linalg.norm(h), g)) ** 2
    # Threshold strictly between the MRT gain and the all-sensing gain.
    threshold = a2 + rng.uniform(0.05, 0.95) * (n - a2)
    return h, g, float(threshold)


def check_beamforming_oracle(seed: int, instances: int) -> ValidationResult:
    bad = 0
    worst = 0.0
    for k in range(instances):
        h, g, threshold = _random_beam_case(stream(seed, Stream.VALIDATION, 1, k))
        fast = solve_beamforming_per_aav(h, g, 1.0, 1.0, threshold, 1.0)
        ref = oracle_beamforming_grid(h, g, 1.0, 1.0, threshold, 1.0)
        err = _rel(fast.snr, ref.snr)
        worst = max(worst, err)
        if not (fast.feasible and ref.feasible) or err > BEAM_REL_TOL:
            bad += 1
    return ValidationResult("beamforming_oracle", bad == 0, instances, bad,
                            f"max relative SNR error {worst:.2e}")


def check_allocation_oracle(seed: int, instances: int) -> ValidationResult:
    bad = 0
    worst = 0.0
    for k in range(instances):
        rng = stream(seed, Stream.VALIDATION, 2, k)
        m = int(rng.integers(2, 4))
        rates = rng.uniform(1e6, 1e8, size=m)
        bits = rng.uniform(1e7, 1.5e7, size=m)
        f_max = float(rng.uniform(1e9, 5e10))
        f, phi = allocate_computation(rates, bits, 100.0, f_max)
        ref = oracle_allocation_grid(rates, bits, 100.0, f_max)
        lat = np.array([latency_components(bits[i], rates[i], f[i], 100.0)[2] for i in range(m)])
        err = _rel(phi, ref)
        worst = max(worst, err)
        spread = float((lat.max() - lat.min()) / lat.max())
        if err > ALLOC_REL_TOL or spread > EQUALIZE_REL_TOL or _rel(float(f.sum()), f_max) > 1e-6:
            bad += 1
    return ValidationResult("allocation_oracle", bad == 0, instances, bad,
                            f"max relative phi error {worst:.2e}")


def check_decoupling(seed: int, instances: int) -> ValidationResult:
    bad = 0
    worst = 0.0
    for k in range(instances):
        rng = stream(seed, Stream.VALIDATION, 3, k)
        m, n = int(rng.integers(1, 3)), int(rng.integers(2, 4))
        overrides = {
            "n_aavs": m,
            "n_antennas": n,
            "gamma_min": 0.5 * n / _DEFAULT_DISTANCE**2,
        }
        instance = build_scenario(seed + k, overrides)
        layout = rpa_layout(rng, instance.config)
        channels = instance.channels(layout)
        phi = solve_inner(layout, instance.config, channels).phi
        ref = oracle_joint_small(layout, instance.config, channels).phi
        err = _rel(phi, ref)
        worst = max(worst, err)
        if err > DECOUPLING_REL_TOL:
            bad += 1
    return ValidationResult("decoupling", bad == 0, instances, bad,
                            f"max relative phi error {worst:.2e}")


def check_full_space_random(seed: int, instances: int) -> ValidationResult:
    """No random beamformer from the whole of ``C^N`` beats the two-vector closed form."""
    bad = 0
    closest = math.inf
    for k in range(instances):
        h, g, threshold = _random_beam_case(stream(seed, Stream.VALIDATION, 7, k))
        fast = solve_beamforming_per_aav(h, g, 1.0, 1.0, threshold, 1.0)
        sampled = oracle_beamforming_random(
            h, g, 1.0, 1.0, threshold, 1.0, samples=20_000, seed=seed * 1_000_003 + k
        )
        if not fast.feasible or sampled > fast.snr * (1.0 + BEAM_REL_TOL):
            bad += 1
        elif sampled > 0.0 and fast.snr > 0.0:
            closest = min(closest, 1.0 - sampled / fast.snr)
    return ValidationResult("full_space_random", bad == 0, instances, bad,
                            f"smallest relative margin {closest:.2e}")


def check_unit_modulus(seed: int, instances: int) -> ValidationResult:
    rng = stream(seed, Stream.VALIDATION, 4)
    worst = 0.0
    for _ in range(instances):
        coords = rng.uniform(0.0, 20.0, size=(8, 2))
        dx, dy = rng.uniform(-0.7, 0.7, size=2)
        a = steering_vector(coords, DirectionCosines(float(dx), float(dy), 1.0))
        worst = max(worst, float(np.max(np.abs(np.abs(a) - 1.0))))
    ok = worst <= UNIT_MODULUS_TOL
    return ValidationResult("unit_modulus", ok, instances, 0 if ok else 1,
                            f"max modulus deviation {worst:.2e}")


def check_sensing_boundary(seed: int, instances: int) -> ValidationResult:
    """Feasibility flag and achieved gain on thresholds just either side of ``P·N``."""
    rng = stream(seed, Stream.VALIDATION, 5)
    bad = 0
    for _ in range(instances):
        n = int(rng.integers(1, 9))
        p, d = float(rng.uniform(0.1, 2.0)), float(rng.uniform(10.0, 100.0))
        gamma = p * n / d**2 * (1.0 + float(rng.choice([-1e-6, 1e-6])))
        h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        g = steering_vector(rng.uniform(0.0, 5.0, size=(n, 2)), DirectionCosines(0.3, -0.2, d))
        beam = solve_beamforming_per_aav(h, g, p, d, gamma, 1.0)
        expected = sensing_feasibility(p, n, d, gamma)
        power = float(np.vdot(beam.w, beam.w).real) + beam.p_v
        ok = beam.feasible == expected and power <= p * (1.0 + 1e-6)
        if expected:
            ok = ok and beam.gain >= d * d * gamma * (1.0 - 1e-6)
        bad += not ok
    return ValidationResult("sensing_boundary", bad == 0, instances, bad)


def check_rank_one(seed: int, instances: int) -> ValidationResult:
    rng = stream(seed, Stream.VALIDATION, 6)
    bad = 0
    for _ in range(instances):
        n = int(rng.integers(2, 6))
        w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        W = np.outer(w, w.conj())
        x = extract_rank_one(W)
        if not np.allclose(np.outer(x, x.conj()), W, rtol=1e-9, atol=1e-9):
            bad += 1
    try:
        extract_rank_one(np.diag([1.0, -1.0]))
        bad += 1
    except NotPsdError:
        pass
    return ValidationResult("rank_one_extraction", bad == 0, instances + 1, bad)


def check_constraint_audit(seed: int, instances: int) -> ValidationResult:
    bad = 0
    for k in range(instances):
        instance = build_scenario(seed + k)
        layout = fpa_layout(instance.config)
        channels = instance.channels(layout)
        sol = solve_inner(layout, instance.config, channels)
        if not sol.check_constraints(instance.config, channels, layout).passed:
            bad += 1
    return ValidationResult("constraint_audit", bad == 0, instances, bad)


CheckFn = Callable[[int, int], ValidationResult]

CHECKS: dict[str, CheckFn] = {
    "beamforming_oracle": check_beamforming_oracle,
    "allocation_oracle": check_allocation_oracle,
    "decoupling": check_decoupling,
    "full_space_random": check_full_space_random,
    "unit_modulus": check_unit_modulus,
    "sensing_boundary": check_sensing_boundary,
    "rank_one_extraction": check_rank_one,
    "constraint_audit": check_constraint_audit,
}


def run_validation(seed: int = 0, instances: int = 20) -> ValidationReport:
    """Run every check with *instances* random cases each.

    A check that raises is recorded as failed with the exception text.
    """
    report = ValidationReport()
    for name, check in CHECKS.items():
        try:
            result = check(seed, instances)
        except Exception as exc:
            logger.error("Validation check %s raised: %s", name, exc)
            result = ValidationResult(name, False, message=f"exception: {exc}")
        logger.info("Validation %s: %s (%s)", name, "pass" if result else "FAIL", result.message)
        report.results.append(result)
    return report
