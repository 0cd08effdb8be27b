"""Structured domain errors raised by maiscc."""
from __future__ import annotations


class MaisccError(Exception):
    """Base class for every structured domain error (CLI exit code 1)."""


class DegenerateGeometryError(MaisccError, ValueError):
    """Two points that must be distinct coincide."""

    def __init__(self, message: str = "degenerate geometry") -> None:
        super().__init__(message)


class NotPsdError(MaisccError, ValueError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""

    def __init__(self, min_eigenvalue: float) -> None:
        super().__init__(f"not PSD (min eigenvalue {min_eigenvalue:.3e})")
        self.min_eigenvalue = min_eigenvalue


class InfeasibleScenarioError(MaisccError):
    """The scenario admits no solution satisfying its hard constraints."""


class SamplingBudgetError(MaisccError):
    """Rejection sampling gave up before finding an admissible sample."""

    def __init__(self, attempts: int, what: str = "layout") -> None:
        super().__init__(f"could not sample a feasible {what} within {attempts} attempts")
        self.attempts = attempts


class ConfigError(MaisccError):
    """The configuration file is missing, unparseable or violates the schema.

    Attributes
    ----------
    field:
        Dotted path of the offending field (empty when the whole file is at fault).
    line:
        1-based line in the file when known.
    expected:
        Human-readable description of what was expected.
    """

    def __init__(
        self,
        message: str,
        field: str = "",
        line: int | None = None,
        expected: str = "",
    ) -> None:
        parts = [message]
        if field:
            parts.append(f"field={field}")
        if line is not None:
            parts.append(f"line={line}")
        if expected:
            parts.append(f"expected={expected}")
        super().__init__("; ".join(parts))
        self.field = field
        self.line = line
        self.expected = expected


class OutputError(MaisccError):
    """A result file could not be written."""
