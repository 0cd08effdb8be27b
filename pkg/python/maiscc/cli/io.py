"""Configuration parsing and deterministic result files."""
from __future__ import annotations

import csv
import json
import logging
import math
import re
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from maiscc.config import RunConfig
from maiscc.errors import ConfigError, OutputError
from maiscc.harness.sweep import SweepTable

logger = logging.getLogger("maiscc.cli.io")

CSV_COLUMNS = (
    "sweep_variable",
    "value",
    "scheme",
    "instance",
    "seed",
    "phi_seconds",
    "t_tran_max",
    "t_comp_max",
    "feasible",
)
SUMMARY_COLUMNS = ("sweep_variable", "value", "scheme", "mean_phi", "std_phi", "count", "failed")
TRACE_COLUMNS = ("iteration", "gbest_fitness")


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


def _line_of_path(text: str, keys: Sequence[str]) -> int | None:
    """Line of the last of *keys*, each searched after the one enclosing it."""
    pos = 0
    line = None
    for key in keys:
        match = re.compile(rf'"{re.escape(key)}"\s*:').search(text, pos)
        if match is None:
            break
        pos = match.end()
        line = text.count("\n", 0, match.start()) + 1
    return line


def parse_config_text(text: str) -> RunConfig:
    """Validate a JSON document against the :class:`RunConfig` schema.

    Raises
    ------
    ConfigError:
        On malformed JSON (with its line) or the first schema violation (with the dotted field
        path, the line of its key when present and the expected type).
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno, expected="JSON object") from exc
    if not isinstance(raw, dict):
        raise ConfigError("top level must be an object", expected="JSON object")
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as exc:
        err = exc.errors()[0]
        loc = [str(p) for p in err.get("loc", ())]
        field = ".".join(loc)
        key = next((p for p in reversed(loc) if not p.isdigit()), "")
        line = _line_of_path(text, [p for p in loc if not p.isdigit()]) if key else None
        if err["type"] == "extra_forbidden":
            raise ConfigError(f"unknown key {key!r}", field=field, line=line) from exc
        raise ConfigError(err["msg"], field=field, line=line, expected=err["type"]) from exc


def parse_config(path: str | Path) -> RunConfig:
    """Read and validate the JSON configuration file at *path*."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    return parse_config_text(p.read_text(encoding="utf-8"))


def echo_config(config: RunConfig) -> str:
    """Effective configuration with every default filled in; re-parses to an equal model."""
    return config.model_dump_json(indent=2)


# ---------------------------------------------------------------------------
# Result files
# ---------------------------------------------------------------------------


def format_float(x: float) -> str:
    """17 significant digits; non-finite values as ``inf``, ``-inf`` or ``nan``."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def write_rows(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a header plus *rows* with ``\\n`` line endings."""
    p = Path(path)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        with p.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
    except OSError as exc:
        raise OutputError(f"cannot write {p}: {exc.strerror or exc}") from exc
    logger.debug("Wrote %s", p)
    return p


def emit_csv(table: SweepTable, path: str | Path) -> Path:
    """One row per (value, scheme, instance) in table order."""
    return write_rows(
        path,
        CSV_COLUMNS,
        (
            (r.variable, float(r.value), r.scheme, r.instance, r.seed, float(r.phi),
             float(r.t_tran_max), float(r.t_comp_max), r.feasible)
            for r in table.rows
        ),
    )


def summary_path(path: str | Path) -> Path:
    """``results.csv`` -> ``results.summary.csv``."""
    p = Path(path)
    return p.with_name(f"{p.stem}.summary.csv")


def emit_summary_csv(table: SweepTable, path: str | Path) -> Path:
    return write_rows(
        path,
        SUMMARY_COLUMNS,
        (
            (table.variable, float(s.value), s.scheme, s.mean_phi, s.std_phi, s.count, s.failed)
            for s in table.summary()
        ),
    )


def emit_trace_csv(trace: Sequence[float], path: str | Path) -> Path:
    return write_rows(path, TRACE_COLUMNS, ((i, float(v)) for i, v in enumerate(trace)))


def write_json(document: dict[str, Any], path: str | Path) -> Path:
    """Pretty-printed JSON; non-finite floats are written as strings."""

    def clean(v: Any) -> Any:
        if isinstance(v, float) and not math.isfinite(v):
            return format_float(v)
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        return v

    p = Path(path)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(json.dumps(clean(document), indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {p}: {exc.strerror or exc}") from exc
    return p
