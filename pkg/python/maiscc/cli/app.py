"""maiscc CLI – Typer application."""
from __future__ import annotations

import json
import logging
import math
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Annotated, Any

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table
from rich.text import Text

from maiscc.cli.io import (
    echo_config,
    emit_csv,
    emit_summary_csv,
    emit_trace_csv,
    format_float,
    parse_config,
    summary_path,
    write_json,
)
from maiscc.config import PsoParams, RunConfig, Scheme, SweepSpec
from maiscc.errors import MaisccError
from maiscc.harness.scenario import build_scenario
from maiscc.harness.sweep import convergence_trace, evaluate_scheme, plateau_iteration, run_sweep
from maiscc.harness.validation import run_validation
from maiscc.solver.inner import interior_point_complexity

app = typer.Typer(
    name="maiscc",
    help="Movable-antenna placement and latency minimization for multi-AAV ISCC.",
    no_args_is_help=True,
    add_completion=False,
)
console = Console()
err_console = Console(stderr=True, style="red")

ConfigOpt = Annotated[Path | None, typer.Option("--config", "-c", help="JSON config file")]
SeedOpt = Annotated[int | None, typer.Option("--seed", "-s", min=0, help="Master seed")]
OutOpt = Annotated[Path | None, typer.Option("--out", "-o", help="Output file")]
ParticlesOpt = Annotated[int | None, typer.Option("--particles", "-p", min=1, help="Swarm size")]
ItersOpt = Annotated[int | None, typer.Option("--iters", "-i", min=0, help="PSO iterations")]
SchemeOpt = Annotated[Scheme | None, typer.Option("--scheme", help="ma | fpa | rpa")]
InstancesOpt = Annotated[int | None, typer.Option("--instances", "-n", min=1)]
WorkersOpt = Annotated[int, typer.Option("--workers", "-w", min=1, help="Worker threads")]
VerboseOpt = Annotated[bool, typer.Option("--verbose", "-v", help="Debug logging")]


def _abort(msg: str) -> None:
    err_console.print(f"[bold red]error:[/] {msg}")
    raise typer.Exit(1)


def _success(msg: str) -> None:
    console.print(f"[bold green]ok:[/] {msg}")


def _configure_logging(verbose: bool) -> None:
    root = logging.getLogger("maiscc")
    for handler in [h for h in root.handlers if isinstance(h, RichHandler)]:
        root.removeHandler(handler)
    root.addHandler(RichHandler(console=Console(stderr=True), show_path=False))
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)


def _load(config: Path | None, seed: int | None) -> RunConfig:
    cfg = parse_config(config) if config is not None else RunConfig()
    if seed is not None:
        cfg = RunConfig(**{**cfg.model_dump(), "seed": seed})
    return cfg


def _pso_overrides(particles: int | None, iters: int | None) -> dict[str, Any]:
    update: dict[str, Any] = {}
    if particles is not None:
        update["swarm_size"] = particles
    if iters is not None:
        update["max_iterations"] = iters
    return update


def _pso(cfg: RunConfig, particles: int | None, iters: int | None) -> PsoParams:
    update = _pso_overrides(particles, iters)
    if not update:
        return cfg.pso
    return PsoParams(**{**cfg.pso.model_dump(), **update})


def _fmt(x: float) -> str:
    return f"{x:.6g}" if math.isfinite(x) else format_float(x)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


@app.command()
def run(
    config: ConfigOpt = None,
    seed: SeedOpt = None,
    out: OutOpt = None,
    particles: ParticlesOpt = None,
    iters: ItersOpt = None,
    scheme: SchemeOpt = None,
    workers: WorkersOpt = 1,
    verbose: VerboseOpt = False,
) -> None:
    """Optimize one scenario instance and write the layout and solution as JSON."""
    _configure_logging(verbose)
    try:
        cfg = _load(config, seed)
        params = _pso(cfg, particles, iters)
        chosen = scheme or Scheme.MA
        instance = build_scenario(cfg.seed, cfg.scenario)
        result = evaluate_scheme(instance, chosen, params, workers=workers)
        sc = instance.config
        audit = result.solution.check_constraints(sc, result.channels, result.layout)
        document = {
            "config": json.loads(echo_config(cfg)),
            "scheme": chosen.value,
            "result": result.to_dict(),
            "trace_length": len(result.trace),
            "constraints": {"passed": audit.passed, **audit.to_dict()},
            "complexity": interior_point_complexity(
                sc.n_aavs, sc.n_antennas, params.swarm_size, params.max_iterations
            ),
        }
        path = write_json(document, out or Path("run.json"))
    except MaisccError as exc:
        _abort(str(exc))
        return

    sol = result.solution
    table = Table(title=f"{chosen.value.upper()} solution (seed {cfg.seed})")
    table.add_column("AAV", style="cyan")
    table.add_column("Rate (bit/s)")
    table.add_column("f (cycles/s)")
    table.add_column("T_tran (s)")
    table.add_column("T_comp (s)")
    table.add_column("Latency (s)", style="bold")
    table.add_column("Sensing")
    for m in range(sol.n_aavs):
        ok = bool(sol.sensing_ok[m])
        table.add_row(
            str(m),
            _fmt(float(sol.rate[m])),
            _fmt(float(sol.f[m])),
            _fmt(float(sol.t_tran[m])),
            _fmt(float(sol.t_comp[m])),
            _fmt(float(sol.latency[m])),
            Text("ok" if ok else "violated", style="green" if ok else "red"),
        )
    console.print(table)
    console.print(f"phi = [bold]{_fmt(sol.phi)}[/] s   feasible = {result.feasible}")
    _success(f"Wrote [bold]{path}[/]")


@app.command()
def sweep(
    config: ConfigOpt = None,
    seed: SeedOpt = None,
    out: OutOpt = None,
    particles: ParticlesOpt = None,
    iters: ItersOpt = None,
    scheme: SchemeOpt = None,
    instances: InstancesOpt = None,
    workers: WorkersOpt = 1,
    verbose: VerboseOpt = False,
) -> None:
    """Run the configured parameter sweep and write per-cell and summary CSVs."""
    _configure_logging(verbose)
    try:
        cfg = _load(config, seed)
        update: dict[str, Any] = {}
        if instances is not None:
            update["instances"] = instances
        if scheme is not None:
            update["schemes"] = [scheme]
        overrides = _pso_overrides(particles, iters)
        if overrides:
            update["pso"] = {**cfg.sweep.pso, **overrides}
        spec = SweepSpec(**{**cfg.sweep.model_dump(), **update}) if update else cfg.sweep
        table = run_sweep(spec, cfg.scenario, cfg.pso, cfg.seed, workers=workers)
        path = emit_csv(table, out or Path("sweep.csv"))
        spath = emit_summary_csv(table, summary_path(path))
    except MaisccError as exc:
        _abort(str(exc))
        return

    summary = Table(title=f"Max latency vs {spec.variable}")
    summary.add_column(spec.variable, style="cyan")
    summary.add_column("Scheme")
    summary.add_column("Mean phi (s)", style="bold")
    summary.add_column("Std (s)")
    summary.add_column("n")
    summary.add_column("Failed")
    for s in table.summary():
        summary.add_row(
            f"{s.value:g}", s.scheme.upper(), _fmt(s.mean_phi), _fmt(s.std_phi),
            str(s.count), Text(str(s.failed), style="red" if s.failed else "dim"),
        )
    console.print(summary)
    _success(f"Wrote [bold]{path}[/] ({len(table.rows)} rows) and [bold]{spath}[/]")


@app.command()
def convergence(
    config: ConfigOpt = None,
    seed: SeedOpt = None,
    out: OutOpt = None,
    particles: ParticlesOpt = None,
    iters: ItersOpt = None,
    workers: WorkersOpt = 1,
    verbose: VerboseOpt = False,
) -> None:
    """Write the per-iteration gbest fitness of one MA optimization as CSV."""
    _configure_logging(verbose)
    try:
        cfg = _load(config, seed)
        instance = build_scenario(cfg.seed, cfg.scenario)
        trace = convergence_trace(instance, _pso(cfg, particles, iters), workers=workers)
        path = emit_trace_csv(trace, out or Path("convergence.csv"))
    except MaisccError as exc:
        _abort(str(exc))
        return
    console.print(
        f"gbest: initial [bold]{_fmt(trace[0])}[/] -> final [bold]{_fmt(trace[-1])}[/]"
        f" after {len(trace) - 1} iterations"
    )
    console.print(f"within 1% of final from iteration [bold]{plateau_iteration(trace)}[/]")
    _success(f"Wrote [bold]{path}[/]")


@app.command()
def baseline(
    config: ConfigOpt = None,
    seed: SeedOpt = None,
    out: OutOpt = None,
    scheme: SchemeOpt = None,
    verbose: VerboseOpt = False,
) -> None:
    """Evaluate the FPA and RPA baselines on one instance."""
    _configure_logging(verbose)
    if scheme is Scheme.MA:
        _abort("baseline evaluates fpa or rpa; use `run` for ma")
        return
    schemes = [scheme] if scheme is not None else [Scheme.FPA, Scheme.RPA]
    try:
        cfg = _load(config, seed)
        instance = build_scenario(cfg.seed, cfg.scenario)
        results = {s: evaluate_scheme(instance, s, cfg.pso) for s in schemes}
        path = None
        if out is not None:
            path = write_json(
                {s.value: r.to_dict() for s, r in results.items()} | {"seed": cfg.seed}, out
            )
    except MaisccError as exc:
        _abort(str(exc))
        return

    table = Table(title=f"Baselines (seed {cfg.seed})")
    table.add_column("Scheme", style="cyan")
    table.add_column("phi (s)", style="bold")
    table.add_column("Fitness")
    table.add_column("Feasible")
    for s, r in results.items():
        table.add_row(s.value.upper(), _fmt(r.solution.phi), _fmt(r.fitness), str(r.feasible))
    console.print(table)
    if path is not None:
        _success(f"Wrote [bold]{path}[/]")


@app.command()
def validate(
    config: ConfigOpt = None,
    seed: SeedOpt = None,
    instances: InstancesOpt = None,
    out: OutOpt = None,
    verbose: VerboseOpt = False,
) -> None:
    """Cross-check the solvers against the brute-force oracles; exit 1 on any failure."""
    _configure_logging(verbose)
    try:
        cfg = _load(config, seed)
        report = run_validation(cfg.seed, instances or 20)
        if out is not None:
            write_json(report.to_dict(), out)
    except MaisccError as exc:
        _abort(str(exc))
        return

    table = Table(title=f"Validation (seed {cfg.seed})")
    table.add_column("Check", style="cyan")
    table.add_column("Result")
    table.add_column("Cases")
    table.add_column("Detail", style="dim")
    for r in report.results:
        table.add_row(
            r.name,
            Text("pass" if r.passed else "FAIL", style="green" if r.passed else "bold red"),
            str(r.cases),
            r.message,
        )
    console.print(table)
    passed, failed = report.counts
    if failed:
        _abort(f"{failed} check(s) failed, {passed} passed")
    _success(f"{passed} check(s) passed")


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------


def _exit_code(exc: SystemExit) -> int:
    if exc.code is None:
        return 0
    return exc.code if isinstance(exc.code, int) else 1


def main(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and return its exit code (0 ok, 1 domain error, 2 usage error).

    The app runs in standalone mode, so usage errors, aborts and ``typer.Exit`` are
    mapped to exit codes by the bundled click before they reach us.
    """
    args = list(sys.argv[1:] if argv is None else argv)
    if not args:
        try:
            app(args=["--help"], prog_name="maiscc", standalone_mode=True)
        except SystemExit:
            pass
        return 2
    try:
        app(args=args, prog_name="maiscc", standalone_mode=True)
    except SystemExit as exc:
        return _exit_code(exc)
    except MaisccError as exc:
        err_console.print(f"[bold red]error:[/] {exc}")
        return 1
    return 0


def run_cli() -> None:
    """Entry-point registered in pyproject.toml."""
    sys.exit(main())


if __name__ == "__main__":
    run_cli()
