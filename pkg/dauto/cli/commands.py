"""CLI commands for dauto."""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Any

import typer
from loguru import logger
from rich.console import Console
from rich.table import Table

from dauto import __logo__, __version__

app = typer.Typer(
    name="dauto",
    help=f"{__logo__} dauto - domain adaptation with adversarial autoencoders",
    no_args_is_help=True,
)

console = Console()


def version_callback(value: bool):
    if value:
        console.print(f"{__logo__} dauto v{__version__}")
        raise typer.Exit()


@app.callback()
def main(
    version: bool = typer.Option(
        None, "--version", "-v", callback=version_callback, is_eager=True
    ),
):
    """dauto - domain adaptation with adversarial autoencoders."""
    pass


# ============================================================================
# Shared options
# ============================================================================

ConfigOpt = typer.Option(None, "--config", "-c", help="key=value config file")
TaskOpt = typer.Option(None, "--task", help="Task name (output sub-directory)")
ModeOpt = typer.Option(None, "--mode", help="Methods, e.g. no_adapt,dann,ae_only,dauto")
LambdaOpt = typer.Option(None, "--lambda-grid", help="Comma-separated λ values")
MuOpt = typer.Option(None, "--mu-grid", help="Comma-separated μ values")
FractionsOpt = typer.Option(None, "--fractions", help="Comma-separated label fractions")
SeedOpt = typer.Option(None, "--seed", help="Experiment seed")
JobsOpt = typer.Option(None, "--jobs", help="Concurrent grid cells")
OutdirOpt = typer.Option(None, "--outdir", help="Output directory (env DAUTO_OUTDIR)")
SourceOpt = typer.Option(None, "--source", help="Source domain selector")
TargetOpt = typer.Option(None, "--target", help="Target domain selector")
VerboseOpt = typer.Option(False, "--verbose", help="Debug logging")


def _setup_logging(verbose: bool) -> None:
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else "INFO")


def _resolve(config: Path | None, overrides: dict[str, Any], command: str):
    from dauto.config import ConfigValidationError, resolve_config

    try:
        return resolve_config(config, overrides, command)
    except FileNotFoundError as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(1)
    except ConfigValidationError as e:
        console.print("[red]Invalid configuration:[/red]")
        for problem in e.problems:
            console.print(f"  [red]✗[/red] {problem}")
        raise typer.Exit(1)


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.4f}"


def _finish(report) -> None:
    """Print failures and exit nonzero when any run or grid cell failed."""
    console.print(f"\n[dim]{len(report.files)} files written under the output directory[/dim]")
    if report.ok:
        console.print("[green]✓[/green] All runs completed")
        return
    console.print(f"[red]✗ {len(report.failures)} failure(s):[/red]")
    for failure in report.failures:
        console.print(f"  [red]-[/red] {failure}")
    raise typer.Exit(1)


# ============================================================================
# Experiments
# ============================================================================


@app.command()
def run(
    config: Path = ConfigOpt,
    task: str = TaskOpt,
    mode: str = ModeOpt,
    lambda_grid: str = LambdaOpt,
    mu_grid: str = MuOpt,
    seed: int = SeedOpt,
    jobs: int = JobsOpt,
    outdir: Path = OutdirOpt,
    source: str = SourceOpt,
    target: str = TargetOpt,
    verbose: bool = VerboseOpt,
):
    """Train every requested method on one domain pair."""
    from dauto.experiment import run_experiment

    _setup_logging(verbose)
    cfg = _resolve(config, {
        "task": task, "modes": mode, "lambda_grid": lambda_grid, "mu_grid": mu_grid,
        "seed": seed, "jobs": jobs, "outdir": outdir, "source": source, "target": target,
    }, "run")
    report = run_experiment(cfg)

    table = Table(title=f"{__logo__} {report.task}")
    table.add_column("Method", style="cyan")
    table.add_column("λ")
    table.add_column("μ")
    table.add_column("Dev acc")
    table.add_column("Test acc", style="green")
    table.add_column("𝒜-dist")
    for m in report.methods:
        table.add_row(
            m.method,
            "-" if m.lam is None else f"{m.lam:g}",
            "-" if m.mu is None else f"{m.mu:g}",
            _fmt(m.dev_accuracy),
            _fmt(m.test_accuracy),
            _fmt(m.a_distance),
        )
    console.print(table)
    console.print(f"Input-space 𝒜-distance: {_fmt(report.a_distance_input)}")
    _finish(report)


@app.command()
def sweep(
    config: Path = ConfigOpt,
    task: str = TaskOpt,
    mode: str = ModeOpt,
    lambda_grid: str = LambdaOpt,
    mu_grid: str = MuOpt,
    fractions: str = FractionsOpt,
    seed: int = SeedOpt,
    jobs: int = JobsOpt,
    outdir: Path = OutdirOpt,
    source: str = SourceOpt,
    target: str = TargetOpt,
    verbose: bool = VerboseOpt,
):
    """Repeat the experiment on growing fractions of the labeled source."""
    from dauto.experiment import run_fraction_sweep

    _setup_logging(verbose)
    cfg = _resolve(config, {
        "task": task, "modes": mode, "lambda_grid": lambda_grid, "mu_grid": mu_grid,
        "fractions": fractions, "seed": seed, "jobs": jobs, "outdir": outdir,
        "source": source, "target": target,
    }, "sweep")
    report = run_fraction_sweep(cfg)

    table = Table(title=f"{__logo__} {report.task} label-fraction sweep")
    table.add_column("Method", style="cyan")
    table.add_column("Fraction")
    table.add_column("Test acc", style="green")
    for method, fraction, acc in report.rows:
        table.add_row(method, f"{fraction:g}", _fmt(acc))
    console.print(table)
    _finish(report)


@app.command()
def matrix(
    config: Path = ConfigOpt,
    task: str = TaskOpt,
    mode: str = ModeOpt,
    lambda_grid: str = LambdaOpt,
    mu_grid: str = MuOpt,
    seed: int = SeedOpt,
    jobs: int = JobsOpt,
    outdir: Path = OutdirOpt,
    verbose: bool = VerboseOpt,
):
    """Train all source x target pairs and tabulate per-method matrices."""
    from dauto.experiment import run_digit_matrix

    _setup_logging(verbose)
    cfg = _resolve(config, {
        "task": task, "modes": mode, "lambda_grid": lambda_grid, "mu_grid": mu_grid,
        "seed": seed, "jobs": jobs, "outdir": outdir,
    }, "matrix")
    report = run_digit_matrix(cfg)

    table = Table(title=f"{__logo__} {report.task} transfer matrix")
    table.add_column("Method", style="cyan")
    table.add_column("Source → Target")
    table.add_column("Test acc", style="green")
    for method, source, target, acc in report.rows:
        table.add_row(method, f"{source} → {target}", _fmt(acc))
    console.print(table)
    _finish(report)


# ============================================================================
# Checks
# ============================================================================


@app.command()
def validate(
    config: Path = ConfigOpt,
    command: str = typer.Option("run", "--for", help="Validate for run, sweep or matrix"),
):
    """Validate a dauto configuration without training anything."""
    from rich.panel import Panel

    from dauto.config import ConfigValidationError, load_config, validate_experiment

    console.print(Panel.fit(
        f"[bold cyan]{__logo__} dauto Configuration Validator[/bold cyan]",
        border_style="cyan"
    ))
    console.print()

    checks_passed = 0
    checks_failed = 0

    def pass_check(msg: str):
        nonlocal checks_passed
        checks_passed += 1
        console.print(f"[green]✓[/green] {msg}")

    def fail_check(msg: str):
        nonlocal checks_failed
        checks_failed += 1
        console.print(f"[red]✗[/red] {msg}")

    console.print("[bold]Configuration[/bold]")
    try:
        cfg = load_config(config)
        pass_check(f"Schema validation passed ({config or 'defaults + environment'})")
    except FileNotFoundError as e:
        fail_check(str(e))
        raise typer.Exit(1)
    except ConfigValidationError as e:
        for problem in e.problems:
            fail_check(problem)
        raise typer.Exit(1)

    console.print(f"\n[bold]Experiment ({command})[/bold]")
    problems = validate_experiment(cfg, command)
    for problem in problems:
        fail_check(problem)
    if not problems:
        pass_check(f"dataset={cfg.dataset} modes={','.join(cfg.modes)} outdir={cfg.outdir}")

    console.print(f"\n{checks_passed} passed, {checks_failed} failed")
    if checks_failed:
        raise typer.Exit(1)


@app.command()
def bound(
    config: Path = ConfigOpt,
    bandwidth: float = typer.Option(1.0, "--bandwidth", "-w", help="KDE bandwidth w"),
    checkpoint: Path = typer.Option(None, "--checkpoint", help="Use g(f(x)) of a trained model"),
    limit: int = typer.Option(200, "--limit", help="Number of references checked"),
    verbose: bool = VerboseOpt,
):
    """Check the reconstruction bound of the KDE over the unlabeled pool."""
    import numpy as np

    from dauto.experiment import build_dataset
    from dauto.kde import BoundViolationError, TransformedKde, bound_reports, identity_transform

    _setup_logging(verbose)
    if bandwidth <= 0:
        console.print(f"[red]Error: bandwidth must be > 0, got {bandwidth}[/red]")
        raise typer.Exit(1)
    cfg = _resolve(config, {}, "run")
    pool, _ = build_dataset(cfg).unlabeled_pool()

    transform = identity_transform
    if checkpoint is not None:
        from dauto.model import load_checkpoint

        transform = load_checkpoint(checkpoint).reconstruct

    table = Table(title=f"{__logo__} Reconstruction bound (w={bandwidth:g}, n={pool.shape[0]})")
    table.add_column("Kernel", style="cyan")
    table.add_column("Checked")
    table.add_column("c = log(nw)")
    table.add_column("Min gap")
    table.add_column("Mean gap")
    table.add_column("Max gap")
    failed = False
    for kernel in ("gaussian", "laplacian"):
        est = TransformedKde(kernel, bandwidth, pool, transform)
        try:
            reports = bound_reports(est, range(min(limit, est.n)))
        except BoundViolationError as e:
            console.print(f"[red]✗ {kernel}: {e}[/red]")
            failed = True
            continue
        gaps = np.array([r.gap for r in reports])
        table.add_row(kernel, str(len(reports)), f"{est.log_norm:.6g}",
                      f"{gaps.min():.6g}", f"{gaps.mean():.6g}", f"{gaps.max():.6g}")
    console.print(table)
    if failed:
        raise typer.Exit(1)
    console.print("[green]✓[/green] Bound holds for every checked reference")


if __name__ == "__main__":
    app()
