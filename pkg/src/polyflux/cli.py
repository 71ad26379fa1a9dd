"""
Command-line interface for polyflux.
"""

import argparse
import logging
import sys
from pathlib import Path

from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table

from polyflux.config import ConfigManager, create_default_config_file
from polyflux.core.config import SimConfig
from polyflux.core.errors import ConfigurationError
from polyflux.output import write_outputs
from polyflux.simulation import (
    Simulation,
    SimulationResult,
    count_local_maxima,
    ode_monomer_check,
    sweep,
    sweep_cases,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser for the CLI."""
    parser = argparse.ArgumentParser(prog="polyflux", description="Polymerization-coagulation-fragmentation solver")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_common(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--config", type=Path, help="Path to a polyflux config file")
        sub.add_argument("--out", type=Path, help="Output directory (default: $POLYFLUX_OUT or ./results)")
        sub.add_argument(
            "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
            help="Override one config key (repeatable)",
        )
        sub.add_argument("--quiet", action="store_true", help="Only print warnings and errors")

    # Single run
    run_parser = subparsers.add_parser("run", help="Run one simulation")
    add_common(run_parser)

    # Parameter sweep
    sweep_parser = subparsers.add_parser("sweep", help="Run an eta x splitting comparison")
    add_common(sweep_parser)
    sweep_parser.add_argument("--eta", type=float, nargs="+", default=[2.0, 5.0, 8.0], help="eta values")
    sweep_parser.add_argument(
        "--lambda", dest="lambdas", type=float, nargs="*", default=[0.2], help="lambda values"
    )
    sweep_parser.add_argument("--lax-friedrichs", action="store_true", help="Also run the Lax-Friedrichs splitting")
    sweep_parser.add_argument("--workers", type=int, default=1, help="Worker processes")

    # Default config file
    init_parser = subparsers.add_parser("init-config", help="Write a config file with every key at its default")
    init_parser.add_argument("path", type=Path, nargs="?", help="Target file or directory (default: ./polyflux.cfg)")

    return parser


def setup_logging(level: str, quiet: bool = False) -> None:
    """Route log records through rich on stderr."""
    logging.basicConfig(
        level=logging.WARNING if quiet else level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def summary_table(result: SimulationResult, title: str = "Run summary") -> Table:
    """Final observables of one run."""
    final = result.final
    table = Table("Quantity", "Value", title=title)
    status = result.termination.status
    if status == "diverged":
        status = f"diverged at t={result.termination.time:.6g} h ({result.termination.reason})"
    table.add_row("status", escape(status))
    table.add_row("steps", str(result.diagnostics.steps))
    table.add_row("t (h)", f"{final.t:.6g}")
    table.add_row("V (μM)", f"{final.V:.8g}")
    table.add_row("polymer mass (μM)", f"{final.polymer_mass:.8g}")
    table.add_row("min u / max u", f"{final.min_u:.4g} / {final.max_u:.4g}")
    table.add_row("oscillation", f"{final.oscillation:.4g}")
    table.add_row("local maxima", str(count_local_maxima(result.snapshots[-1].density)) if result.snapshots else "-")
    table.add_row("|V_ode - V|/V0", f"{ode_monomer_check(result):.3e}")
    table.add_row("steps with V < 0", str(result.diagnostics.negative_monomer_steps))
    table.add_row("wall time (s)", f"{result.diagnostics.wall_seconds:.2f}")
    return table


def _run(args: argparse.Namespace, config: SimConfig, out_dir: Path, console: Console) -> int:
    simulation = Simulation(config)

    if args.quiet:
        result = simulation.run()
    else:
        with Progress(
            TextColumn("[bold green]t = {task.completed:.3f} h"),
            BarColumn(),
            TimeElapsedColumn(),
            console=console,
            transient=True,
        ) as progress:
            task = progress.add_task("run", total=config.output.t_end)
            result = simulation.run(lambda t: progress.update(task, completed=t))

    write_outputs(result, out_dir)
    if not args.quiet:
        console.print(summary_table(result))
        console.print(f"[bold green]✓ Outputs written to {escape(str(out_dir))}[/bold green]")
    if not result.completed:
        console.print(
            f"[bold red]Diverged:[/bold red] {escape(str(result.termination.reason))} "
            f"at t={result.termination.time:.6g} h"
        )
        return EXIT_DIVERGED
    return EXIT_OK


def _sweep(args: argparse.Namespace, base: SimConfig, out_dir: Path, console: Console) -> int:
    cases = sweep_cases(args.eta, args.lambdas, args.lax_friedrichs)
    if not cases:
        raise ConfigurationError("sweep needs at least one lambda value or --lax-friedrichs")

    if not args.quiet:
        console.print(f"[bold green]Running {len(cases)} cases with {args.workers} worker(s)...[/bold green]")
    results = sweep(base, cases, workers=args.workers)

    table = Table("case", "status", "steps", "V(t_end)", "max u", "oscillation", "maxima", title="Sweep summary")
    diverged = False
    for case, result in results:
        write_outputs(result, out_dir / case.label)
        final = result.final
        status = result.termination.status
        if not result.completed:
            diverged = True
            status = f"[red]diverged at t={result.termination.time:.4g}[/red]"
        maxima = count_local_maxima(result.snapshots[-1].density) if result.snapshots else 0
        table.add_row(
            case.label, status, str(result.diagnostics.steps), f"{final.V:.6g}",
            f"{final.max_u:.4g}", f"{final.oscillation:.4g}", str(maxima),
        )
    console.print(table)
    return EXIT_DIVERGED if diverged else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    """
    Main entry point for the CLI.

    Returns:
        0 on a completed run, 2 on a configuration error, 3 on divergence,
        1 when outputs cannot be written
    """
    parser = create_parser()
    args = parser.parse_args(argv)
    console = Console()
    manager = ConfigManager()
    setup_logging(manager.get_log_level(), getattr(args, "quiet", False))

    if args.command == "init-config":
        target = args.path or manager.project_root
        if create_default_config_file(target):
            console.print(f"[bold green]✓ Created default config at {escape(str(target))}[/bold green]")
            return EXIT_OK
        console.print(f"[bold red]Error:[/bold red] config file already exists at {escape(str(target))}")
        return EXIT_CONFIG

    try:
        config = manager.load(args.config, args.overrides)
    except (ConfigurationError, FileNotFoundError) as e:
        console.print(f"[bold red]Error:[/bold red] {escape(str(e))}")
        return EXIT_CONFIG
    out_dir = args.out or manager.get_output_dir()

    try:
        if args.command == "run":
            return _run(args, config, out_dir, console)
        return _sweep(args, config, out_dir, console)
    except ConfigurationError as e:
        console.print(f"[bold red]Error:[/bold red] {escape(str(e))}")
        return EXIT_CONFIG
    except OSError as e:
        console.print(f"[bold red]Error:[/bold red] {escape(str(e))}")
        return EXIT_IO


def run_cli() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run_cli()
