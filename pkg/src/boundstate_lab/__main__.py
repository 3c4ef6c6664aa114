#!/usr/bin/env python3
"""Bound-State Laboratory - Main Entry Point."""

import argparse
import sys

from rich.console import Console

from boundstate_lab.constants import RUN_MODES
from boundstate_lab.core import apply_overrides, load_config, parse_grid_override, run_config
from boundstate_lab.exceptions import BoundStateLabError, ConfigError, ConfigFileNotFoundError
from boundstate_lab.ui import display_summary
from boundstate_lab.utils import setup_logging

console = Console()

EXIT_CONFIG_ERROR = 2
EXIT_FAILURE = 1


def _handle_config_error(error: ConfigError) -> None:
    """Display helpful message for config errors."""
    console.print(f"[red]Error: {error}[/red]")

    if isinstance(error, ConfigFileNotFoundError):
        console.print("\n[yellow]Create a TOML config with this format:[/yellow]")
        console.print('mode = "count"')
        console.print("d = 1")
        console.print("s = 1.0")
        console.print("[grid]")
        console.print("L = 40")
        console.print("N = 512")
        console.print("[[potentials]]")
        console.print('kind = "well"')
        console.print("V0 = 10.0")
        console.print("a = 1.0")
        console.print("\n[dim]JSON with the same keys is accepted too[/dim]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boundstate-lab",
        description="Count bound states of fractional Schrödinger operators and verify bounds.",
    )
    parser.add_argument("mode", choices=RUN_MODES, help="Experiment to run")
    parser.add_argument("--config", required=True, help="Path to a TOML or JSON config")
    parser.add_argument("--out", help="Output directory (default: config 'out' or ./out)")
    parser.add_argument("--seed", type=int, help="Seed for randomized property suites")
    parser.add_argument(
        "--grid",
        nargs="+",
        metavar="KEY=VALUE",
        help="Grid overrides, e.g. --grid N=256 L=20",
    )
    parser.add_argument(
        "--verbose",
        action="store_true",
        help="Enable verbose logging",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    """Main function to run one experiment."""
    args = build_parser().parse_args(argv)

    setup_logging(verbose=args.verbose)

    try:
        config = load_config(args.config)
        config = apply_overrides(
            config,
            mode=args.mode,
            seed=args.seed,
            out_dir=args.out,
            grid=parse_grid_override(args.grid) if args.grid else None,
        )
    except ConfigError as e:
        _handle_config_error(e)
        return EXIT_CONFIG_ERROR

    try:
        with console.status(f"[cyan]Running {config.mode}...[/cyan]") as status:
            summary, exit_status = run_config(
                config,
                on_case_start=lambda label: status.update(f"[cyan]{config.mode}: {label}[/cyan]"),
            )
    except ConfigError as e:
        _handle_config_error(e)
        return EXIT_CONFIG_ERROR
    except BoundStateLabError as e:
        console.print(f"[red]Error: {e}[/red]")
        return EXIT_FAILURE

    display_summary(summary, exit_status)
    console.print(f"\n[dim]Artifacts written to {config.out_dir}[/dim]")
    console.print()
    return exit_status


if __name__ == "__main__":
    sys.exit(main())
