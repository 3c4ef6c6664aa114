"""Display module. Handles all rich console formatting and output."""

import math
from collections.abc import Sequence

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from boundstate_lab.types import BoundReport, FitResult, RunSummary
from boundstate_lab.ui.summary_panel import render_run_summary_panel

console = Console()


def display_header(mode: str) -> None:
    """Display application header."""
    console.print()
    console.print(
        Panel.fit(f"[bold cyan]Bound-State Laboratory · {mode}[/bold cyan]", border_style="cyan")
    )


def _format_float(value: object, digits: int = 6) -> str:
    if value is None:
        return "N/A"
    if isinstance(value, float):
        if math.isinf(value):
            return "∞"
        return f"{value:.{digits}g}"
    return str(value)


def display_counts(cases: Sequence[dict[str, object]]) -> None:
    """Display the per-potential counts of a count run."""
    table = Table(title="Negative Eigenvalue Counts", box=box.ROUNDED, title_style="bold magenta")

    table.add_column("Potential", style="cyan", justify="left")
    table.add_column("Count", style="green", justify="right")
    table.add_column("Oracle", justify="right")
    table.add_column("Lowest", justify="right")
    table.add_column("Near 0", style="yellow", justify="right")

    for case in cases:
        count = case.get("count")
        oracle = case.get("oracle")
        oracle_str = "—" if oracle is None else str(oracle)
        if oracle is not None and oracle != count:
            oracle_str = f"[red]{oracle_str}[/red]"
        near = case.get("near_threshold") or []
        table.add_row(
            str(case.get("potential")),
            str(count),
            oracle_str,
            _format_float(case.get("lowest")),
            str(len(near)) if isinstance(near, list) else "0",
        )

    console.print()
    console.print(table)


def display_reports(reports: Sequence[BoundReport]) -> None:
    """Display BoundReports, one row per inequality instance."""
    if not reports:
        console.print("\n[yellow]No bound reports in this run.[/yellow]")
        return

    table = Table(title="Bound Reports", box=box.ROUNDED, title_style="bold magenta")

    table.add_column("Theorem", style="cyan", justify="left")
    table.add_column("Potential", justify="left")
    table.add_column("LHS", justify="right")
    table.add_column("dim", justify="right")
    table.add_column("RHS", style="green", justify="right")
    table.add_column("Ratio", style="yellow", justify="right")
    table.add_column("Flags", style="dim", justify="left")

    for report in reports:
        flags = report["flags"]
        flag_str = ", ".join(flags)
        if "violated" in flags:
            flag_str = f"[red]{flag_str}[/red]"
        table.add_row(
            report["theorem_id"],
            str(report["params"].get("potential")),
            _format_float(report["lhs"]),
            str(report["subspace_dim"]),
            _format_float(report["rhs"]),
            _format_float(report["ratio"], 4),
            flag_str,
        )

    console.print()
    console.print(table)


def display_constants(constants: Sequence[FitResult]) -> None:
    """Display fitted implied constants per (theorem, d, s)."""
    if not constants:
        return

    table = Table(title="Fitted Constants", box=box.ROUNDED, title_style="bold magenta")

    table.add_column("Theorem", style="cyan", justify="left")
    table.add_column("d", justify="right")
    table.add_column("s", justify="right")
    table.add_column("C_emp", style="green bold", justify="right")
    table.add_column("Reports", justify="right")

    for fit in constants:
        table.add_row(
            fit["theorem_id"],
            str(fit["d"]),
            f"{fit['s']:g}",
            _format_float(fit["c_emp"], 4),
            str(fit["n_reports"]),
        )

    console.print()
    console.print(table)


def display_cases(cases: Sequence[dict[str, object]], title: str) -> None:
    """Display a generic case listing: label plus scalar fields."""
    if not cases:
        return

    table = Table(title=title, box=box.ROUNDED, title_style="bold magenta")
    table.add_column("Case", style="cyan", justify="left")
    table.add_column("Values", justify="left")

    for case in cases:
        label = str(case.get("potential", case.get("suite", "")))
        scalars = [
            f"{key}={_format_float(value, 4)}"
            for key, value in case.items()
            if key not in ("potential", "suite") and isinstance(value, (int, float, str))
        ]
        table.add_row(label, "  ".join(scalars))

    console.print()
    console.print(table)


def display_violations(violations: Sequence[str]) -> None:
    """Display the list of violated checks."""
    if not violations:
        return
    lines = "\n".join(f"[red]•[/red] {line}" for line in violations)
    console.print()
    console.print(Panel(lines, title="Violations", border_style="red", box=box.ROUNDED))


def display_summary(summary: RunSummary, exit_status: int) -> None:
    """Display everything a run produced, followed by the summary panel."""
    mode = summary.get("mode", "")
    display_header(mode)

    cases = summary.get("cases", [])
    if mode == "count":
        display_counts(cases)
    elif mode == "selftest":
        display_cases(cases, "Self-Test Suites")
    else:
        display_cases(cases, "Cases")
    display_reports(summary.get("reports", []))
    display_constants(summary.get("constants", []))
    display_violations(summary.get("violations", []))

    console.print()
    console.print(render_run_summary_panel(summary, exit_status))
