"""Shared summary panel rendering for run displays."""

from rich import box
from rich.panel import Panel

from boundstate_lab.types import RunSummary


def render_run_summary_panel(summary: RunSummary, exit_status: int) -> Panel:
    """
    Render a run summary panel.

    Args:
        summary: Run summary as written to summary.json
        exit_status: Exit status the CLI will return

    Returns:
        Rich Panel object ready for display
    """
    config = summary.get("config", {})
    grid = config.get("grid", {}) if isinstance(config, dict) else {}
    violations = summary.get("violations", [])

    summary_parts = [
        f"[bold cyan]Mode:[/bold cyan] {summary.get('mode', '?')}",
        f"[bold cyan]Parameters:[/bold cyan] d={config.get('d')} s={config.get('s')} "
        f"grid={grid}",
        f"[bold cyan]Seed:[/bold cyan] {summary.get('seed', 0)}",
        f"[bold cyan]Cases:[/bold cyan] {len(summary.get('cases', []))}  "
        f"[bold cyan]Reports:[/bold cyan] {len(summary.get('reports', []))}",
    ]

    checks = summary.get("checks", {})
    for key in sorted(checks):
        summary_parts.append(f"[dim]{key}: {checks[key]}[/dim]")

    status_color = "green" if exit_status == 0 else "red"
    summary_parts.append(
        f"[bold {status_color}]Violations:[/bold {status_color}] {len(violations)}  "
        f"[bold {status_color}]Exit:[/bold {status_color}] {exit_status}"
    )

    return Panel(
        "\n".join(summary_parts),
        title="Run Summary",
        border_style=status_color,
        box=box.ROUNDED,
    )
