"""UI module for display functionality."""

from boundstate_lab.ui.display import (
    display_cases,
    display_constants,
    display_counts,
    display_header,
    display_reports,
    display_summary,
    display_violations,
)
from boundstate_lab.ui.summary_panel import render_run_summary_panel

__all__ = [
    "display_cases",
    "display_constants",
    "display_counts",
    "display_header",
    "display_reports",
    "display_summary",
    "display_violations",
    "render_run_summary_panel",
]
