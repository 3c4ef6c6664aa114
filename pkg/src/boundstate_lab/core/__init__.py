"""Core numerics for bound-state counting and the experiment runner."""

from boundstate_lab.core.experiment_config import (
    ExperimentConfig,
    apply_overrides,
    config_from_dict,
    load_config,
    parse_grid_override,
)
from boundstate_lab.core.report_storage import (
    load_curve,
    load_summary,
    save_curve,
    save_reports_csv,
    save_summary,
)
from boundstate_lab.core.runner import run_config

__all__ = [
    "ExperimentConfig",
    "apply_overrides",
    "config_from_dict",
    "load_config",
    "parse_grid_override",
    "run_config",
    "save_summary",
    "load_summary",
    "save_reports_csv",
    "save_curve",
    "load_curve",
]
