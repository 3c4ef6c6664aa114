"""Report storage module. Handles writing and reading run artifacts."""

import json
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from boundstate_lab.constants import CURVES_DIR, REPORTS_FILE, SCHEMA_VERSION, SUMMARY_FILE
from boundstate_lab.exceptions import InvalidParameterError, ReportCorruptError
from boundstate_lab.types import BoundReport, RunSummary
from boundstate_lab.utils import get_logger

logger = get_logger("core.report_storage")

REPORT_COLUMNS = [
    "theorem_id",
    "d",
    "s",
    "eps",
    "potential",
    "coupling",
    "L",
    "N",
    "weight",
    "lhs",
    "subspace_dim",
    "subspace_dim_binom",
    "rhs",
    "rhs_alternative",
    "ratio",
    "flags",
]


def ensure_out_dir(out_dir: str | Path) -> Path:
    """Create the output directory (and its curves folder) if missing."""
    path = Path(out_dir)
    (path / CURVES_DIR).mkdir(parents=True, exist_ok=True)
    return path


def _to_builtin(value: Any) -> Any:
    """Convert numpy scalars and arrays to JSON-serializable builtins."""
    if isinstance(value, Mapping):
        return {str(k): _to_builtin(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [_to_builtin(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    return value


def save_summary(summary: RunSummary, out_dir: str | Path) -> Path:
    """
    Write summary.json with sorted keys and no timestamps.

    Args:
        summary: Run summary; schema_version is filled in when missing
        out_dir: Output directory

    Returns:
        Path to the saved file
    """
    path = ensure_out_dir(out_dir) / SUMMARY_FILE
    content = _to_builtin({"schema_version": SCHEMA_VERSION, **summary})

    if path.exists():
        logger.info(f"Summary at {path} already exists, overwriting")

    with open(path, "w") as f:
        json.dump(content, f, indent=2, sort_keys=True)
        f.write("\n")

    logger.info(f"Saved summary to {path}")
    return path


def load_summary(out_dir: str | Path) -> RunSummary:
    """
    Load summary.json from a directory (or the file itself).

    Raises:
        ReportCorruptError: If the file is missing, unreadable or lacks a schema version
    """
    path = Path(out_dir)
    if path.is_dir():
        path = path / SUMMARY_FILE

    try:
        with open(path) as f:
            data = json.load(f)
    except OSError as e:
        raise ReportCorruptError(str(path), str(e)) from e
    except json.JSONDecodeError as e:
        raise ReportCorruptError(str(path), str(e)) from e

    if not isinstance(data, dict):
        raise ReportCorruptError(str(path), "top level is not an object")
    try:
        version = data["schema_version"]
    except KeyError as e:
        raise ReportCorruptError(str(path), f"Missing key: {e}") from e
    if version != SCHEMA_VERSION:
        raise ReportCorruptError(str(path), f"schema version {version} != {SCHEMA_VERSION}")

    logger.info(f"Loaded summary from {path}")
    summary: RunSummary = data  # type: ignore[assignment]
    return summary


def reports_frame(reports: Sequence[BoundReport]) -> pd.DataFrame:
    """Flatten BoundReports into one row each, params spread into columns."""
    rows = []
    for report in reports:
        params = report["params"]
        rows.append(
            {
                "theorem_id": report["theorem_id"],
                "d": params.get("d"),
                "s": params.get("s"),
                "eps": params.get("eps"),
                "potential": params.get("potential"),
                "coupling": params.get("coupling"),
                "L": params.get("L"),
                "N": params.get("N"),
                "weight": params.get("weight"),
                "lhs": report["lhs"],
                "subspace_dim": report["subspace_dim"],
                "subspace_dim_binom": report["subspace_dim_binom"],
                "rhs": report["rhs"],
                "rhs_alternative": report["rhs_alternative"],
                "ratio": report["ratio"],
                "flags": ";".join(report["flags"]),
            }
        )
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def save_reports_csv(reports: Sequence[BoundReport], out_dir: str | Path) -> Path:
    """Write reports.csv with full float precision."""
    path = ensure_out_dir(out_dir) / REPORTS_FILE
    reports_frame(reports).to_csv(path, index=False, float_format="%.17g")
    logger.info(f"Saved {len(reports)} reports to {path}")
    return path


def save_curve(name: str, x: Sequence[float], y: Sequence[float], out_dir: str | Path) -> Path:
    """Write curves/<name>.tsv, two numeric columns."""
    x_arr = np.asarray(x, dtype=float)
    y_arr = np.asarray(y, dtype=float)
    if x_arr.shape != y_arr.shape:
        raise InvalidParameterError(
            f"Curve {name}", f"x {x_arr.shape}, y {y_arr.shape}", "two arrays of one shape"
        )
    path = ensure_out_dir(out_dir) / CURVES_DIR / f"{name}.tsv"
    np.savetxt(path, np.column_stack([x_arr, y_arr]), fmt="%.17g", delimiter="\t")
    logger.debug(f"Saved curve {name} ({x_arr.size} points) to {path}")
    return path


def load_curve(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column TSV curve back."""
    try:
        data = np.loadtxt(path, delimiter="\t", ndmin=2)
    except (OSError, ValueError) as e:
        raise ReportCorruptError(str(path), str(e)) from e
    if data.shape[1] != 2:
        raise ReportCorruptError(str(path), f"expected 2 columns, got {data.shape[1]}")
    return data[:, 0], data[:, 1]
