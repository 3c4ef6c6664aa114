import json

import numpy as np
import pytest

from boundstate_lab.constants import CURVES_DIR, REPORTS_FILE, SCHEMA_VERSION, SUMMARY_FILE
from boundstate_lab.core.report_storage import (
    REPORT_COLUMNS,
    load_curve,
    load_summary,
    reports_frame,
    save_curve,
    save_reports_csv,
    save_summary,
)
from boundstate_lab.exceptions import InvalidParameterError, ReportCorruptError


def sample_report(**overrides):
    report = {
        "schema_version": SCHEMA_VERSION,
        "theorem_id": "T1.6",
        "params": {
            "d": 1,
            "s": 1.0,
            "eps": None,
            "potential": "gauss",
            "coupling": 1.0,
            "L": 20.0,
            "N": 128,
            "weight": None,
        },
        "lhs": 0.123456789012345678,
        "subspace_dim": 0,
        "subspace_dim_binom": 0,
        "rhs": 1.7724538509055159,
        "rhs_alternative": None,
        "ratio": 0.0696,
        "flags": ["truncated", "plateau-not-reached"],
    }
    report.update(overrides)
    return report


class TestSummary:
    def test_round_trip(self, tmp_path):
        summary = {"mode": "count", "cases": [{"count": np.int64(3), "lowest": np.float64(-5.5)}]}
        path = save_summary(summary, tmp_path)
        assert path == tmp_path / SUMMARY_FILE
        loaded = load_summary(tmp_path)
        assert loaded["schema_version"] == SCHEMA_VERSION
        assert loaded["cases"] == [{"count": 3, "lowest": -5.5}]
        assert load_summary(path) == loaded

    def test_deterministic_bytes(self, tmp_path):
        summary = {"b": [1.0, 2.0], "a": {"z": 1, "y": np.arange(3)}}
        first = save_summary(summary, tmp_path / "one").read_bytes()
        second = save_summary(dict(reversed(summary.items())), tmp_path / "two").read_bytes()
        assert first == second

    def test_missing(self, tmp_path):
        with pytest.raises(ReportCorruptError):
            load_summary(tmp_path)

    def test_corrupt(self, tmp_path):
        (tmp_path / SUMMARY_FILE).write_text("{not json")
        with pytest.raises(ReportCorruptError):
            load_summary(tmp_path)

    def test_missing_version(self, tmp_path):
        (tmp_path / SUMMARY_FILE).write_text(json.dumps({"mode": "count"}))
        with pytest.raises(ReportCorruptError, match="Missing key"):
            load_summary(tmp_path)

    def test_version_mismatch(self, tmp_path):
        (tmp_path / SUMMARY_FILE).write_text(json.dumps({"schema_version": SCHEMA_VERSION + 1}))
        with pytest.raises(ReportCorruptError, match="schema version"):
            load_summary(tmp_path)

    def test_not_an_object(self, tmp_path):
        (tmp_path / SUMMARY_FILE).write_text("[1, 2]")
        with pytest.raises(ReportCorruptError):
            load_summary(tmp_path)


class TestReports:
    def test_frame_columns(self):
        frame = reports_frame([sample_report(), sample_report(theorem_id="Bargmann")])
        assert list(frame.columns) == REPORT_COLUMNS
        assert list(frame["theorem_id"]) == ["T1.6", "Bargmann"]
        assert frame["flags"].iloc[0] == "truncated;plateau-not-reached"

    def test_empty_frame(self):
        assert list(reports_frame([]).columns) == REPORT_COLUMNS

    def test_csv_keeps_precision(self, tmp_path):
        path = save_reports_csv([sample_report()], tmp_path)
        assert path == tmp_path / REPORTS_FILE
        header, row = path.read_text().splitlines()
        assert header.split(",") == REPORT_COLUMNS
        assert "1.7724538509055159" in row


class TestCurves:
    def test_round_trip(self, tmp_path):
        x = [-1.0, -0.5, -0.25]
        y = [0.0, 1.0, 3.0]
        path = save_curve("sweep_00_count", x, y, tmp_path)
        assert path == tmp_path / CURVES_DIR / "sweep_00_count.tsv"
        loaded_x, loaded_y = load_curve(path)
        assert np.array_equal(loaded_x, x)
        assert np.array_equal(loaded_y, y)

    def test_single_point(self, tmp_path):
        loaded_x, loaded_y = load_curve(save_curve("one", [0.1], [0.2], tmp_path))
        assert loaded_x.tolist() == [0.1]
        assert loaded_y.tolist() == [0.2]

    def test_shape_mismatch(self, tmp_path):
        with pytest.raises(InvalidParameterError):
            save_curve("bad", [1.0, 2.0], [1.0], tmp_path)

    def test_wrong_column_count(self, tmp_path):
        path = tmp_path / "three.tsv"
        path.write_text("1\t2\t3\n")
        with pytest.raises(ReportCorruptError):
            load_curve(path)

    def test_unreadable(self, tmp_path):
        with pytest.raises(ReportCorruptError):
            load_curve(tmp_path / "absent.tsv")
