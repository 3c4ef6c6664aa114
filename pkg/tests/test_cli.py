import pytest

from boundstate_lab.__main__ import EXIT_CONFIG_ERROR, EXIT_FAILURE, main
from boundstate_lab.constants import (
    CURVES_DIR,
    CWIKEL_P_PRIMES,
    GRID_STABILITY_TOL,
    REPORTS_FILE,
    SUMMARY_FILE,
)
from boundstate_lab.core import load_curve, load_summary, runner

WELL_CONFIG = """
d = 1
s = 1.0

[grid]
L = 40
N = 512

[[potentials]]
kind = "well"
V0 = 10.0
a = 1.0
"""

SMALL_BUMP_CONFIG = """
d = 1
s = 1.0
couplings = [1, 4]

[grid]
L = 5
N = 64

[sweep]
j_max = 12

[[potentials]]
kind = "bump"
V0 = 4.0
a = 1.0
"""

TWO_FAMILY_CONFIG = """
d = 1
s = 1.0
theorems = ["T1.1-nonint"]
radii = [1, 2]

[grid]
L = 20
N = 128

[[potentials]]
kind = "gaussian"
V0 = 0.1

[[potentials]]
kind = "well"
V0 = 10.0
a = 1.0
"""


@pytest.fixture
def config_file(tmp_path):
    def write(text, name="run.toml"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


class TestCount:
    def test_square_well(self, tmp_path, config_file):
        out = tmp_path / "out"
        status = main(["count", "--config", config_file(WELL_CONFIG), "--out", str(out)])
        assert status == 0
        summary = load_summary(out)
        assert summary["mode"] == "count"
        [case] = summary["cases"]
        assert case["count"] == 3
        assert case["oracle"] == 3
        assert summary["violations"] == []
        assert (out / REPORTS_FILE).exists()

    def test_reruns_are_byte_identical(self, tmp_path, config_file):
        path = config_file(WELL_CONFIG)
        for name in ("first", "second"):
            assert main(["count", "--config", path, "--out", str(tmp_path / name)]) == 0
        first = (tmp_path / "first" / SUMMARY_FILE).read_bytes()
        assert first == (tmp_path / "second" / SUMMARY_FILE).read_bytes()

    def test_grid_override(self, tmp_path, config_file):
        out = tmp_path / "out"
        argv = ["count", "--config", config_file(WELL_CONFIG), "--out", str(out)]
        assert main([*argv, "--grid", "N=256", "L=20"]) == 0
        summary = load_summary(out)
        assert summary["config"]["grid"] == {"L": 20.0, "N": 256}

    def test_mode_argument_wins(self, tmp_path, config_file):
        out = tmp_path / "out"
        text = 'mode = "verify"\n' + WELL_CONFIG
        assert main(["count", "--config", config_file(text), "--out", str(out)]) == 0
        assert load_summary(out)["mode"] == "count"


class TestConfigErrors:
    def test_missing_config(self, tmp_path):
        assert main(["count", "--config", str(tmp_path / "absent.toml")]) == EXIT_CONFIG_ERROR

    def test_malformed_config(self, config_file):
        assert main(["count", "--config", config_file("d = [\n")]) == EXIT_CONFIG_ERROR

    def test_invalid_values(self, config_file):
        text = WELL_CONFIG.replace("N = 512", "N = 511")
        assert main(["count", "--config", config_file(text)]) == EXIT_CONFIG_ERROR

    def test_bad_grid_override(self, config_file):
        argv = ["count", "--config", config_file(WELL_CONFIG), "--grid", "M=3"]
        assert main(argv) == EXIT_CONFIG_ERROR

    def test_unknown_mode(self, config_file):
        with pytest.raises(SystemExit):
            main(["bogus", "--config", config_file(WELL_CONFIG)])


class TestVerify:
    def test_reference_constant_violation(self, tmp_path, config_file):
        text = WELL_CONFIG.replace("V0 = 10.0", "V0 = 4.0").replace(
            "L = 40\nN = 512", "L = 20\nN = 128"
        )
        text = 'theorems = ["Bargmann"]\nradii = [1]\n' + text + "\n[constants]\nBargmann = 0.0\n"
        out = tmp_path / "out"
        assert main(["verify", "--config", config_file(text), "--out", str(out)]) == EXIT_FAILURE
        summary = load_summary(out)
        [report] = summary["reports"]
        assert report["theorem_id"] == "Bargmann"
        assert report["lhs"] == 2
        assert any("Bargmann" in v for v in summary["violations"])
        assert summary["constants"][0]["c_emp"] == pytest.approx(report["ratio"])

    def test_explicit_theorem_outside_regime(self, tmp_path, config_file):
        text = 'theorems = ["T1.2"]\n' + SMALL_BUMP_CONFIG
        argv = ["verify", "--config", config_file(text), "--out", str(tmp_path / "out")]
        assert main(argv) == EXIT_FAILURE

    def test_growing_scaling_family_below_half_dimension(self, tmp_path, config_file):
        text = (
            'd = 2\ns = 0.75\nradii = [1, 2]\n\n[grid]\nL = 4\nN = 16\n\n'
            '[[potentials]]\nkind = "gaussian"\nV0 = 5.0\n'
        )
        out = tmp_path / "out"
        assert main(["verify", "--config", config_file(text), "--out", str(out)]) == 0
        summary = load_summary(out)
        [case] = summary["cases"]
        assert case["scaling"]["rhs_expected"] == "nondecreasing"
        assert case["scaling"]["rhs_monotone"]
        assert summary["violations"] == []

    def test_held_out_family_and_refinement(self, tmp_path, config_file):
        out = tmp_path / "out"
        argv = ["verify", "--config", config_file(TWO_FAMILY_CONFIG), "--out", str(out)]
        assert main(argv) == EXIT_FAILURE
        summary = load_summary(out)
        [held] = summary["checks"]["held_out"]
        assert held["fit"]["c_emp"] == 0.0
        assert held["n_held_out"] == 1
        assert any(v.startswith("held-out T1.1-nonint") for v in summary["violations"])
        [stability] = summary["checks"]["stability"]
        assert stability["refinement"] == "N=128->256"
        assert stability["tolerance"] == GRID_STABILITY_TOL
        assert not any("scaling" in v for v in summary["violations"])


class TestOtherModes:
    def test_sweep_writes_curves(self, tmp_path, config_file):
        out = tmp_path / "out"
        assert main(["sweep", "--config", config_file(SMALL_BUMP_CONFIG), "--out", str(out)]) == 0
        summary = load_summary(out)
        [case] = summary["cases"]
        assert case["agreement"]["direct"] >= 1
        assert case["count_at_far_energy"] == 0
        assert "lower_bound" in case
        energies, counts = load_curve(out / CURVES_DIR / "sweep_00_count.tsv")
        assert energies.size == 13
        assert counts[-1] == case["sweep"]["plateau"]
        assert (out / CURVES_DIR / "coupling_00_count.tsv").exists()

    def test_quasinorm_writes_annuli(self, tmp_path, config_file):
        out = tmp_path / "out"
        status = main(["quasinorm", "--config", config_file(SMALL_BUMP_CONFIG), "--out", str(out)])
        assert status == 0
        [case] = load_summary(out)["cases"]
        assert case["energy"] == 0.0
        assert case["trace_low"]["value"] > 0
        radii, values = load_curve(out / CURVES_DIR / "annuli_00_value.tsv")
        assert radii.size == values.size > 0

    def test_cwikel_writes_curves(self, tmp_path, config_file):
        text = SMALL_BUMP_CONFIG.replace('kind = "bump"', 'kind = "gaussian"').replace(
            "L = 5", "L = 8"
        )
        out = tmp_path / "out"
        assert main(["cwikel", "--config", config_file(text), "--out", str(out)]) == 0
        summary = load_summary(out)
        assert summary["violations"] == []
        for p_prime in CWIKEL_P_PRIMES:
            mu, _ = load_curve(out / CURVES_DIR / f"cwikel_00_mu_{p_prime:g}.tsv")
            assert mu.size == 64
            assert (out / CURVES_DIR / f"cwikel_00_bound_{p_prime:g}.tsv").exists()
        assert summary["checks"]["held_out"] == {}

    def test_cwikel_constants_carry_to_held_out_family(self, tmp_path, config_file):
        text = SMALL_BUMP_CONFIG.replace('kind = "bump"', 'kind = "gaussian"').replace(
            "L = 5", "L = 8"
        )
        # the held-out entry is the first one at four times the depth
        text += '\n[[potentials]]\nkind = "gaussian"\nV0 = 16.0\na = 1.0\n'
        out = tmp_path / "out"
        assert main(["cwikel", "--config", config_file(text), "--out", str(out)]) == 0
        summary = load_summary(out)
        held_out = summary["checks"]["held_out"]
        assert sorted(held_out) == sorted(
            [f"simon_{p_prime:g}" for p_prime in CWIKEL_P_PRIMES] + ["weak_estimate"]
        )
        for p_prime in CWIKEL_P_PRIMES:
            check = held_out[f"simon_{p_prime:g}"]
            assert list(check["above"].values()) == [0]
            fitted = summary["cases"][0]["exponents"][f"{p_prime:g}"]["simon"]["c_fit"]
            assert check["constant"] == pytest.approx(fitted)
        assert summary["violations"] == []


class TestSelftest:
    @pytest.fixture(autouse=True)
    def small_suites(self, monkeypatch):
        monkeypatch.setattr(runner, "SELFTEST_VARIATIONAL_CASES", 30)
        monkeypatch.setattr(runner, "SELFTEST_FAN_CASES", 30)
        monkeypatch.setattr(runner, "SELFTEST_MINMAX_CASES", 5)
        monkeypatch.setattr(runner, "SELFTEST_WELL_DEPTHS", (4.0, 16.0))

    def test_passes(self, tmp_path, config_file):
        text = 'mode = "selftest"\nseed = 7\n'
        out = tmp_path / "out"
        assert main(["selftest", "--config", config_file(text), "--out", str(out)]) == 0
        summary = load_summary(out)
        suites = {case["suite"]: case for case in summary["cases"]}
        assert set(suites) == {
            "variational",
            "fan",
            "count-quasinorm",
            "quasi-triangle",
            "minmax",
            "square-well",
            "monotonicity",
        }
        assert all(case["failures"] == 0 for case in suites.values())
        assert suites["variational"]["cases"] == 30

    def test_seed_override_is_recorded(self, tmp_path, config_file):
        out = tmp_path / "out"
        argv = ["selftest", "--config", config_file('mode = "selftest"\n'), "--out", str(out)]
        assert main([*argv, "--seed", "11"]) == 0
        assert load_summary(out)["seed"] == 11
