import math

import numpy as np
import pytest

from boundstate_lab.constants import (
    CHAIN_ENERGIES,
    GRID_STABILITY_TOL,
    HERMITE_STABILITY_TOL,
    SCHEMA_VERSION,
)
from boundstate_lab.core.birman_schwinger import count_ge_one_sweep, sweep_energies
from boundstate_lab.core.bounds import (
    bargmann_check,
    chain_check,
    count_agreement,
    d2_comparison,
    evaluate_bound,
    excess_order,
    fit_constant,
    fit_constants,
    fit_stability,
    held_out_check,
    lower_bound_check,
    ratio,
    rearrangement_log_term,
    refinement_stability,
    scaling_check,
    scaling_rhs,
    validate_constant,
)
from boundstate_lab.core.direct_solver import negative_count
from boundstate_lab.core.numgrid import make_space_grid
from boundstate_lab.core.potentials import bump, gaussian, well
from boundstate_lab.exceptions import (
    EmptySuiteError,
    InvalidParameterError,
    MixedSuiteError,
    NotCompactlySupportedError,
    TheoremNotApplicableError,
    WrongRegimeError,
)


def make_report(theorem_id="T1.1-nonint", d=1, s=1.0, ratio_value=0.5, potential="p"):
    return {
        "schema_version": SCHEMA_VERSION,
        "theorem_id": theorem_id,
        "params": {"d": d, "s": s, "potential": potential, "coupling": 1.0},
        "lhs": 1.0,
        "subspace_dim": 0,
        "subspace_dim_binom": 0,
        "rhs": 1.0,
        "rhs_alternative": None,
        "ratio": ratio_value,
        "flags": [],
    }


class TestHelpers:
    def test_ratio(self):
        assert ratio(3, 1, 4.0) == 0.5
        assert ratio(1, 1, 0.0) == 0.0
        assert ratio(0, 1, 2.0) == 0.0
        assert math.isinf(ratio(3, 1, 0.0))

    def test_excess_order(self):
        assert excess_order(1, 1.5) == (1.0, True)
        assert excess_order(1, 1.0) == (0.5, False)
        assert excess_order(2, 1.0) == (0.0, True)


class TestEvaluateBound:
    def test_non_integer_regime(self, gaussian_1d):
        report = evaluate_bound("T1.1-nonint", gaussian_1d, 1.0, energies=sweep_energies(12))
        grid = gaussian_1d.grid
        assert report["schema_version"] == SCHEMA_VERSION
        assert report["lhs"] >= 1
        assert report["subspace_dim"] == 1
        assert report["subspace_dim_binom"] == 1
        radial = grid.integrate(np.abs(grid.axis) * gaussian_1d.values)
        assert report["rhs"] == pytest.approx(radial)
        assert report["rhs_alternative"] == pytest.approx(
            grid.integrate(np.sqrt(1 + grid.axis**2) * gaussian_1d.values)
        )
        assert report["ratio"] == pytest.approx(max(report["lhs"] - 1, 0) / report["rhs"])
        assert report["params"]["weight"] == "|x|^0.5"

    @pytest.mark.parametrize(("theorem_id", "s"), [("T1.2", 1.0), ("T1.1-int", 1.0)])
    def test_not_applicable(self, gaussian_1d, theorem_id, s):
        with pytest.raises(TheoremNotApplicableError):
            evaluate_bound(theorem_id, gaussian_1d, s)

    def test_integer_regime(self, bump_1d):
        report = evaluate_bound("T1.1-int", bump_1d, 1.5, energies=sweep_energies(10))
        assert report["subspace_dim"] == 2
        assert report["rhs"] > report["rhs_alternative"]

    def test_low_trace_report(self, bump_1d):
        report = evaluate_bound("T1.5", bump_1d, 1.0)
        grid = bump_1d.grid
        assert report["lhs"] > 0
        assert report["rhs"] == pytest.approx(
            grid.integrate(np.sqrt(1 + grid.axis**2) * bump_1d.values)
        )

    def test_high_weak_norm_report(self, gaussian_1d):
        report = evaluate_bound("T1.6", gaussian_1d, 1.0)
        assert report["rhs"] == pytest.approx(gaussian_1d.grid.integrate(gaussian_1d.values))
        assert report["lhs"] <= 2 * report["rhs"]

    def test_critical_oscillator_report(self):
        grid = make_space_grid(1, 8, 64)
        report = evaluate_bound("T1.2", gaussian(grid, 1.0), 0.5, hermite_order=60)
        assert report["subspace_dim"] == 1
        assert report["params"]["eps"] == 0.01
        assert report["rhs"] > 0

    def test_truncation_flag(self):
        grid = make_space_grid(1, 4, 32)
        report = evaluate_bound("T1.6", gaussian(grid, 1.0, w=3.0), 1.0)
        assert "truncated" in report["flags"]


class TestStructuralChecks:
    def test_bargmann(self, deep_well):
        report = bargmann_check(deep_well)
        assert report["lhs"] == 3
        assert report["subspace_dim"] == 1
        assert report["lhs"] - 1 <= report["rhs"]
        assert "violated" not in report["flags"]

    def test_bargmann_regime(self, gaussian_1d):
        with pytest.raises(WrongRegimeError):
            bargmann_check(gaussian_1d, 2.0)

    def test_two_dimensional_comparisons(self, grid_2d):
        P = gaussian(grid_2d, 3.0, 1.0)
        rearr = d2_comparison(P, "rearr")
        orlicz = d2_comparison(P, "orlicz")
        assert rearr["lhs"] == orlicz["lhs"] >= 1
        assert rearr["rhs"] >= rearr["rhs_alternative"]
        assert orlicz["rhs"] > orlicz["rhs_alternative"]
        assert evaluate_bound("D2-rearr", P, 1.0)["rhs"] == pytest.approx(rearr["rhs"])

    def test_two_dimensional_regime(self, gaussian_1d):
        with pytest.raises(WrongRegimeError):
            d2_comparison(gaussian_1d, "rearr")

    def test_rearrangement_log_term(self, grid_2d):
        assert rearrangement_log_term(gaussian(grid_2d, 3.0)) > 0

    def test_scaling_invariance(self, gaussian_1d):
        report = scaling_check(gaussian_1d, 1.0, [1.0, 2.0, 4.0])
        assert report["counts_invariant"]
        assert report["rhs_nonincreasing"]
        assert report["rhs_expected"] == "nonincreasing"
        assert report["rhs_monotone"]
        assert [p["radius"] for p in report["points"]] == [1.0, 2.0, 4.0]

    @pytest.mark.parametrize(("d", "s"), [(2, 0.75), (1, 0.25)])
    def test_scaling_rhs_grows_below_half_dimension(self, d, s):
        P = gaussian(make_space_grid(d, 4, 16 if d == 2 else 64), 5.0)
        report = scaling_check(P, s, [1.0, 2.0, 4.0])
        assert report["rhs_expected"] == "nondecreasing"
        assert report["rhs_monotone"]
        assert not report["rhs_nonincreasing"]
        assert report["counts_invariant"]

    def test_scaling_rhs_limit(self, gaussian_1d):
        grid = gaussian_1d.grid
        far = grid.integrate(np.abs(grid.axis) * gaussian_1d.values)
        assert scaling_rhs(gaussian_1d, 1.0, 1e6) == pytest.approx(far, rel=1e-6)

    def test_lower_bound(self):
        P = bump(make_space_grid(1, 5, 128), 1.0, 1.0)
        report = lower_bound_check(P, 2.5, [1.0, 1e2, 1e4, 1e5, 1e6])
        assert report["subspace_dim"] == 3
        assert report["achieved"]
        assert report["counts"]["1e+06"] >= 3
        assert report["forms_increasing"]
        assert len(report["quadratic_forms"]) == 4

    def test_lower_bound_requires_compact_support(self, gaussian_1d):
        with pytest.raises(NotCompactlySupportedError):
            lower_bound_check(gaussian_1d, 1.0, [1.0])

    def test_chain_of_reductions(self, bump_1d):
        chain = chain_check(bump_1d, 1.0, CHAIN_ENERGIES)
        assert [p["energy"] for p in chain] == sorted(CHAIN_ENERGIES)
        for point in chain:
            assert point["holds"]
            assert point["count"] <= point["rhs"]

    def test_chain_rejects_zero_energy(self, bump_1d):
        with pytest.raises(InvalidParameterError):
            chain_check(bump_1d, 1.0, [0.0])

    def test_count_agreement(self, deep_well):
        agreement = count_agreement(deep_well, 1.0)
        assert agreement["route"] == "x-kernel"
        assert agreement["direct"] == 3
        assert agreement["agree"]
        assert agreement["explained"]

    @pytest.mark.parametrize(("s", "expected"), [(1.0, 2), (1.5, 3)])
    def test_position_kernel_plateau_matches_direct_count(self, gaussian_1d, s, expected):
        sweep = count_ge_one_sweep(gaussian_1d, s, route="x-kernel")
        assert sweep["plateau"] == negative_count(gaussian_1d, s)["count"] == expected
        agreement = count_agreement(gaussian_1d, s)
        assert agreement["route"] == "x-kernel"
        assert agreement["agree"]

    def test_count_agreement_at_half_dimension(self, gaussian_1d):
        agreement = count_agreement(gaussian_1d, 0.5)
        assert agreement["route"] == "fourier-nystrom"


class TestFitting:
    def test_fit_constant(self):
        reports = [make_report(ratio_value=r) for r in (0.1, 0.7, 0.3)]
        fit = fit_constant(reports)
        assert fit["c_emp"] == 0.7
        assert fit["n_reports"] == 3
        assert fit["theorem_id"] == "T1.1-nonint"

    def test_empty_suite(self):
        with pytest.raises(EmptySuiteError):
            fit_constant([])

    def test_mixed_suite(self):
        with pytest.raises(MixedSuiteError):
            fit_constant([make_report(), make_report(s=2.0)])

    def test_fit_constants_groups(self):
        reports = [
            make_report("T1.6", ratio_value=0.2),
            make_report("Bargmann", ratio_value=0.4),
            make_report("T1.6", ratio_value=0.6),
        ]
        fits = fit_constants(reports)
        assert [f["theorem_id"] for f in fits] == ["Bargmann", "T1.6"]
        assert fits[1]["c_emp"] == 0.6

    def test_validate_constant(self):
        reports = [make_report(ratio_value=r, potential=f"p{r}") for r in (0.5, 1.5)]
        violations = validate_constant(1.0, reports)
        assert len(violations) == 1
        assert "p1.5" in violations[0]

    def test_fit_stability(self):
        coarse = [make_report(ratio_value=0.5)]
        fine = [make_report(ratio_value=0.55)]
        assert fit_stability(coarse, fine) == pytest.approx(0.05 / 0.55)
        assert fit_stability(coarse, coarse) == 0.0

    def test_stability_under_refinement(self):
        def suite(N):
            grid = make_space_grid(1, 20, N)
            return [
                evaluate_bound("T1.6", gaussian(grid, V0), 1.0) for V0 in (6.0, 40.0)
            ]

        assert fit_stability(suite(256), suite(512)) < 0.05

    def test_refinement_stability_per_class(self):
        coarse = [make_report(ratio_value=0.5), make_report("T1.2", s=0.5, ratio_value=0.2)]
        fine = [make_report(ratio_value=0.52), make_report("T1.2", s=0.5, ratio_value=0.3)]
        checks = refinement_stability(coarse, fine, 0.10, "N=128->256")
        assert [(c["theorem_id"], c["stable"]) for c in checks] == [
            ("T1.1-nonint", True),
            ("T1.2", False),
        ]
        assert checks[1]["change"] == pytest.approx(0.1 / 0.3)
        assert checks[0]["refinement"] == "N=128->256"

    def test_non_integer_count_bound_stable_under_grid_doubling(self):
        def suite(N):
            grid = make_space_grid(1, 20, N)
            return [
                evaluate_bound("T1.1-nonint", gaussian(grid, V0), 1.0) for V0 in (6.0, 40.0)
            ]

        [check] = refinement_stability(suite(256), suite(512), GRID_STABILITY_TOL)
        assert check["c_coarse"] > 0
        assert check["stable"]

    def test_oscillator_count_bound_stable_under_order_doubling(self):
        grid = make_space_grid(1, 8, 64)

        def suite(M):
            return [
                evaluate_bound(
                    "T1.2", gaussian(grid, V0), 0.5, hermite_order=M, allow_truncation=True
                )
                for V0 in (1.0, 20.0)
            ]

        [check] = refinement_stability(suite(60), suite(120), HERMITE_STABILITY_TOL)
        assert check["theorem_id"] == "T1.2"
        assert check["c_coarse"] > 0
        assert check["stable"]

    def test_held_out_family_above_fitted_constant(self, grid_1d, deep_well):
        shallow = [evaluate_bound("T1.1-nonint", gaussian(grid_1d, 0.1), 1.0)]
        deep = [evaluate_bound("T1.1-nonint", deep_well, 1.0)]
        [check] = held_out_check(shallow, deep)
        assert check["fit"]["c_emp"] == 0.0
        assert check["n_held_out"] == 1
        assert len(check["violations"]) == 1
        [back] = held_out_check(deep, shallow)
        assert back["violations"] == []

    def test_held_out_only_shares_classes(self):
        fit = [make_report(ratio_value=0.5)]
        held = [make_report("T1.6", ratio_value=9.0)]
        assert held_out_check(fit, held) == []


def test_bargmann_through_evaluate_bound(well_grid):
    report = evaluate_bound("Bargmann", well(well_grid, 4.0), 1.0)
    assert report["theorem_id"] == "Bargmann"
    assert report["lhs"] == 2
