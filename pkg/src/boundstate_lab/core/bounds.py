"""Inequality evaluators: measured left-hand sides against weighted-norm right-hand sides.

Also holds the implied-constant fitter and the structural checks (scaling, lower bound,
Bargmann, two-dimensional comparisons, chain of reductions).
"""

import math
from collections.abc import Iterable, Sequence
from dataclasses import replace

import numpy as np

from boundstate_lab.constants import DEFAULT_EPS, SCHEMA_VERSION
from boundstate_lab.core.birman_schwinger import (
    assemble_K,
    build_subspace,
    count_ge_one_sweep,
    quadratic_forms,
    trace_low_projected,
    weak_norm_high,
)
from boundstate_lab.core.direct_solver import negative_count
from boundstate_lab.core.norms import (
    WeightSpec,
    decreasing_rearrangement,
    hermite_log_norm,
    orlicz_norm,
    weighted_l2,
)
from boundstate_lab.core.numgrid import make_space_grid
from boundstate_lab.core.potentials import Potential, rescale_R, scale_coupling
from boundstate_lab.core.spectra import Spectrum, count_ge, weak_quasinorm
from boundstate_lab.exceptions import (
    EmptySuiteError,
    InvalidParameterError,
    MixedSuiteError,
    NotCompactlySupportedError,
    RhsInfiniteError,
    TheoremNotApplicableError,
    TruncationUnresolvedError,
    UnresolvedDilationError,
    WrongRegimeError,
)
from boundstate_lab.types import (
    BoundParams,
    BoundReport,
    ChainPoint,
    CountAgreement,
    FitResult,
    HeldOutCheck,
    LowerBoundReport,
    Route,
    ScalingPoint,
    ScalingReport,
    StabilityCheck,
)
from boundstate_lab.utils import get_logger

logger = get_logger("core.bounds")

# Energies of the divergence diagnostic on F_n
LOWER_BOUND_ENERGIES = (-1.0, -0.1, -0.01, -0.001)


def excess_order(d: int, s: float) -> tuple[float, bool]:
    """s - d/2 and whether it is a nonnegative integer."""
    excess = s - d / 2
    return excess, excess > -1e-12 and math.isclose(excess, round(excess), abs_tol=1e-12)


def ratio(lhs: float, subspace_dim: int, rhs: float) -> float:
    """max(lhs - dim, 0)/rhs, infinite when rhs = 0 leaves a positive excess."""
    excess = max(lhs - subspace_dim, 0.0)
    if excess == 0.0:
        return 0.0
    if rhs == 0.0:
        return math.inf
    return excess / rhs


def _params(P: Potential, s: float, eps: float | None = None, weight: str = "") -> BoundParams:
    params: BoundParams = {
        "d": P.grid.d,
        "s": s,
        "coupling": P.coupling,
        "L": P.grid.L,
        "N": P.grid.N,
        "potential": P.name,
    }
    if eps is not None:
        params["eps"] = eps
    if weight:
        params["weight"] = weight
    return params


def _report(
    theorem_id: str,
    params: BoundParams,
    lhs: float,
    subspace_dim: int,
    subspace_dim_binom: int,
    rhs: float,
    rhs_alternative: float | None = None,
    flags: Iterable[str] = (),
) -> BoundReport:
    if not math.isfinite(rhs):
        raise RhsInfiniteError(theorem_id)
    report: BoundReport = {
        "schema_version": SCHEMA_VERSION,
        "theorem_id": theorem_id,
        "params": params,
        "lhs": float(lhs),
        "subspace_dim": int(subspace_dim),
        "subspace_dim_binom": int(subspace_dim_binom),
        "rhs": float(rhs),
        "rhs_alternative": rhs_alternative,
        "ratio": ratio(lhs, subspace_dim, rhs),
        "flags": sorted(set(flags)),
    }
    logger.debug(
        f"{theorem_id} {params.get('potential')}: lhs={lhs:g} dim={subspace_dim} "
        f"rhs={rhs:.6g} ratio={report['ratio']:.4g}"
    )
    return report


def _check_applicable(theorem_id: str, d: int, s: float) -> None:
    excess, integral = excess_order(d, s)
    applicable = {
        "T1.1-nonint": excess > 0 and not integral,
        "T1.1-int": integral and excess >= 1 - 1e-12,
        "T1.2": integral and abs(excess) < 1e-12,
        "T1.5": excess > -1e-12,
        "T1.6": excess > -1e-12,
    }
    if not applicable.get(theorem_id, False):
        raise TheoremNotApplicableError(theorem_id, d, s)


def evaluate_bound(
    theorem_id: str,
    P: Potential,
    s: float,
    eps: float = DEFAULT_EPS,
    energy: float = 0.0,
    hermite_order: int | None = None,
    allow_truncation: bool = False,
    energies: Sequence[float] | None = None,
) -> BoundReport:
    """
    Evaluate one inequality instance.

    Args:
        theorem_id: Report identifier (T1.1-nonint, T1.1-int, T1.2, T1.5, T1.6, Bargmann,
            D2-rearr, D2-orlicz)
        P: Potential
        s: Fractional exponent
        eps: Exponent excess of the oscillator weight (T1.2 and critical T1.6)
        energy: Energy of the trace and weak-norm estimates (T1.5, T1.6)
        hermite_order: Total degree of the oscillator expansion
        allow_truncation: Accept an unresolved oscillator expansion with a flag
        energies: Sweep energies for the Birman-Schwinger plateau

    Returns:
        BoundReport

    Raises:
        TheoremNotApplicableError: If (d, s) lies outside the theorem's regime
        RhsInfiniteError: If the right-hand side is not finite on the grid
    """
    if theorem_id == "Bargmann":
        return bargmann_check(P, s)
    if theorem_id in ("D2-rearr", "D2-orlicz"):
        return d2_comparison(P, "rearr" if theorem_id == "D2-rearr" else "orlicz", s)

    grid = P.grid
    d = grid.d
    _check_applicable(theorem_id, d, s)
    excess, _ = excess_order(d, s)
    flags = ["truncated"] if P.truncated else []
    v = P.sqrt

    if theorem_id in ("T1.1-nonint", "T1.1-int", "T1.2"):
        sweep = count_ge_one_sweep(P, s, energies)
        flags += sweep["flags"]
        subspace = build_subspace(P, s)
        alternative = None
        if theorem_id == "T1.1-nonint":
            weight = WeightSpec.pure_radial(excess)
            rhs = weighted_l2(grid, v, weight)
            alternative = weighted_l2(grid, v, WeightSpec.japanese_log(excess, with_log=False))
        elif theorem_id == "T1.1-int":
            weight = WeightSpec.japanese_log(excess, with_log=True)
            rhs = weighted_l2(grid, v, weight)
            alternative = weighted_l2(grid, v, WeightSpec.pure_radial(excess))
        else:
            weight = WeightSpec.oscillator_log(eps)
            rhs = _oscillator_rhs(P, eps, hermite_order, allow_truncation, flags)
        return _report(
            theorem_id,
            _params(P, s, eps if theorem_id == "T1.2" else None, weight.label),
            float(sweep["plateau"]),
            subspace.dim,
            subspace.binom_dim,
            rhs,
            alternative,
            flags,
        )

    if theorem_id == "T1.5":
        trace = trace_low_projected(P, s, energy)
        _, integral = excess_order(d, s)
        weight = WeightSpec.japanese_log(excess, with_log=integral)
        rhs = weighted_l2(grid, v, weight)
        return _report(
            theorem_id, _params(P, s, weight=weight.label), trace["value"], 0, 0, rhs, None, flags
        )

    high = weak_norm_high(P, s, energy, acknowledge_truncation=True)
    flags += high["flags"]
    if excess > 1e-12:
        rhs, label = grid.integrate(P.values), "1"
    else:
        rhs = _oscillator_rhs(P, eps, hermite_order, allow_truncation, flags)
        label = WeightSpec.oscillator_log(eps).label
    return _report(theorem_id, _params(P, s, eps, label), high["value"], 0, 0, rhs, None, flags)


def _oscillator_rhs(
    P: Potential, eps: float, order: int | None, allow_truncation: bool, flags: list[str]
) -> float:
    try:
        value = hermite_log_norm(P.grid, P.sqrt, eps, order)
    except TruncationUnresolvedError:
        if not allow_truncation:
            raise
        flags.append("hermite-truncated")
        value = hermite_log_norm(P.grid, P.sqrt, eps, order, allow_truncation=True)
    return value**2


def bargmann_check(P: Potential, s: float = 1.0) -> BoundReport:
    """
    N - 1 <= int |x| V dx with constant 1, counting by the direct solver.

    Raises:
        WrongRegimeError: Unless d = 1 and s = 1
    """
    grid = P.grid
    if grid.d != 1 or not math.isclose(s, 1.0):
        raise WrongRegimeError("bargmann", grid.d, s)
    result = negative_count(P, s)
    rhs = grid.integrate(grid.radius * P.values)
    flags = ["near-threshold"] if result["near_threshold"] else []
    if result["count"] - 1 > rhs:
        flags.append("violated")
        logger.warning(f"Bargmann violated for {P.label}: N={result['count']} rhs={rhs:.6g}")
    return _report("Bargmann", _params(P, s, weight="|x|"), result["count"], 1, 1, rhs, None, flags)


def _log_term_antiderivative(r: np.ndarray) -> np.ndarray:
    # F(r) = r^2/2 ln r - r^2/4, with F(0) = 0
    safe = np.where(r > 0, r, 1.0)
    return np.where(r > 0, 0.5 * r**2 * np.log(safe) - 0.25 * r**2, 0.0)


def rearrangement_log_term(P: Potential) -> float:
    """-int_{|x|<=1} ln|x| V*(|x|) dx on R^2, exact for the step profile V*."""
    profile = decreasing_rearrangement(P.grid, P.values)
    starts = np.arange(profile.heights.size) * profile.width
    a = np.clip(starts, 0.0, 1.0)
    b = np.clip(starts + profile.width, 0.0, 1.0)
    pieces = _log_term_antiderivative(b) - _log_term_antiderivative(a)
    return float(-2 * math.pi * np.sum(profile.heights * pieces))


def d2_comparison(P: Potential, variant: str, s: float = 1.0) -> BoundReport:
    """
    Two-dimensional count against int (1 + ln<x>) V plus a rearrangement or L log L term.

    Raises:
        WrongRegimeError: Unless d = 2 and s = 1
    """
    grid = P.grid
    if grid.d != 2 or not math.isclose(s, 1.0):
        raise WrongRegimeError(f"d2-{variant}", grid.d, s)
    if variant not in ("rearr", "orlicz"):
        raise InvalidParameterError("variant", repr(variant), "'rearr' or 'orlicz'")
    result = negative_count(P, s)
    base = grid.integrate((1.0 + 0.5 * np.log1p(grid.radius**2)) * P.values)
    extra = rearrangement_log_term(P) if variant == "rearr" else orlicz_norm(grid, P.values)
    flags = ["near-threshold"] if result["near_threshold"] else []
    theorem_id = "D2-rearr" if variant == "rearr" else "D2-orlicz"
    return _report(
        theorem_id,
        _params(P, s, weight="1+ln<x>"),
        result["count"],
        1,
        1,
        base + extra,
        base,
        flags,
    )


def scaling_rhs(P: Potential, s: float, R: float) -> float:
    """int (R^{-2} + x^2)^{s - d/2} V dx on the potential's own grid."""
    grid = P.grid
    return grid.integrate((R ** -2 + grid.radius**2) ** (s - grid.d / 2) * P.values)


def scaling_check(P: Potential, s: float, radii: Sequence[float]) -> ScalingReport:
    """
    Count the dilations R^{-2s} V(x/R) on grids of half-width R L.

    Raises:
        UnresolvedDilationError: If a dilation is truncated while the original is not
    """
    grid = P.grid
    points: list[ScalingPoint] = []
    for R in radii:
        target = make_space_grid(grid.d, grid.L * R, grid.N)
        dilated = rescale_R(P, R, s, grid=target)
        if dilated.truncated and not P.truncated:
            raise UnresolvedDilationError(R)
        points.append(
            {
                "radius": float(R),
                "count": negative_count(dilated, s)["count"],
                "rhs": scaling_rhs(P, s, R),
                "truncated": dilated.truncated,
            }
        )

    ordered = sorted(points, key=lambda p: p["radius"])
    pairs = list(zip(ordered, ordered[1:], strict=False))
    invariant = len({p["count"] for p in points}) <= 1
    nonincreasing = all(b["rhs"] <= a["rhs"] * (1 + 1e-12) for a, b in pairs)
    nondecreasing = all(a["rhs"] <= b["rhs"] * (1 + 1e-12) for a, b in pairs)
    # (R^{-2} + x^2)^{s-d/2} falls with R only when s >= d/2
    expected = "nonincreasing" if s >= grid.d / 2 else "nondecreasing"
    monotone = nonincreasing if expected == "nonincreasing" else nondecreasing
    if not invariant:
        logger.warning(f"{P.label}: counts change under dilation {[p['count'] for p in points]}")
    if not monotone:
        logger.warning(f"{P.label}: dilation RHS is not {expected} in R")
    return {
        "points": points,
        "counts_invariant": invariant,
        "rhs_nonincreasing": nonincreasing,
        "rhs_expected": expected,
        "rhs_monotone": monotone,
    }


def lower_bound_check(
    P: Potential,
    s: float,
    couplings: Sequence[float],
    energies: Sequence[float] = LOWER_BOUND_ENERGIES,
) -> LowerBoundReport:
    """
    Search the couplings for a count >= dim F_n and track <phi, K_E phi> on F_n.

    Raises:
        NotCompactlySupportedError: If a nonzero potential is not compactly supported
    """
    if not P.is_zero and P.decay_tag != "compact":
        raise NotCompactlySupportedError(P.decay_tag)
    subspace = build_subspace(P, s)
    dim = subspace.dim

    counts: dict[str, int] = {}
    first = None
    for coupling in couplings:
        count = negative_count(scale_coupling(P, coupling), s)["count"]
        counts[f"{coupling:g}"] = count
        if first is None and count >= dim:
            first = float(coupling)

    forms: list[list[float]] = []
    increasing = True
    if dim:
        ordered = sorted(energies)
        table = np.array([quadratic_forms(P, s, E, subspace.Q) for E in ordered])
        forms = table.tolist()
        increasing = bool(np.all(np.diff(table, axis=0) > 0))
    if first is None:
        logger.warning(f"{P.label}: no coupling reaches {dim} bound states")
    return {
        "subspace_dim": dim,
        "counts": counts,
        "first_coupling": first,
        "achieved": first is not None,
        "forms_increasing": increasing,
        "quadratic_forms": forms,
    }


def _suite_key(report: BoundReport) -> tuple[str, int, float]:
    params = report["params"]
    return report["theorem_id"], int(params.get("d", 0)), float(params.get("s", 0.0))


def fit_constant(reports: Sequence[BoundReport]) -> FitResult:
    """
    C_emp = max ratio over a suite sharing theorem and (d, s).

    Raises:
        EmptySuiteError: If the suite is empty
        MixedSuiteError: If reports differ in theorem or (d, s)
    """
    if not reports:
        raise EmptySuiteError()
    keys = {_suite_key(r) for r in reports}
    if len(keys) > 1:
        raise MixedSuiteError(sorted(f"{t}/d={d}/s={s:g}" for t, d, s in keys))
    theorem_id, d, s = keys.pop()
    return {
        "theorem_id": theorem_id,
        "d": d,
        "s": s,
        "c_emp": max(r["ratio"] for r in reports),
        "n_reports": len(reports),
    }


def fit_constants(reports: Sequence[BoundReport]) -> list[FitResult]:
    """Fit one constant per (theorem, d, s) class, in sorted class order."""
    groups = _group_by_suite(reports)
    return [fit_constant(groups[key]) for key in sorted(groups)]


def fit_stability(coarse: Sequence[BoundReport], fine: Sequence[BoundReport]) -> float:
    """Relative change of C_emp between two grid refinements."""
    c_coarse = fit_constant(coarse)["c_emp"]
    c_fine = fit_constant(fine)["c_emp"]
    if c_coarse == c_fine:
        return 0.0
    return abs(c_fine - c_coarse) / max(abs(c_fine), abs(c_coarse))


def _group_by_suite(
    reports: Sequence[BoundReport],
) -> dict[tuple[str, int, float], list[BoundReport]]:
    groups: dict[tuple[str, int, float], list[BoundReport]] = {}
    for report in reports:
        groups.setdefault(_suite_key(report), []).append(report)
    return groups


def refinement_stability(
    coarse: Sequence[BoundReport],
    fine: Sequence[BoundReport],
    tolerance: float,
    refinement: str = "",
) -> list[StabilityCheck]:
    """fit_stability per report class present in both suites, in sorted class order."""
    coarse_groups = _group_by_suite(coarse)
    fine_groups = _group_by_suite(fine)
    checks: list[StabilityCheck] = []
    for key in sorted(coarse_groups.keys() & fine_groups.keys()):
        theorem_id, d, s = key
        change = fit_stability(coarse_groups[key], fine_groups[key])
        stable = change <= tolerance
        if not stable:
            logger.warning(
                f"{theorem_id} d={d} s={s:g}: C_emp moves by {change:.1%} under {refinement}"
            )
        checks.append(
            {
                "theorem_id": theorem_id,
                "d": d,
                "s": s,
                "refinement": refinement,
                "c_coarse": fit_constant(coarse_groups[key])["c_emp"],
                "c_fine": fit_constant(fine_groups[key])["c_emp"],
                "change": change,
                "tolerance": tolerance,
                "stable": stable,
            }
        )
    return checks


def held_out_check(
    fit_family: Sequence[BoundReport], held_out: Sequence[BoundReport]
) -> list[HeldOutCheck]:
    """Fit C_emp per class on one family and validate it on the other."""
    fit_groups = _group_by_suite(fit_family)
    held_groups = _group_by_suite(held_out)
    checks: list[HeldOutCheck] = []
    for key in sorted(fit_groups.keys() & held_groups.keys()):
        fit = fit_constant(fit_groups[key])
        checks.append(
            {
                "fit": fit,
                "n_held_out": len(held_groups[key]),
                "violations": validate_constant(fit["c_emp"], held_groups[key]),
            }
        )
    return checks


def validate_constant(C: float, reports: Sequence[BoundReport]) -> list[str]:
    """Reports whose ratio exceeds a fitted constant."""
    violations = []
    for report in reports:
        if report["ratio"] > C * (1 + 1e-12):
            violations.append(
                f"{report['theorem_id']} {report['params'].get('potential')}: "
                f"ratio {report['ratio']:.6g} > C {C:.6g}"
            )
    return violations


def chain_check(P: Potential, s: float, energies: Sequence[float]) -> list[ChainPoint]:
    """
    Chain of reductions at each energy on the x-kernel matrices.

    count(K_E) <= dim + N(Pi K Pi) <= dim + ||Pi K Pi||_{1,inf}
    <= dim + 2 tr(Pi K_< Pi) + 2 ||K_>||_{1,inf}.
    """
    if any(E >= 0 for E in energies):
        raise InvalidParameterError("Chain energies", list(energies), "negative")
    subspace = build_subspace(P, s)
    dim = subspace.dim
    out: list[ChainPoint] = []
    for E in sorted(energies):
        full = assemble_K(P, s, E, "all", route="x-kernel", acknowledge_truncation=True)
        projected = assemble_K(
            P, s, E, "all", projected=True, acknowledge_truncation=True, subspace=subspace
        )
        count = count_ge(full.spectrum(), 1.0)
        projected_spectrum = projected.spectrum()
        projected_count = count_ge(projected_spectrum, 1.0)
        projected_weak = weak_quasinorm(_clip_psd(projected_spectrum), 1.0)
        trace_low = trace_low_projected(P, s, E, refine=False)["value"]
        high = assemble_K(P, s, E, "high", acknowledge_truncation=True).spectrum()
        weak_high = weak_quasinorm(_clip_psd(high), 1.0)
        rhs = dim + 2 * trace_low + 2 * weak_high
        tol = 1e-9 * max(1.0, rhs)
        holds = (
            count <= dim + projected_count
            and projected_count <= projected_weak + tol
            and projected_weak <= 2 * trace_low + 2 * weak_high + tol
        )
        if not holds:
            logger.warning(f"{P.label}: chain of reductions fails at E={E:.3g}")
        out.append(
            {
                "energy": float(E),
                "count": count,
                "subspace_dim": dim,
                "projected_count": projected_count,
                "projected_weak_norm": projected_weak,
                "trace_low": trace_low,
                "weak_high": weak_high,
                "rhs": rhs,
                "holds": bool(holds),
            }
        )
    return out


def _clip_psd(spectrum: Spectrum) -> Spectrum:
    # rounding can leave eigenvalues of PSD matrices slightly below zero
    return replace(spectrum, values=np.clip(spectrum.values, 0.0, None))


def count_agreement(
    P: Potential, s: float, energies: Sequence[float] | None = None, route: Route = "x-kernel"
) -> CountAgreement:
    """
    Compare the direct count with the Birman-Schwinger plateau.

    The x-kernel route builds K_E from the position-space kernel and shares no assembly
    with the Galerkin matrix. At s = d/2 its high window would be cut at the Nyquist
    frequency, so the fourier-nystrom route is used there.
    """
    if route == "x-kernel" and math.isclose(s, P.grid.d / 2):
        logger.info(f"{P.label}: s = d/2, comparing on the fourier-nystrom route")
        route = "fourier-nystrom"
    direct = negative_count(P, s)
    sweep = count_ge_one_sweep(P, s, energies, route=route)
    agree = direct["count"] == sweep["plateau"]
    near = direct["near_threshold"]
    explained = agree or bool(near) or any(f.startswith("near-one") for f in sweep["flags"])
    if not agree:
        logger.warning(
            f"{P.label}: direct count {direct['count']} vs plateau {sweep['plateau']}"
            f" ({'explained' if explained else 'unexplained'})"
        )
    return {
        "direct": direct["count"],
        "plateau": sweep["plateau"],
        "agree": agree,
        "explained": explained,
        "route": route,
        "near_threshold": near,
        "flags": sweep["flags"],
    }

