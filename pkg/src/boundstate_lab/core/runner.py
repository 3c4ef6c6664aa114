"""Runner module. Executes one configured experiment and writes its artifacts."""

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from boundstate_lab.constants import (
    CHAIN_ENERGIES,
    CWIKEL_P_PRIMES,
    CWIKEL_WEIGHT_EXPONENT,
    FAR_ENERGY,
    GRID_REFINED_THEOREMS,
    GRID_STABILITY_TOL,
    HERMITE_STABILITY_TOL,
    MAX_DENSE_SIZE,
    SCHEMA_VERSION,
    SELFTEST_FAN_CASES,
    SELFTEST_MINMAX_CASES,
    SELFTEST_SWEEP_GRID,
    SELFTEST_VARIATIONAL_CASES,
    SELFTEST_WELL_DEPTHS,
    SELFTEST_WELL_GRID,
    THEOREM_IDS,
)
from boundstate_lab.core.birman_schwinger import (
    assemble_K,
    count_ge_one_sweep,
    subspace_order,
    sweep_energies,
    trace_low_projected,
    weak_norm_high,
)
from boundstate_lab.core.bounds import (
    chain_check,
    count_agreement,
    evaluate_bound,
    fit_constants,
    held_out_check,
    lower_bound_check,
    refinement_stability,
    scaling_check,
    validate_constant,
)
from boundstate_lab.core.cwikel import (
    an_bn_scan,
    critical_symbol,
    default_factorizations,
    embedding_check,
    lattice_decompose,
    simon_singular_bound,
    simon_violations,
    theorem17_check,
)
from boundstate_lab.core.direct_solver import negative_count, square_well_count
from boundstate_lab.core.experiment_config import ExperimentConfig
from boundstate_lab.core.norms import (
    default_hermite_order,
    hermite_log_norm,
    orlicz_norm,
    weak_lp,
)
from boundstate_lab.core.numgrid import SpaceGrid, make_space_grid
from boundstate_lab.core.potentials import Potential, gaussian, scale_coupling, well
from boundstate_lab.core.report_storage import save_curve, save_reports_csv, save_summary
from boundstate_lab.core.spectra import (
    count_ge,
    fan_check,
    minmax_eigenvalue,
    random_psd,
    singular_values,
    variational_check,
    weak_quasinorm,
)
from boundstate_lab.exceptions import (
    OverflowOrderError,
    TheoremNotApplicableError,
    TruncationUnresolvedError,
    WrongRegimeError,
)
from boundstate_lab.types import BoundReport, RunSummary, SimonBound, StabilityCheck
from boundstate_lab.utils import get_logger

logger = get_logger("core.runner")

# Callback type aliases for cleaner signatures
CaseStartCallback = Callable[[str], None]
CaseDoneCallback = Callable[[str, dict[str, object]], None]

Curves = dict[str, tuple[list[float], list[float]]]


@dataclass
class ModeResult:
    """Cases, reports, checks and curves collected by one mode."""

    cases: list[dict[str, object]] = field(default_factory=list)
    reports: list[BoundReport] = field(default_factory=list)
    checks: dict[str, object] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)
    curves: Curves = field(default_factory=dict)

    def add_curve(self, name: str, x: list[float], y: list[float]) -> None:
        self.curves[name] = (x, y)


def _potentials(config: ExperimentConfig, grid: SpaceGrid | None = None) -> list[Potential]:
    """Configured potentials, times every coupling when several are given."""
    base = config.build_potentials(grid)
    if config.couplings == (1.0,):
        return base
    return [scale_coupling(P, c) for P in base for c in config.couplings]


def _held_out(config: ExperimentConfig, index: int) -> bool:
    """Odd configured entries form the held-out family; a single entry is never held out."""
    if len(config.potentials) < 2:
        return False
    entry = index if config.couplings == (1.0,) else index // len(config.couplings)
    return entry % 2 == 1


def _square_well_oracle(P: Potential, s: float) -> int | None:
    spec = P.spec
    if spec is None or spec.kind != "well" or P.grid.d != 1 or not math.isclose(s, 1.0):
        return None
    return square_well_count(spec.V0, spec.a)


def run_count(
    config: ExperimentConfig,
    on_case_start: CaseStartCallback | None = None,
    on_case_done: CaseDoneCallback | None = None,
) -> ModeResult:
    """Direct negative-eigenvalue counts, with the square-well oracle where it applies."""
    result = ModeResult()
    total = 0
    for P in _potentials(config):
        if on_case_start:
            on_case_start(P.label)
        counted = negative_count(P, config.s)
        total += counted["count"]
        oracle = _square_well_oracle(P, config.s)
        case: dict[str, object] = {
            "potential": P.label,
            "count": counted["count"],
            "tau": counted["tau"],
            "lowest": counted["lowest"],
            "near_threshold": counted["near_threshold"],
            "truncated": P.truncated,
            "oracle": oracle,
        }
        if oracle is not None and oracle != counted["count"]:
            result.violations.append(f"{P.label}: count {counted['count']} != oracle {oracle}")
        result.cases.append(case)
        if on_case_done:
            on_case_done(P.label, case)
    result.checks["total_count"] = total
    return result


def _theorem_ids(config: ExperimentConfig) -> tuple[list[str], bool]:
    if config.theorems:
        return list(config.theorems), True
    return list(THEOREM_IDS), False


def run_verify(
    config: ExperimentConfig,
    on_case_start: CaseStartCallback | None = None,
    on_case_done: CaseDoneCallback | None = None,
) -> ModeResult:
    """
    Evaluate every requested inequality on every potential and fit the implied constants.

    Without an explicit theorem list, identifiers outside their regime are skipped.
    Violations are Bargmann failures, reports above a configured reference constant,
    broken chains of reductions, non-invariant dilation counts, constants that move
    under refinement and held-out reports above the constant fitted on the other family.
    """
    result = ModeResult()
    theorem_ids, explicit = _theorem_ids(config)
    potentials = _potentials(config)
    fit_family: list[BoundReport] = []
    held_out: list[BoundReport] = []

    for index, P in enumerate(potentials):
        if on_case_start:
            on_case_start(P.label)
        for theorem_id in theorem_ids:
            try:
                report = _evaluate(config, theorem_id, P, config.hermite_order)
            except (TheoremNotApplicableError, WrongRegimeError) as e:
                if explicit:
                    raise
                logger.debug(f"Skipping {theorem_id} for {P.label}: {e}")
                continue
            if "violated" in report["flags"]:
                result.violations.append(f"{theorem_id} {P.label}: violated")
            result.reports.append(report)
            (held_out if _held_out(config, index) else fit_family).append(report)

        case: dict[str, object] = {"potential": P.label}
        if config.s > config.d / 2:
            chain = chain_check(P, config.s, CHAIN_ENERGIES)
            case["chain"] = chain
            for point in chain:
                if not point["holds"]:
                    result.violations.append(f"chain {P.label} at E={point['energy']:g}")
        scaling = scaling_check(P, config.s, config.radii)
        case["scaling"] = scaling
        if not (scaling["counts_invariant"] and scaling["rhs_monotone"]):
            result.violations.append(f"scaling {P.label}")
        result.cases.append(case)
        if on_case_done:
            on_case_done(P.label, case)

    for theorem_id, C in config.constants:
        suite = [r for r in result.reports if r["theorem_id"] == theorem_id]
        result.violations.extend(validate_constant(C, suite))

    stability = _stability_checks(config, result.reports)
    for check in stability:
        if not check["stable"]:
            result.violations.append(
                f"{check['theorem_id']} d={check['d']} s={check['s']:g}: C_emp moves "
                f"{check['change']:.1%} under {check['refinement']}"
            )
    held = held_out_check(fit_family, held_out)
    for entry in held:
        result.violations.extend(f"held-out {v}" for v in entry["violations"])

    result.checks["reports"] = len(result.reports)
    result.checks["reference_constants"] = dict(config.constants)
    result.checks["stability"] = stability
    result.checks["held_out"] = held
    return result


def _evaluate(
    config: ExperimentConfig, theorem_id: str, P: Potential, hermite_order: int | None
) -> BoundReport:
    return evaluate_bound(
        theorem_id,
        P,
        config.s,
        eps=config.eps,
        hermite_order=hermite_order,
        allow_truncation=True,
        energies=sweep_energies(config.j_max),
    )


def _stability_checks(
    config: ExperimentConfig, reports: list[BoundReport]
) -> list[StabilityCheck]:
    """Refit the T1.1 classes on a 2N grid and the T1.2 class at Hermite order 2M."""
    checks: list[StabilityCheck] = []
    evaluated = sorted({r["theorem_id"] for r in reports})

    grid_ids = [t for t in evaluated if t in GRID_REFINED_THEOREMS]
    if grid_ids:
        N = 2 * config.N
        if N**config.d > MAX_DENSE_SIZE:
            logger.warning(f"Skipping N={config.N}->{N}: {N}^{config.d} nodes exceed the cap")
        else:
            fine_grid = make_space_grid(config.d, config.L, N)
            fine = [
                _evaluate(config, t, P, config.hermite_order)
                for P in _potentials(config, fine_grid)
                for t in grid_ids
            ]
            coarse = [r for r in reports if r["theorem_id"] in grid_ids]
            checks += refinement_stability(
                coarse, fine, GRID_STABILITY_TOL, f"N={config.N}->{N}"
            )

    if "T1.2" in evaluated:
        M = config.hermite_order or default_hermite_order(config.d)
        try:
            fine = [_evaluate(config, "T1.2", P, 2 * M) for P in _potentials(config)]
        except OverflowOrderError as e:
            logger.warning(f"Skipping Hermite M={M}->{2 * M}: {e}")
        else:
            coarse = [r for r in reports if r["theorem_id"] == "T1.2"]
            checks += refinement_stability(
                coarse, fine, HERMITE_STABILITY_TOL, f"M={M}->{2 * M}"
            )
    return checks


def run_sweep(
    config: ExperimentConfig,
    on_case_start: CaseStartCallback | None = None,
    on_case_done: CaseDoneCallback | None = None,
) -> ModeResult:
    """Energy sweeps of the Birman-Schwinger counter, coupling sweeps and lower bounds."""
    result = ModeResult()
    energies = sweep_energies(config.j_max)
    agreed = 0
    for index, P in enumerate(config.build_potentials()):
        if on_case_start:
            on_case_start(P.label)
        agreement = count_agreement(P, config.s, energies)
        agreed += agreement["agree"]
        sweep = count_ge_one_sweep(P, config.s, energies)
        far = count_ge(assemble_K(P, config.s, FAR_ENERGY, "all").spectrum(), 1.0)
        couplings = sorted(config.couplings)
        counts = [negative_count(scale_coupling(P, c), config.s)["count"] for c in couplings]
        case: dict[str, object] = {
            "potential": P.label,
            "sweep": sweep,
            "agreement": agreement,
            "count_at_far_energy": far,
            "coupling_counts": dict(zip([f"{c:g}" for c in couplings], counts, strict=True)),
        }
        if subspace_order(config.d, config.s) >= 0 and P.decay_tag == "compact":
            case["lower_bound"] = lower_bound_check(P, config.s, couplings)

        if not (sweep["monotone_counts"] and sweep["monotone_eigenvalues"]):
            result.violations.append(f"{P.label}: sweep not monotone")
        if far:
            result.violations.append(f"{P.label}: count {far} at E={FAR_ENERGY:g}")
        if not agreement["explained"]:
            result.violations.append(f"{P.label}: unexplained count disagreement")

        points = sweep["points"]
        result.add_curve(
            f"sweep_{index:02d}_count",
            [p["energy"] for p in points],
            [float(p["count"]) for p in points],
        )
        result.add_curve(
            f"sweep_{index:02d}_top",
            [p["energy"] for p in points],
            [p["top_eigenvalues"][0] if p["top_eigenvalues"] else 0.0 for p in points],
        )
        result.add_curve(f"coupling_{index:02d}_count", couplings, [float(c) for c in counts])
        result.cases.append(case)
        if on_case_done:
            on_case_done(P.label, case)
    result.checks["agreement"] = f"{agreed}/{len(result.cases)}"
    return result


def _low_trace_energy(config: ExperimentConfig) -> float:
    # E = 0 needs the projection to absorb the low-frequency divergence
    return 0.0 if subspace_order(config.d, config.s) >= 0 else sweep_energies(config.j_max)[-1]


def run_quasinorm(
    config: ExperimentConfig,
    on_case_start: CaseStartCallback | None = None,
    on_case_done: CaseDoneCallback | None = None,
) -> ModeResult:
    """Projected low-frequency traces, high-frequency weak norms and potential norms."""
    result = ModeResult()
    energy = _low_trace_energy(config)
    for index, P in enumerate(config.build_potentials()):
        if on_case_start:
            on_case_start(P.label)
        trace = trace_low_projected(P, config.s, energy)
        high = weak_norm_high(P, config.s, energy, acknowledge_truncation=True)
        try:
            log_norm = hermite_log_norm(P.grid, P.sqrt, config.eps, config.hermite_order)
            log_flags: list[str] = []
        except TruncationUnresolvedError:
            log_norm = hermite_log_norm(
                P.grid, P.sqrt, config.eps, config.hermite_order, allow_truncation=True
            )
            log_flags = ["hermite-truncated"]
        norms: dict[str, object] = {
            "integral": P.grid.integrate(P.values),
            "weak_l1": weak_lp(P.values, 1.0, P.grid),
            "hermite_log_norm": log_norm,
            "hermite_flags": log_flags,
        }
        if config.d == 2:
            norms["orlicz"] = orlicz_norm(P.grid, P.values)
        case: dict[str, object] = {
            "potential": P.label,
            "energy": energy,
            "trace_low": trace,
            "weak_high": high,
            "norms": norms,
        }
        for row in trace["annuli"]:
            if row["value"] < 0:
                result.violations.append(f"{P.label}: negative annulus {row['index']}")
        annuli = trace["annuli"]
        result.add_curve(
            f"annuli_{index:02d}_value",
            [row["outer"] for row in annuli],
            [row["value"] for row in annuli],
        )
        result.add_curve(
            f"annuli_{index:02d}_split",
            [row["outer"] for row in annuli],
            [row["split_far"] + row["split_near"] for row in annuli],
        )
        result.cases.append(case)
        if on_case_done:
            on_case_done(P.label, case)
    return result


def _gaussian_symbol(r: np.ndarray) -> np.ndarray:
    return np.exp(-(r**2) / 2)


def run_cwikel(
    config: ExperimentConfig,
    on_case_start: CaseStartCallback | None = None,
    on_case_done: CaseDoneCallback | None = None,
) -> ModeResult:
    """
    A_n/B_n scans, singular-value decay, lattice embedding and the weak L^{2,inf} estimate.

    With several potentials, the singular-value constant and the weak-estimate constant
    are fitted on the even entries and validated on the odd ones.
    """
    result = ModeResult()
    grid = config.grid()
    factorizations = default_factorizations(config.d, config.delta)
    potentials = config.build_potentials(grid)
    simon_runs: dict[str, list[tuple[str, SimonBound, bool]]] = {}
    weak_runs: list[tuple[str, float, bool]] = []
    for index, P in enumerate(potentials):
        if on_case_start:
            on_case_start(P.label)
        held = len(potentials) >= 2 and index % 2 == 1
        f = P.sqrt
        per_exponent: dict[str, object] = {}
        for p_prime in CWIKEL_P_PRIMES:
            key = f"{p_prime:g}"
            scan = an_bn_scan(lattice_decompose(grid, f, _gaussian_symbol, p_prime))
            simon = simon_singular_bound(grid, f, _gaussian_symbol, p_prime)
            embedding = embedding_check(grid, f, p_prime, CWIKEL_WEIGHT_EXPONENT)
            per_exponent[key] = {"an_bn": scan, "simon": simon, "embedding": embedding}
            simon_runs.setdefault(key, []).append((P.label, simon, held))

            for check in scan["checks"]:
                if check["recombination_error"] > 1e-12:
                    result.violations.append(f"{P.label} p'={key}: A_n + B_n != f g")
                if check["hs_sq"] > check["hs_bound"] * (1 + 1e-9):
                    result.violations.append(f"{P.label} p'={key}: HS bound at n={check['level']}")
                if not check["fan_holds"]:
                    result.violations.append(f"{P.label} p'={key}: Fan at n={check['level']}")
            if embedding["lhs"] > embedding["rhs"] * (1 + 1e-9):
                result.violations.append(f"{P.label} p'={key}: embedding")
            if not simon["decay_holds"]:
                result.violations.append(
                    f"{P.label} p'={key}: singular values decay with slope {simon['slope']:.3g}"
                )
            ranks = list(range(1, len(simon["mu"]) + 1))
            result.add_curve(f"cwikel_{index:02d}_mu_{key}", ranks, simon["mu"])
            result.add_curve(f"cwikel_{index:02d}_bound_{key}", ranks, simon["bound"])

        weak = theorem17_check(
            grid,
            f,
            critical_symbol(config.d),
            factorizations,
            eps=config.eps,
            M=config.hermite_order,
            delta=config.delta,
        )
        for shell in weak["shells"]:
            if not shell["holder_holds"]:
                result.violations.append(f"{P.label}: Hölder on shell {shell['k']}")
        weak_runs.append((P.label, weak["ratio"], held))
        case: dict[str, object] = {
            "potential": P.label,
            "exponents": per_exponent,
            "weak_estimate": weak,
        }
        result.cases.append(case)
        if on_case_done:
            on_case_done(P.label, case)
    result.checks["held_out"] = _cwikel_held_out(simon_runs, weak_runs, result.violations)
    return result


def _cwikel_held_out(
    simon_runs: dict[str, list[tuple[str, SimonBound, bool]]],
    weak_runs: list[tuple[str, float, bool]],
    violations: list[str],
) -> dict[str, object]:
    """Validate constants fitted on one family against the held-out family."""
    checks: dict[str, object] = {}
    for key, runs in simon_runs.items():
        held_out = [(label, bound) for label, bound, held in runs if held]
        if not held_out:
            continue
        C = max(bound["c_fit"] for _, bound, held in runs if not held)
        above = {label: simon_violations(bound, C) for label, bound in held_out}
        checks[f"simon_{key}"] = {"constant": C, "above": above}
        violations.extend(
            f"held-out {label} p'={key}: {count} singular values above C={C:.4g}"
            for label, count in above.items()
            if count
        )

    held_ratios = [(label, r) for label, r, held in weak_runs if held]
    if held_ratios:
        C = max(r for _, r, held in weak_runs if not held)
        checks["weak_estimate"] = {"constant": C, "ratios": dict(held_ratios)}
        violations.extend(
            f"held-out {label}: weak estimate ratio {r:.4g} > C={C:.4g}"
            for label, r in held_ratios
            if r > C * (1 + 1e-9)
        )
    return checks


def _selftest_variational(rng: np.random.Generator) -> tuple[int, int]:
    failures = 0
    for _ in range(SELFTEST_VARIATIONAL_CASES):
        n = int(rng.integers(3, 41))
        K = random_psd(rng, n)
        F = rng.standard_normal((n, int(rng.integers(0, min(6, n)))))
        check = variational_check(K, F)
        failures += not (check["holds"] and check["interlacing_holds"])
    return SELFTEST_VARIATIONAL_CASES, failures


def _selftest_fan(rng: np.random.Generator) -> tuple[int, int]:
    failures = 0
    for _ in range(SELFTEST_FAN_CASES):
        n = int(rng.integers(3, 21))
        A = rng.standard_normal((n, n))
        B = rng.standard_normal((n, n))
        failures += not fan_check(A, B, int(rng.integers(1, n + 1)))["holds"]
    return SELFTEST_FAN_CASES, failures


def _selftest_count_and_triangle(rng: np.random.Generator) -> tuple[int, int, int]:
    count_failures = 0
    triangle_failures = 0
    for _ in range(SELFTEST_FAN_CASES):
        n = int(rng.integers(3, 21))
        A = random_psd(rng, n)
        B = random_psd(rng, n)
        spectrum = singular_values(A)
        count_failures += count_ge(spectrum, 1.0) > weak_quasinorm(spectrum, 1.0) + 1e-12
        lhs = weak_quasinorm(singular_values(A + B), 1.0)
        rhs = 2 * (weak_quasinorm(spectrum, 1.0) + weak_quasinorm(singular_values(B), 1.0))
        triangle_failures += lhs > rhs * (1 + 1e-12)
    return SELFTEST_FAN_CASES, count_failures, triangle_failures


def _selftest_minmax(rng: np.random.Generator) -> tuple[int, int]:
    failures = 0
    for _ in range(SELFTEST_MINMAX_CASES):
        n = int(rng.integers(4, 13))
        K = random_psd(rng, n)
        j = int(rng.integers(0, n - 1))
        check = minmax_eigenvalue(K, j, rng, samples=50)
        tol = 1e-9 * max(1.0, abs(check["eigenvalue"]))
        exact_ok = abs(check["exact"] - check["eigenvalue"]) <= tol
        failures += not (exact_ok and check["sampled_min"] >= check["eigenvalue"] - tol)
    return SELFTEST_MINMAX_CASES, failures


def run_selftest(
    config: ExperimentConfig,
    on_case_start: CaseStartCallback | None = None,
    on_case_done: CaseDoneCallback | None = None,
) -> ModeResult:
    """Matrix-level property suites seeded from the config, plus oracle and monotonicity runs."""
    result = ModeResult()
    rng = np.random.default_rng(config.seed)

    def record(name: str, cases: int, failures: int) -> None:
        entry: dict[str, object] = {"suite": name, "cases": cases, "failures": int(failures)}
        result.cases.append(entry)
        if failures:
            result.violations.append(f"{name}: {failures}/{cases} failures")
        if on_case_done:
            on_case_done(name, entry)

    if on_case_start:
        on_case_start("variational")
    record("variational", *_selftest_variational(rng))
    if on_case_start:
        on_case_start("fan")
    record("fan", *_selftest_fan(rng))
    if on_case_start:
        on_case_start("count-quasinorm")
    cases, count_failures, triangle_failures = _selftest_count_and_triangle(rng)
    record("count-quasinorm", cases, count_failures)
    record("quasi-triangle", cases, triangle_failures)
    if on_case_start:
        on_case_start("minmax")
    record("minmax", *_selftest_minmax(rng))

    if on_case_start:
        on_case_start("square-well")
    L, N = SELFTEST_WELL_GRID
    grid = make_space_grid(1, L, N)
    mismatches = 0
    for depth in SELFTEST_WELL_DEPTHS:
        counted = negative_count(well(grid, depth, 1.0), 1.0)["count"]
        expected = square_well_count(depth, 1.0)
        if counted != expected:
            logger.warning(f"Square well V0={depth:g}: counted {counted}, oracle {expected}")
            mismatches += 1
    record("square-well", len(SELFTEST_WELL_DEPTHS), mismatches)

    if on_case_start:
        on_case_start("monotonicity")
    L, N = SELFTEST_SWEEP_GRID
    P = gaussian(make_space_grid(1, L, N), 5.0, 1.0)
    sweep = count_ge_one_sweep(P, 1.0)
    far = count_ge(assemble_K(P, 1.0, FAR_ENERGY, "all").spectrum(), 1.0)
    monotone = sweep["monotone_counts"] and sweep["monotone_eigenvalues"]
    record("monotonicity", 1, int(not monotone) + int(far != 0))
    return result


MODE_RUNNERS: dict[str, Callable[..., ModeResult]] = {
    "count": run_count,
    "verify": run_verify,
    "sweep": run_sweep,
    "quasinorm": run_quasinorm,
    "cwikel": run_cwikel,
    "selftest": run_selftest,
}


def _sort_key(case: dict[str, object]) -> str:
    return str(case.get("potential", case.get("suite", "")))


def run_config(
    config: ExperimentConfig,
    on_case_start: CaseStartCallback | None = None,
    on_case_done: CaseDoneCallback | None = None,
    write: bool = True,
) -> tuple[RunSummary, int]:
    """
    Run the configured mode and write summary.json, reports.csv and curves/*.tsv.

    Args:
        config: Validated configuration
        on_case_start: Optional callback(label) when a case starts
        on_case_done: Optional callback(label, case) when a case finishes
        write: Write artifacts to config.out_dir

    Returns:
        Tuple of (summary, exit status); the status is 1 when verify or selftest
        found violations and 0 otherwise
    """
    logger.info(f"Starting {config.mode} run (seed {config.seed})")
    result = MODE_RUNNERS[config.mode](config, on_case_start, on_case_done)

    reports = sorted(
        result.reports,
        key=lambda r: (
            r["theorem_id"],
            str(r["params"].get("potential")),
            r["params"].get("coupling", 1.0),
        ),
    )
    summary: RunSummary = {
        "schema_version": SCHEMA_VERSION,
        "mode": config.mode,
        "seed": config.seed,
        "config": config.as_dict(),
        "cases": sorted(result.cases, key=_sort_key),
        "reports": reports,
        "constants": fit_constants(reports) if reports else [],
        "checks": result.checks,
        "violations": sorted(result.violations),
    }

    if write:
        out_dir = Path(config.out_dir)
        save_summary(summary, out_dir)
        save_reports_csv(reports, out_dir)
        for name in sorted(result.curves):
            x, y = result.curves[name]
            save_curve(name, x, y, out_dir)

    failed = bool(result.violations) and config.mode in ("verify", "selftest")
    if result.violations:
        logger.warning(f"{len(result.violations)} violation(s) in {config.mode} run")
    return summary, 1 if failed else 0
