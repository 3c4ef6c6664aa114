"""Centralized type definitions for the bound-state laboratory."""

from typing import Literal, TypedDict

Window = Literal["all", "low", "high"]
Route = Literal["fourier-nystrom", "x-kernel"]
DecayTag = Literal["compact", "gaussian", "power", "sampled"]
SpectrumKind = Literal["eigenvalues-symmetric", "singular-values"]
TheoremId = Literal[
    "T1.1-nonint",
    "T1.1-int",
    "T1.2",
    "T1.5",
    "T1.6",
    "Bargmann",
    "D2-rearr",
    "D2-orlicz",
]


class BoundParams(TypedDict, total=False):
    """Inputs recorded on a report for replay."""

    d: int
    s: float
    eps: float | None
    coupling: float
    L: float
    N: int
    potential: str
    weight: str


class BoundReport(TypedDict):
    """One verified inequality instance."""

    schema_version: int
    theorem_id: str
    params: BoundParams
    lhs: float
    subspace_dim: int
    subspace_dim_binom: int
    rhs: float
    rhs_alternative: float | None
    ratio: float
    flags: list[str]


class NegativeCount(TypedDict):
    """Negative eigenvalue count of a direct discretization."""

    count: int
    tau: float
    near_threshold: list[float]
    lowest: float | None


class SweepPoint(TypedDict):
    """Birman-Schwinger count at one energy."""

    energy: float
    count: int
    top_eigenvalues: list[float]
    near_one: bool


class SweepResult(TypedDict):
    """Energy sweep of the Birman-Schwinger counter."""

    points: list[SweepPoint]
    monotone_counts: bool
    monotone_eigenvalues: bool
    plateau: int
    plateau_reached: bool
    flags: list[str]


class AnnulusContribution(TypedDict):
    """Contribution of one frequency annulus to the low-frequency trace."""

    index: int
    inner: float
    outer: float
    value: float
    split_far: float
    split_near: float


class LowTrace(TypedDict):
    """Projected low-frequency trace and its consistency values."""

    energy: float
    value: float
    refined_value: float
    matrix_trace: float | None
    subspace_dim: int
    annuli: list[AnnulusContribution]


class HighWeakNorm(TypedDict):
    """Weak-trace quasinorm of the high-frequency operator."""

    energy: float
    value: float
    value_at_zero: float
    dominated_by_zero_energy: bool
    trace_bound: float | None
    log_cutoff: float
    flags: list[str]


class VariationalCheck(TypedDict):
    """Matrix-level variational principle instance."""

    lhs: int
    rhs: int
    dim: int
    holds: bool
    interlacing_holds: bool


class FanCheck(TypedDict):
    """Fan's inequality instance on singular values."""

    m: int
    lhs: float
    rhs: float
    holds: bool


class MinMaxCheck(TypedDict):
    """Min-max characterization of one eigenvalue."""

    index: int
    eigenvalue: float
    exact: float
    sampled_min: float


class FitResult(TypedDict):
    """Empirical implied constant for one report class."""

    theorem_id: str
    d: int
    s: float
    c_emp: float
    n_reports: int


class StabilityCheck(TypedDict):
    """C_emp of one report class before and after a refinement."""

    theorem_id: str
    d: int
    s: float
    refinement: str
    c_coarse: float
    c_fine: float
    change: float
    tolerance: float
    stable: bool


class HeldOutCheck(TypedDict):
    """C_emp fitted on one potential family and applied to a disjoint one."""

    fit: FitResult
    n_held_out: int
    violations: list[str]


class ChainPoint(TypedDict):
    """Chain of reductions at one energy."""

    energy: float
    count: int
    subspace_dim: int
    projected_count: int
    projected_weak_norm: float
    trace_low: float
    weak_high: float
    rhs: float
    holds: bool


class ScalingPoint(TypedDict):
    """Negative count and RHS after dilation by R."""

    radius: float
    count: int
    rhs: float
    truncated: bool


class ScalingReport(TypedDict):
    """Dilation family with its invariance and monotonicity flags."""

    points: list[ScalingPoint]
    counts_invariant: bool
    rhs_nonincreasing: bool
    rhs_expected: str
    rhs_monotone: bool


class CountAgreement(TypedDict):
    """Direct count against the Birman-Schwinger plateau."""

    direct: int
    plateau: int
    agree: bool
    route: Route
    explained: bool
    near_threshold: list[float]
    flags: list[str]


class LowerBoundReport(TypedDict):
    """Lower-bound search over couplings."""

    subspace_dim: int
    counts: dict[str, int]
    first_coupling: float | None
    achieved: bool
    forms_increasing: bool
    quadratic_forms: list[list[float]]


class ANBNCheck(TypedDict):
    """Split f(x)g(-i grad) = A_n + B_n at one level."""

    level: int
    recombination_error: float
    hs_sq: float
    hs_bound: float
    trace_norm: float
    trace_curve: float
    fan_holds: bool


class ANBNScan(TypedDict):
    """A_n/B_n checks over a range of levels with fitted growth slopes."""

    checks: list[ANBNCheck]
    hs_slope: float
    trace_slope: float
    hs_predicted: float
    trace_predicted: float
    trace_constant: float


class SimonBound(TypedDict):
    """Singular-value decay against the weak lattice bound."""

    mu: list[float]
    curve: list[float]
    bound: list[float]
    c_fit: float
    constant: float
    violations: int
    slope: float
    predicted_slope: float
    decay_holds: bool


class EmbeddingCheck(TypedDict):
    """Lattice embedding of a weighted L2 function."""

    lhs: float
    rhs: float
    constant: float
    q: float


class ShellContribution(TypedDict):
    """Oscillator shell Lambda_k <= h < Lambda_{k+1}."""

    k: int
    norm: float
    weighted: float
    partial_sum: float
    representable: bool
    lhs: float
    holder_product: float
    holder_holds: bool


class Theorem17Check(TypedDict):
    """Weak L^{2,infty} estimate for f(x)g(-i grad)."""

    lhs: float
    rhs: float
    ratio: float
    log_norm: float
    factor: float
    exponents: list[float]
    shells: list[ShellContribution]


class RunSummary(TypedDict, total=False):
    """Summary of one CLI run stored as JSON."""

    schema_version: int
    mode: str
    seed: int
    config: dict[str, object]
    cases: list[dict[str, object]]
    reports: list[BoundReport]
    constants: list[FitResult]
    checks: dict[str, object]
    violations: list[str]
