"""Birman-Schwinger operators K_E = v((-Delta)^s - E)^{-1}v: assembly, counting and traces.

Matrices act on Euclidean vectors of weighted samples sqrt(cellWeight) u(x_i). The low
window |xi| < 1 is integrated over RadialAnnuli, the high window |xi| >= 1 is the lattice
sum up to the Nyquist frequency.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cache

import numpy as np
from scipy.linalg import norm as matrix_norm
from scipy.linalg import qr

from boundstate_lab.constants import (
    ANGULAR_NODES,
    DELTA_ONE,
    EXTRA_ANNULI,
    K_ANN,
    MIN_EXPONENT,
    NODES_PER_ANNULUS,
    PLATEAU_RUN,
    QUADRATURE_REFINE_TOL,
    RANK_TOL,
    SWEEP_J_MAX,
    TOP_EIGENVALUES,
)
from boundstate_lab.core.direct_solver import kinetic_symbol, potential_block
from boundstate_lab.core.numgrid import (
    RadialAnnuli,
    SpaceGrid,
    Symbol,
    apply_multiplier,
    make_annuli,
    multiplier_matrix,
)
from boundstate_lab.core.potentials import Potential
from boundstate_lab.core.spectra import Spectrum, count_ge, eigh_descending, weak_quasinorm
from boundstate_lab.exceptions import (
    DivergentAtZeroError,
    InvalidParameterError,
    QuadratureUnresolvedError,
    UnresolvedWindowError,
    UnsupportedExponentError,
)
from boundstate_lab.types import (
    AnnulusContribution,
    HighWeakNorm,
    LowTrace,
    Route,
    SweepPoint,
    SweepResult,
    Window,
)
from boundstate_lab.utils import get_logger

logger = get_logger("core.birman_schwinger")

# Terms of the Taylor remainder series used for |x.xi| <= 1
REMAINDER_TERMS = 25


def subspace_order(d: int, s: float) -> int:
    """n = floor(s - d/2); negative below the critical exponent."""
    return math.floor(s - d / 2 + 1e-12)


def multi_indices(d: int, n: int) -> list[tuple[int, ...]]:
    """All alpha with |alpha| <= n, ordered by total degree."""
    if n < 0:
        return []
    if d == 1:
        return [(k,) for k in range(n + 1)]
    return [(a, deg - a) for deg in range(n + 1) for a in range(deg, -1, -1)]


@dataclass(frozen=True, eq=False)
class MonomialSubspace:
    """Span of x^alpha v, |alpha| <= n, with an orthonormal basis of weighted vectors."""

    n: int
    d: int
    alphas: tuple[tuple[int, ...], ...]
    generators: np.ndarray
    Q: np.ndarray
    rank_tol: float

    @property
    def dim(self) -> int:
        return int(self.Q.shape[1])

    @property
    def binom_dim(self) -> int:
        return math.comb(self.d + self.n, self.d) if self.n >= 0 else 0

    def project(self, X: np.ndarray) -> np.ndarray:
        """Apply the complementary projector I - QQ^* to the columns of X."""
        if self.dim == 0:
            return X
        return X - self.Q @ (self.Q.T @ X)

    def projector(self) -> np.ndarray:
        size = self.generators.shape[0]
        return self.project(np.eye(size))

    def residual(self) -> float:
        """Largest relative norm of a generator left after projection."""
        if self.generators.shape[1] == 0:
            return 0.0
        norms = np.linalg.norm(self.generators, axis=0)
        left = np.linalg.norm(self.project(self.generators), axis=0)
        nonzero = norms > 0
        if not np.any(nonzero):
            return 0.0
        return float(np.max(left[nonzero] / norms[nonzero]))


def build_subspace(P: Potential, s: float, rank_tol: float = RANK_TOL) -> MonomialSubspace:
    """
    Orthonormal basis of F_n = span{x^alpha v : |alpha| <= n} by pivoted QR.

    The numerical rank counts pivots with |R_ii|^2 > rank_tol * ||A||_2^2, so the
    reported dimension may be smaller than binom(d+n, d).
    """
    grid = P.grid
    n = subspace_order(grid.d, s)
    alphas = tuple(multi_indices(grid.d, n))
    weighted = math.sqrt(grid.cell_weight) * P.sqrt
    columns = [weighted * np.prod(grid.nodes ** np.array(alpha), axis=1) for alpha in alphas]
    A = np.stack(columns, axis=1) if columns else np.zeros((grid.size, 0))

    scale = float(matrix_norm(A, 2)) if A.size else 0.0
    if scale == 0.0:
        Q = np.zeros((grid.size, 0))
    else:
        Q_full, R, _ = qr(A, mode="economic", pivoting=True)
        rank = int(np.count_nonzero(np.abs(np.diag(R)) ** 2 > rank_tol * scale**2))
        Q = Q_full[:, :rank]
    logger.debug(f"Subspace n={n} dim={Q.shape[1]} generators={len(alphas)}")
    return MonomialSubspace(n=n, d=grid.d, alphas=alphas, generators=A, Q=Q, rank_tol=rank_tol)


@dataclass(frozen=True, eq=False)
class BSMatrix:
    """Dense symmetric PSD discretization of a (windowed, projected) K_E."""

    matrix: np.ndarray
    energy: float
    s: float
    window: Window
    projected: bool
    route: Route
    flags: tuple[str, ...] = ()
    subspace: MonomialSubspace | None = None

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    def spectrum(self) -> Spectrum:
        return eigh_descending(self.matrix)


@cache
def default_annuli(d: int) -> RadialAnnuli:
    return make_annuli(K_ANN, NODES_PER_ANNULUS, d, ANGULAR_NODES)


def refined_annuli(annuli: RadialAnnuli) -> RadialAnnuli:
    """Next refinement level: more annuli and twice the nodes."""
    per_annulus = int(np.count_nonzero(annuli.annulus == 0))
    if annuli.d == 1:
        radial, angular = per_annulus // 2, ANGULAR_NODES
    else:
        radial, angular = NODES_PER_ANNULUS, per_annulus // NODES_PER_ANNULUS
    return make_annuli(annuli.count + EXTRA_ANNULI, 2 * radial, annuli.d, 2 * angular)


def high_symbol(s: float, E: float) -> Symbol:
    """(|xi|^{2s} - E)^{-1} 1_{|xi| >= 1} as a callable on |xi|."""

    def symbol(r: np.ndarray) -> np.ndarray:
        mask = r >= 1.0
        return np.where(mask, 1.0 / np.where(mask, r ** (2 * s) - E, 1.0), 0.0)

    return symbol


def taylor_remainder(t: np.ndarray, n: int) -> np.ndarray:
    """
    e^{it} minus its Taylor polynomial of degree n.

    For |t| <= 1 the remainder is summed as a series so that it keeps full relative
    accuracy as t -> 0. With n < 0 this is e^{it}.
    """
    full = np.exp(1j * t)
    if n < 0:
        return full
    term = np.ones_like(full)
    poly = term.copy()
    for j in range(1, n + 1):
        term = term * (1j * t) / j
        poly += term
    out = full - poly
    small = np.abs(t) <= 1.0
    if np.any(small):
        ts = t[small]
        term = (1j * ts) ** (n + 1) / math.factorial(n + 1)
        series = term.copy()
        for j in range(n + 2, n + 2 + REMAINDER_TERMS):
            term = term * (1j * ts) / j
            series += term
        out[small] = series
    return out


def _plane_wave_block(
    P: Potential, points: np.ndarray, subspace: MonomialSubspace | None
) -> np.ndarray:
    """Columns sqrt(cellWeight) v e^{i x.xi_q}, projected when a subspace is given."""
    grid = P.grid
    t = grid.nodes @ points.T
    n = subspace.n if subspace is not None else -1
    weighted = math.sqrt(grid.cell_weight) * P.sqrt
    block = weighted[:, None] * taylor_remainder(t, n)
    if subspace is not None:
        block = subspace.project(block)
    return block


def _low_weights(annuli: RadialAnnuli, s: float, E: float, d: int) -> np.ndarray:
    return annuli.weights * (2 * math.pi) ** (-d) / (annuli.radii ** (2 * s) - E)


def _check_energy(grid: SpaceGrid, s: float, E: float, window: Window, projected: bool) -> None:
    if E > 0:
        raise InvalidParameterError("Energy", E, "<= 0")
    if E < 0 or window == "high":
        return
    if not projected or subspace_order(grid.d, s) < 0:
        raise DivergentAtZeroError(window, s, grid.d)


def _low_matrix(
    P: Potential,
    s: float,
    E: float,
    annuli: RadialAnnuli,
    subspace: MonomialSubspace | None,
) -> np.ndarray:
    grid = P.grid
    weights = _low_weights(annuli, s, E, grid.d)
    K = np.zeros((grid.size, grid.size))
    # accumulate one annulus at a time to bound memory in d=2
    for k in range(annuli.count):
        mask = annuli.annulus == k
        block = _plane_wave_block(P, annuli.points[mask], subspace)
        K += ((block * weights[mask]) @ block.conj().T).real
    return K


def _high_matrix(P: Potential, s: float, E: float) -> np.ndarray:
    T = multiplier_matrix(P.grid, high_symbol(s, E))
    return P.sqrt[:, None] * T * P.sqrt[None, :]


def assemble_K(
    P: Potential,
    s: float,
    E: float,
    window: Window = "all",
    projected: bool = False,
    route: Route | None = None,
    annuli: RadialAnnuli | None = None,
    acknowledge_truncation: bool = False,
    subspace: MonomialSubspace | None = None,
) -> BSMatrix:
    """
    Assemble the Birman-Schwinger matrix at energy E.

    Args:
        P: Potential
        s: Fractional exponent (>= 1/2)
        E: Energy, E < 0; E = 0 only for the projected low/all windows or the high window
        window: "all", "low" (|xi| < 1) or "high" (|xi| >= 1)
        projected: Conjugate by the projector onto the complement of F_n
        route: "fourier-nystrom" (window all, unprojected; default there) or "x-kernel"
        annuli: Low-window quadrature; defaults to K_ANN annuli
        acknowledge_truncation: Accept the Nyquist-truncated high window at s = d/2
        subspace: Precomputed subspace for projection

    Returns:
        BSMatrix

    Raises:
        UnsupportedExponentError: If s < 1/2
        DivergentAtZeroError: If E = 0 where the operator is unbounded
        UnresolvedWindowError: If s = d/2, the high window is included and truncation is
            not acknowledged
    """
    grid = P.grid
    if s < MIN_EXPONENT:
        raise UnsupportedExponentError(s)
    _check_energy(grid, s, E, window, projected)
    if route is None:
        route = "fourier-nystrom" if window == "all" and not projected else "x-kernel"
    if route == "fourier-nystrom" and (window != "all" or projected):
        raise InvalidParameterError("route", route, "x-kernel outside the unprojected full window")

    flags: list[str] = []
    critical = math.isclose(s, grid.d / 2)
    if route == "x-kernel" and window != "low" and critical:
        if not acknowledge_truncation:
            raise UnresolvedWindowError(s, grid.d)
        flags.append("truncated-at-nyquist")
        logger.warning(f"High window at s=d/2 truncated at nyquist={grid.freq.nyquist:.4g}")

    if projected and subspace is None:
        subspace = build_subspace(P, s)

    if route == "fourier-nystrom":
        root = np.sqrt(1.0 / (kinetic_symbol(grid, s) - E))
        matrix = root[:, None] * potential_block(grid, P.values) * root[None, :]
    else:
        annuli = annuli if annuli is not None else default_annuli(grid.d)
        matrix = np.zeros((grid.size, grid.size))
        if window in ("all", "low"):
            matrix += _low_matrix(P, s, E, annuli, subspace if projected else None)
        if window in ("all", "high"):
            high = _high_matrix(P, s, E)
            if projected and subspace is not None:
                high = subspace.project(subspace.project(high).T).T
            matrix += high

    matrix = 0.5 * (matrix + matrix.conj().T)
    logger.debug(
        f"K_E E={E:.3g} s={s} window={window} projected={projected} route={route} "
        f"size={matrix.shape[0]}"
    )
    return BSMatrix(
        matrix=matrix,
        energy=E,
        s=s,
        window=window,
        projected=projected,
        route=route,
        flags=tuple(flags),
        subspace=subspace if projected else None,
    )


def sweep_energies(j_max: int = SWEEP_J_MAX) -> list[float]:
    """E_j = -2^{-j}, j = 0..j_max, increasing towards 0."""
    return [-(2.0**-j) for j in range(j_max + 1)]


def count_ge_one_sweep(
    P: Potential,
    s: float,
    energies: Sequence[float] | None = None,
    route: Route = "fourier-nystrom",
    delta_one: float = DELTA_ONE,
) -> SweepResult:
    """
    Count eigenvalues >= 1 of K_E along energies increasing to 0.

    Counts and every tracked eigenvalue must be nondecreasing in E. The plateau is the
    final count and is declared reached when the last PLATEAU_RUN counts agree.
    """
    energies = sorted(sweep_energies() if energies is None else energies)
    if any(E >= 0 for E in energies):
        raise InvalidParameterError("Sweep energies", energies, "negative")

    points: list[SweepPoint] = []
    spectra: list[np.ndarray] = []
    flags: list[str] = []
    for E in energies:
        spectrum = assemble_K(P, s, E, "all", route=route).spectrum()
        near = bool(np.any(np.abs(spectrum.values - 1.0) < delta_one))
        if near:
            logger.warning(f"{P.label}: eigenvalue within {delta_one:g} of 1 at E={E:.3g}")
            flags.append(f"near-one@{E:.6g}")
        points.append(
            {
                "energy": float(E),
                "count": count_ge(spectrum, 1.0),
                "top_eigenvalues": [float(x) for x in spectrum.values[:TOP_EIGENVALUES]],
                "near_one": near,
            }
        )
        spectra.append(spectrum.values)
        logger.debug(f"Sweep E={E:.3g}: count={points[-1]['count']}")

    counts = [p["count"] for p in points]
    monotone_counts = all(a <= b for a, b in zip(counts, counts[1:], strict=False))
    monotone_values = True
    for lower, upper in zip(spectra, spectra[1:], strict=False):
        tol = 1e-12 * max(1.0, float(upper[0]) if upper.size else 1.0)
        if np.any(lower - upper > tol):
            monotone_values = False
    if not (monotone_counts and monotone_values):
        flags.append("not-monotone")
        logger.warning(f"{P.label}: sweep is not monotone in E")

    reached = len(counts) >= PLATEAU_RUN and len(set(counts[-PLATEAU_RUN:])) == 1
    if not reached:
        flags.append("plateau-unresolved")
        logger.warning(f"{P.label}: no plateau over the last {PLATEAU_RUN} energies")
    else:
        logger.info(f"{P.label}: plateau {counts[-1]} at E={energies[-1]:.3g}")
    return {
        "points": points,
        "monotone_counts": monotone_counts,
        "monotone_eigenvalues": monotone_values,
        "plateau": counts[-1] if counts else 0,
        "plateau_reached": reached,
        "flags": flags,
    }


def _projected_weights(
    P: Potential, s: float, E: float, annuli: RadialAnnuli, subspace: MonomialSubspace
) -> np.ndarray:
    """W_q ||Pi^perp e^{ix.xi_q} v||^2 per quadrature node."""
    weights = _low_weights(annuli, s, E, P.grid.d)
    out = np.zeros(annuli.weights.size)
    for k in range(annuli.count):
        mask = annuli.annulus == k
        block = _plane_wave_block(P, annuli.points[mask], subspace)
        out[mask] = weights[mask] * np.sum(np.abs(block) ** 2, axis=0)
    return out


def low_trace_diagnostics(
    P: Potential,
    s: float,
    E: float = 0.0,
    annuli: RadialAnnuli | None = None,
    subspace: MonomialSubspace | None = None,
) -> list[AnnulusContribution]:
    """
    Per-annulus contributions to the projected low-frequency trace with split bounds.

    On the annulus sigma_{k+1} < |xi| < sigma_k the far part is
    sum_{|alpha|<=n} sigma_k^{d-2s+2|alpha|} ||x^alpha v 1_{|x|>1/sigma_k}||^2 and the
    near part sigma_k^{d-2s+2n+2} ||x|^{n+1} v 1_{|x|<=1/sigma_k}||^2.
    """
    grid = P.grid
    d = grid.d
    annuli = annuli if annuli is not None else default_annuli(d)
    subspace = subspace if subspace is not None else build_subspace(P, s)
    n = subspace.n
    per_node = _projected_weights(P, s, E, annuli, subspace)

    out: list[AnnulusContribution] = []
    for k in range(annuli.count):
        sigma = float(annuli.edges[k])
        far_mask = grid.radius > 1.0 / sigma
        split_far = 0.0
        for alpha in subspace.alphas:
            monomial = np.prod(grid.nodes ** np.array(alpha), axis=1)
            moment = grid.integrate(np.where(far_mask, monomial**2 * P.values, 0.0))
            split_far += sigma ** (d - 2 * s + 2 * sum(alpha)) * moment
        near = grid.integrate(np.where(far_mask, 0.0, grid.radius ** (2 * n + 2) * P.values))
        out.append(
            {
                "index": k,
                "inner": float(annuli.edges[k + 1]),
                "outer": sigma,
                "value": float(np.sum(per_node[annuli.annulus == k])),
                "split_far": float(split_far),
                "split_near": float(sigma ** (d - 2 * s + 2 * n + 2) * near),
            }
        )
    return out


def trace_low_projected(
    P: Potential,
    s: float,
    E: float = 0.0,
    annuli: RadialAnnuli | None = None,
    refine: bool = True,
) -> LowTrace:
    """
    Trace of the projected low-frequency operator from its integral form.

    tr = (2pi)^{-d} int_{|xi|<1} ||Pi^perp e^{ix.xi} v||^2 (|xi|^{2s} - E)^{-1} dxi.
    The projector is applied to the Taylor remainder of e^{ix.xi} past degree n, which
    it annihilates only up to the rank tolerance. For E < 0 the matrix trace of the
    assembled operator at the same quadrature is returned alongside.

    Raises:
        DivergentAtZeroError: If E = 0 and s < d/2
        QuadratureUnresolvedError: If the refined quadrature differs by more than 1e-4
    """
    grid = P.grid
    _check_energy(grid, s, E, "low", projected=True)
    annuli = annuli if annuli is not None else default_annuli(grid.d)
    subspace = build_subspace(P, s)

    annulus_rows = low_trace_diagnostics(P, s, E, annuli, subspace)
    value = float(sum(row["value"] for row in annulus_rows))
    refined = value
    if refine and not P.is_zero:
        fine = refined_annuli(annuli)
        refined = float(np.sum(_projected_weights(P, s, E, fine, subspace)))
        scale = max(abs(refined), np.finfo(float).tiny)
        if abs(value - refined) > QUADRATURE_REFINE_TOL * scale:
            raise QuadratureUnresolvedError(value, refined)

    matrix_trace = None
    if E < 0:
        K = assemble_K(P, s, E, "low", projected=True, annuli=annuli, subspace=subspace)
        matrix_trace = float(np.trace(K.matrix))
    logger.debug(f"Low trace E={E:.3g} s={s}: {value:.6g} (refined {refined:.6g})")
    return {
        "energy": float(E),
        "value": value,
        "refined_value": refined,
        "matrix_trace": matrix_trace,
        "subspace_dim": subspace.dim,
        "annuli": annulus_rows,
    }


def high_trace_constant(d: int, s: float) -> float:
    """C_s = int_{|xi|>=1} |xi|^{-2s} dxi; infinite at and below s = d/2."""
    if s <= d / 2:
        return math.inf
    if d == 1:
        return 2.0 / (2 * s - 1)
    return 2 * math.pi / (2 * s - 2)


def weak_norm_high(
    P: Potential, s: float, E: float = 0.0, acknowledge_truncation: bool = False
) -> HighWeakNorm:
    """
    Weak-trace quasinorm sup_j (j+1) lambda_j of the high-frequency operator.

    For E < 0 the eigenvalues are also compared one by one with the E = 0 operator,
    which dominates them. The trace bound (2pi)^{-d} C_s ||v||^2 is reported for s > d/2;
    ln of the Nyquist frequency is reported in every case.
    """
    grid = P.grid
    K = assemble_K(P, s, E, "high", acknowledge_truncation=acknowledge_truncation)
    spectrum = K.spectrum()
    value = weak_quasinorm(spectrum, 1.0)

    if E < 0:
        at_zero = assemble_K(P, s, 0.0, "high", acknowledge_truncation=True).spectrum()
        value_at_zero = weak_quasinorm(at_zero, 1.0)
        tol = 1e-12 * max(1.0, at_zero.top)
        dominated = bool(np.all(spectrum.values <= at_zero.values + tol))
    else:
        value_at_zero, dominated = value, True

    constant = high_trace_constant(grid.d, s)
    mass = grid.integrate(P.values)
    trace_bound = None if math.isinf(constant) else (2 * math.pi) ** (-grid.d) * constant * mass
    if not dominated:
        logger.warning(f"{P.label}: high window at E={E} not dominated by E=0")
    return {
        "energy": float(E),
        "value": value,
        "value_at_zero": value_at_zero,
        "dominated_by_zero_energy": dominated,
        "trace_bound": trace_bound,
        "log_cutoff": math.log(grid.freq.nyquist),
        "flags": list(K.flags),
    }


def quadratic_forms(
    P: Potential,
    s: float,
    E: float,
    vectors: np.ndarray,
    annuli: RadialAnnuli | None = None,
) -> np.ndarray:
    """
    <u, K_E u> for each column u, with K_E the x-kernel operator on the full window.

    Works matrix-free: the low window sums |<v u, e^{ix.xi_q}>|^2 over the annuli and the
    high window applies the Fourier multiplier.
    """
    if E >= 0:
        raise InvalidParameterError("Energy", E, "negative")
    grid = P.grid
    annuli = annuli if annuli is not None else default_annuli(grid.d)
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float).T).T
    weights = _low_weights(annuli, s, E, grid.d)
    forms = np.zeros(vectors.shape[1])
    for k in range(annuli.count):
        mask = annuli.annulus == k
        block = _plane_wave_block(P, annuli.points[mask], None)
        overlaps = np.abs(block.conj().T @ vectors) ** 2
        forms += weights[mask] @ overlaps
    symbol = high_symbol(s, E)
    for j in range(vectors.shape[1]):
        u = P.sqrt * vectors[:, j]
        forms[j] += float(u @ apply_multiplier(grid, symbol, u))
    return forms
