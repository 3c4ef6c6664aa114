"""Direct Fourier-Galerkin discretization of H_s = (-Delta)^s - V and negative-eigenvalue counts."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh
from scipy.optimize import brentq

from boundstate_lab.constants import KINETIC_NOISE_FLOOR, MIN_EXPONENT
from boundstate_lab.core.numgrid import SpaceGrid, circulant_matrix
from boundstate_lab.core.potentials import Potential
from boundstate_lab.exceptions import InvalidParameterError, UnsupportedExponentError
from boundstate_lab.types import NegativeCount
from boundstate_lab.utils import get_logger

logger = get_logger("core.direct_solver")


@dataclass(frozen=True, eq=False)
class GalerkinHs:
    """Dense Hermitian matrix of H_s in the plane-wave basis (FFT order)."""

    matrix: np.ndarray
    kinetic: np.ndarray
    s: float
    grid: SpaceGrid
    potential: str

    @property
    def symmetry_defect(self) -> float:
        scale = max(float(np.linalg.norm(self.matrix)), np.finfo(float).tiny)
        return float(np.linalg.norm(self.matrix - self.matrix.conj().T)) / scale

    def default_tau(self) -> float:
        return KINETIC_NOISE_FLOOR * max(1.0, float(np.max(self.kinetic)))


def kinetic_symbol(grid: SpaceGrid, s: float) -> np.ndarray:
    """|xi_k|^{2s} on the flat FFT layout."""
    return grid.freq.norms.ravel() ** (2 * s)


def potential_block(grid: SpaceGrid, values: np.ndarray) -> np.ndarray:
    """Multiplication by V in the plane-wave basis: C[k, l] = V_hat[k - l]."""
    table = np.fft.fftn(np.asarray(values, dtype=float).reshape(grid.shape)) / grid.size
    return circulant_matrix(grid, table)


def assemble_direct(grid: SpaceGrid, P: Potential, s: float) -> GalerkinHs:
    """
    Assemble diag(|xi_k|^{2s}) - Conv(V_hat) on the plane-wave basis.

    Args:
        grid: Discretization grid (must be the grid of P)
        P: Potential
        s: Fractional exponent

    Returns:
        GalerkinHs

    Raises:
        UnsupportedExponentError: If s < 1/2
    """
    if s < MIN_EXPONENT:
        raise UnsupportedExponentError(s)
    kinetic = kinetic_symbol(grid, s)
    matrix = -potential_block(grid, P.values)
    matrix[np.diag_indices_from(matrix)] += kinetic
    logger.debug(f"Assembled H_s of size {matrix.shape[0]} for {P.label}, s={s}")
    return GalerkinHs(matrix=matrix, kinetic=kinetic, s=s, grid=grid, potential=P.label)


def count_negative(H: GalerkinHs, tau: float | None = None) -> NegativeCount:
    """
    Count eigenvalues below -tau.

    Eigenvalues in [-tau, 0) are returned separately and never counted.
    """
    if tau is None:
        tau = H.default_tau()
    if not tau > 0:
        raise InvalidParameterError("tau", tau, "positive")
    eigenvalues = eigvalsh(H.matrix)
    count = int(np.count_nonzero(eigenvalues < -tau))
    near = [float(e) for e in eigenvalues if -tau <= e < 0]
    if near:
        logger.warning(f"{H.potential}: {len(near)} eigenvalue(s) within tau={tau:.2e} of 0")
    return {
        "count": count,
        "tau": float(tau),
        "near_threshold": near,
        "lowest": float(eigenvalues[0]) if eigenvalues.size else None,
    }


def negative_count(P: Potential, s: float, tau: float | None = None) -> NegativeCount:
    """Assemble and count in one step on the potential's own grid."""
    return count_negative(assemble_direct(P.grid, P, s), tau)


def square_well_count(V0: float, a: float = 1.0) -> int:
    """
    Bound states of -d²/dx² - V0 1_{|x|<=a} on the line from the matching conditions.

    Even states solve z tan z = sqrt(z0² - z²), odd states -z cot z = sqrt(z0² - z²),
    with z0 = a sqrt(V0). Roots are bracketed on each branch of tan and counted. A
    root at z = z0 is a zero-energy resonance, not a bound state, so a well with
    2 z0 / pi an integer k has exactly k bound states.
    """
    if V0 < 0:
        raise InvalidParameterError("Well depth", V0, ">= 0")
    z0 = a * math.sqrt(V0)
    if z0 == 0:
        return 0

    def even(z: float) -> float:
        return z * math.sin(z) - math.sqrt(max(z0 * z0 - z * z, 0.0)) * math.cos(z)

    def odd(z: float) -> float:
        return -z * math.cos(z) - math.sqrt(max(z0 * z0 - z * z, 0.0)) * math.sin(z)

    # strictly below z0, so the decay rate sqrt(z0^2 - z^2) stays positive
    z_max = z0 * (1 - 1e-12)
    roots: list[float] = []
    for branch, f in ((0, even), (1, odd)):
        # f has at most one root in each interval [j pi/2, (j+1) pi/2) with j of matching parity
        j = branch
        while j * math.pi / 2 < z_max:
            lo = j * math.pi / 2 + 1e-14
            hi = min((j + 1) * math.pi / 2, z_max)
            if lo < hi and f(lo) * f(hi) < 0:
                roots.append(float(brentq(f, lo, hi)))
            j += 2

    closed_form = math.ceil(2 * z0 / math.pi)
    if len(roots) != closed_form:
        logger.warning(
            f"Square well z0={z0:.6g}: {len(roots)} roots, closed form gives {closed_form}"
        )
    logger.debug(f"Square well z0={z0:.6g}: roots {[round(z, 6) for z in sorted(roots)]}")
    return len(roots)
