"""Norms and quasinorms on grid functions and radial symbols.

Weighted L2, decreasing rearrangement, weak Lorentz quasinorms, lattice mixed norms,
the L log L Luxemburg norm and the logarithmic oscillator calculus.
"""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import brentq

from boundstate_lab.constants import (
    DEFAULT_EPS,
    HERMITE_ORDER_1D,
    HERMITE_ORDER_2D,
    HERMITE_RESIDUAL_TOL,
)
from boundstate_lab.core.numgrid import HermiteBasis, SpaceGrid, hermite_basis, trig_interpolate
from boundstate_lab.exceptions import (
    InvalidParameterError,
    NonIntegerLError,
    ShapeMismatchError,
    TruncationUnresolvedError,
)
from boundstate_lab.utils import get_logger

logger = get_logger("core.norms")

WeightVariant = Literal["pureRadial", "japaneseLog", "oscillatorLog"]


@dataclass(frozen=True)
class WeightSpec:
    """Spatial weight of a weighted L2 norm."""

    variant: WeightVariant
    gamma: float = 0.0
    with_log: bool = False
    eps: float = DEFAULT_EPS

    def __post_init__(self) -> None:
        if self.gamma < 0:
            raise InvalidParameterError("Weight exponent", self.gamma, ">= 0")
        if self.variant == "oscillatorLog" and not self.eps > 0:
            raise InvalidParameterError("eps", self.eps, "positive")

    @classmethod
    def pure_radial(cls, gamma: float) -> "WeightSpec":
        return cls("pureRadial", gamma=gamma)

    @classmethod
    def japanese_log(cls, gamma: float, with_log: bool = True) -> "WeightSpec":
        return cls("japaneseLog", gamma=gamma, with_log=with_log)

    @classmethod
    def oscillator_log(cls, eps: float = DEFAULT_EPS) -> "WeightSpec":
        return cls("oscillatorLog", eps=eps)

    @property
    def label(self) -> str:
        if self.variant == "pureRadial":
            return f"|x|^{self.gamma:g}"
        if self.variant == "japaneseLog":
            suffix = " sqrt(1+ln<x>)" if self.with_log else ""
            return f"<x>^{self.gamma:g}{suffix}"
        return f"(ln h)^1/2 (ln ln h)^(1/2+{self.eps:g})"

    def squared(self, grid: SpaceGrid) -> np.ndarray:
        """w(x)^2 on the grid nodes (spatial variants only)."""
        r = grid.radius
        if self.variant == "pureRadial":
            return r ** (2 * self.gamma)
        if self.variant == "japaneseLog":
            bracket = np.sqrt(1.0 + r**2)
            out = bracket ** (2 * self.gamma)
            if self.with_log:
                out = out * (1.0 + np.log(bracket))
            return out
        raise InvalidParameterError("weight", self.variant, "pureRadial or japaneseLog on a grid")


def weighted_l2(grid: SpaceGrid, v: np.ndarray, weight: WeightSpec) -> float:
    """
    Squared weighted norm int w(x)^2 v(x)^2 dx.

    The oscillator weight is evaluated spectrally by hermite_log_norm.
    """
    v = np.asarray(v, dtype=float)
    if v.size != grid.size:
        raise ShapeMismatchError(grid.size, v.size)
    if weight.variant == "oscillatorLog":
        return hermite_log_norm(grid, v, weight.eps) ** 2
    return grid.integrate(weight.squared(grid) * v**2)


@dataclass(frozen=True, eq=False)
class RearrangedProfile:
    """Right-continuous nonincreasing step function with equal step widths."""

    heights: np.ndarray
    width: float

    def __call__(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        index = np.floor(t / self.width).astype(int)
        inside = (index >= 0) & (index < self.heights.size)
        return np.where(inside, self.heights[np.clip(index, 0, self.heights.size - 1)], 0.0)

    @property
    def support(self) -> float:
        return float(np.count_nonzero(self.heights) * self.width)

    def distribution(self, level: float) -> float:
        """Measure of {V* > level}."""
        return float(np.count_nonzero(self.heights > level) * self.width)

    def lp_norm(self, p: float) -> float:
        return float((np.sum(self.heights**p) * self.width) ** (1.0 / p))

    def integral(self) -> float:
        return float(np.sum(self.heights) * self.width)


def decreasing_rearrangement(grid: SpaceGrid, f: np.ndarray) -> RearrangedProfile:
    """V*(t) = sorted |f| with each sample occupying one cell measure."""
    heights = np.sort(np.abs(np.asarray(f, dtype=float)).ravel())[::-1]
    return RearrangedProfile(heights=heights, width=grid.cell_weight)


@dataclass(frozen=True)
class PowerTailSymbol:
    """Radial symbol |xi|^{-a} 1_{|xi| >= 1} on R^d."""

    a: float
    d: int

    @property
    def ball_constant(self) -> float:
        # measure of the unit ball
        return 2.0 if self.d == 1 else math.pi

    def distribution(self, level: float) -> float:
        if level >= 1.0:
            return 0.0
        if level <= 0.0:
            return math.inf
        return self.ball_constant * (level ** (-self.d / self.a) - 1.0)


def _weak_lp_symbol(g: PowerTailSymbol, p: float) -> float:
    ratio = g.d / g.a
    omega = g.ball_constant ** (1.0 / p)
    if math.isclose(ratio, p):
        return omega
    if ratio > p:
        return math.inf
    # t^{p-r} - t^p is maximal at t^r = (p - r)/p
    t = ((p - ratio) / p) ** (1.0 / ratio)
    return omega * (t ** (p - ratio) - t**p) ** (1.0 / p)


def weak_lp(f: np.ndarray | PowerTailSymbol, p: float, grid: SpaceGrid | None = None) -> float:
    """
    sup_t t mu{|f| > t}^{1/p}.

    On a grid the sup is attained just below a sample magnitude, so it is the max over
    sorted magnitudes h_i of h_i ((i+1) cellWeight)^{1/p}. Power-tail symbols are
    evaluated in closed form.
    """
    if p < 1:
        raise InvalidParameterError("p", p, ">= 1")
    if isinstance(f, PowerTailSymbol):
        return _weak_lp_symbol(f, p)
    if grid is None:
        raise InvalidParameterError("grid", None, "given for sampled functions")
    profile = decreasing_rearrangement(grid, f)
    if not profile.heights.size or profile.heights[0] == 0:
        return 0.0
    measure = np.arange(1, profile.heights.size + 1) * profile.width
    return float(np.max(profile.heights * measure ** (1.0 / p)))


def sequence_norm(values: np.ndarray, q: float, weak: bool = False) -> float:
    """l^q norm, or the weak l^{q,infty} quasinorm sup_j (j+1)^{1/q} a*_j."""
    a = np.sort(np.abs(np.asarray(values, dtype=float)).ravel())[::-1]
    if not a.size:
        return 0.0
    if weak:
        return float(np.max(np.arange(1, a.size + 1) ** (1.0 / q) * a))
    return float(np.sum(a**q) ** (1.0 / q))


def cube_index(grid: SpaceGrid) -> np.ndarray:
    """
    Flat index of the unit cube [m - 1/2, m + 1/2)^d holding each node.

    Requires integer L; the cube m = L wraps to m = -L on the torus.
    """
    if not float(grid.L).is_integer():
        raise NonIntegerLError(grid.L)
    L = int(grid.L)
    m = np.floor(grid.nodes + 0.5 + 1e-9 * grid.h).astype(int)
    m[m == L] = -L
    shifted = m + L
    return np.ravel_multi_index(tuple(shifted.T), (2 * L,) * grid.d)


def cube_lp_norms(grid: SpaceGrid, f: np.ndarray, p: float) -> np.ndarray:
    """||f chi_m||_{L^p} for every unit cube of the torus."""
    index = cube_index(grid)
    L = int(grid.L)
    magnitudes = np.abs(np.asarray(f, dtype=float)) ** p
    sums = np.bincount(index, weights=magnitudes, minlength=(2 * L) ** grid.d)
    return (sums * grid.cell_weight) ** (1.0 / p)


def mixed_norm(grid: SpaceGrid, f: np.ndarray, p: float, q: float, weak: bool = False) -> float:
    """
    Lattice norm of the cube L^p norms: l^q(L^p), or l^{q,infty}(L^p) when weak.

    Raises:
        NonIntegerLError: If L is not an integer
    """
    if p < 1 or q < 1:
        raise InvalidParameterError("Exponents (p, q)", (p, q), ">= 1")
    return sequence_norm(cube_lp_norms(grid, f, p), q, weak)


def orlicz_modular(grid: SpaceGrid, f: np.ndarray, kappa: float) -> float:
    """int Phi(|f|/kappa) with Phi(s) = s ln(2 + s)."""
    u = np.abs(np.asarray(f, dtype=float)) / kappa
    return grid.integrate(u * np.log(2.0 + u))


def orlicz_norm(grid: SpaceGrid, f: np.ndarray) -> float:
    """
    Luxemburg norm inf{kappa > 0 : int Phi(|f|/kappa) <= 1}.

    The modular is decreasing in kappa; a bracket is found by doubling and the root
    by Brent's method.
    """
    f = np.asarray(f, dtype=float)
    if not np.any(f):
        return 0.0

    def excess(kappa: float) -> float:
        return orlicz_modular(grid, f, kappa) - 1.0

    lo = hi = max(grid.integrate(np.abs(f)), np.finfo(float).tiny)
    while excess(hi) > 0:
        hi *= 2.0
    while excess(lo) <= 0:
        lo /= 2.0
    return float(brentq(excess, lo, hi, xtol=1e-14 * hi, rtol=1e-14))


@dataclass(frozen=True, eq=False)
class HermiteExpansion:
    """Coefficients of a grid function in the oscillator eigenbasis."""

    basis: HermiteBasis
    coefficients: np.ndarray
    norm_sq: float

    @property
    def residual(self) -> float:
        return float(self.norm_sq - np.sum(self.coefficients**2))

    @property
    def order(self) -> int:
        return self.basis.order


def default_hermite_order(d: int) -> int:
    return HERMITE_ORDER_1D if d == 1 else HERMITE_ORDER_2D


def hermite_expansion(grid: SpaceGrid, v: np.ndarray, M: int | None = None) -> HermiteExpansion:
    """
    Expand v in the oscillator basis up to total degree M.

    v is carried to the Gauss-Hermite nodes by trigonometric interpolation. Nodes outside
    [-L, L) see v = 0.
    """
    basis = hermite_basis(grid.d, M if M is not None else default_hermite_order(grid.d))
    samples = trig_interpolate(grid, v, basis.nodes)
    if grid.d == 1:
        norm_sq = float(np.sum(basis.weights * samples**2))
    else:
        norm_sq = float(basis.weights @ samples**2 @ basis.weights)
    return HermiteExpansion(basis=basis, coefficients=basis.coefficients(samples), norm_sq=norm_sq)


def log_weights(basis: HermiteBasis, eps: float) -> np.ndarray:
    """ln mu (ln ln mu)^{1+2 eps} for each basis index; at least e since mu >= e^e."""
    mu = basis.eigenvalues
    return np.log(mu) * np.log(np.log(mu)) ** (1 + 2 * eps)


def hermite_log_norm(
    grid: SpaceGrid,
    v: np.ndarray,
    eps: float = DEFAULT_EPS,
    M: int | None = None,
    allow_truncation: bool = False,
) -> float:
    """
    ||(ln h)^{1/2} (ln ln h)^{1/2+eps} v|| from the oscillator expansion.

    Args:
        grid: Grid of v
        v: Samples of v
        eps: Exponent excess, > 0
        M: Total degree of the expansion (defaults by dimension)
        allow_truncation: Return the truncated value instead of raising

    Raises:
        TruncationUnresolvedError: If ||v||^2 - sum c^2 exceeds 1e-6 ||v||^2
    """
    if not eps > 0:
        raise InvalidParameterError("eps", eps, "positive")
    expansion = hermite_expansion(grid, v, M)
    if expansion.norm_sq == 0.0:
        return 0.0
    residual = expansion.residual
    if residual > HERMITE_RESIDUAL_TOL * expansion.norm_sq:
        if not allow_truncation:
            raise TruncationUnresolvedError(expansion.order, residual, expansion.norm_sq)
        logger.warning(
            f"Hermite expansion of order {expansion.order} leaves residual {residual:.3e}"
        )
    weights = log_weights(expansion.basis, eps)
    return float(np.sqrt(np.sum(expansion.coefficients**2 * weights)))
