"""Uniform torus grids, Fourier multipliers, annular quadrature and Hermite functions.

Grid functions are flat arrays in row-major axis order. Frequency symbols are either
callables evaluated on |xi| (FFT layout, shape ``(N,)*d``), arrays of that shape, or scalars.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass
from functools import cache, cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_hermite

from boundstate_lab.constants import (
    ANGULAR_NODES,
    E_TO_E,
    HERMITE_GRAM_TOL,
    K_ANN,
    MIN_POINTS_PER_AXIS,
    NODES_PER_ANNULUS,
    SUPPORTED_DIMENSIONS,
    SYMMETRY_TOL,
)
from boundstate_lab.exceptions import (
    BadDimensionError,
    InvalidParameterError,
    NonEvenSymbolError,
    NonfiniteSymbolError,
    NonpositiveLError,
    OddNError,
    OverflowOrderError,
    ShapeMismatchError,
)
from boundstate_lab.utils import get_logger

logger = get_logger("core.numgrid")

Symbol = Callable[[np.ndarray], np.ndarray]
SymbolLike = Symbol | np.ndarray | float


@dataclass(frozen=True)
class FreqGrid:
    """Dual lattice xi_k = (pi/L) k of a SpaceGrid, stored in FFT order."""

    d: int
    L: float
    N: int

    @property
    def spacing(self) -> float:
        return math.pi / self.L

    @property
    def nyquist(self) -> float:
        return math.pi * self.N / (2 * self.L)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @cached_property
    def axis(self) -> np.ndarray:
        return self.spacing * np.fft.fftfreq(self.N, 1.0 / self.N)

    @cached_property
    def points(self) -> np.ndarray:
        """Frequency vectors, shape (N^d, d), flat FFT layout."""
        mesh = np.meshgrid(*([self.axis] * self.d), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @cached_property
    def norms(self) -> np.ndarray:
        """|xi_k| on the FFT layout, shape (N,)*d."""
        return np.linalg.norm(self.points, axis=1).reshape(self.shape)

    @property
    def cell_weight(self) -> float:
        return self.spacing**self.d


@dataclass(frozen=True)
class SpaceGrid:
    """Uniform grid on the torus [-L, L)^d."""

    d: int
    L: float
    N: int

    @property
    def h(self) -> float:
        return 2 * self.L / self.N

    @property
    def cell_weight(self) -> float:
        return self.h**self.d

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def size(self) -> int:
        return self.N**self.d

    @cached_property
    def axis(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.N)

    @cached_property
    def nodes(self) -> np.ndarray:
        """Node coordinates, shape (N^d, d), row-major."""
        mesh = np.meshgrid(*([self.axis] * self.d), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @cached_property
    def radius(self) -> np.ndarray:
        return np.linalg.norm(self.nodes, axis=1)

    @cached_property
    def freq(self) -> FreqGrid:
        return FreqGrid(self.d, self.L, self.N)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(values) * self.cell_weight)

    def inner(self, u: np.ndarray, w: np.ndarray) -> complex:
        return complex(np.vdot(u, w) * self.cell_weight)

    def norm(self, u: np.ndarray) -> float:
        return float(np.sqrt(np.sum(np.abs(u) ** 2) * self.cell_weight))


def make_space_grid(d: int, L: float, N: int) -> SpaceGrid:
    """
    Build a uniform grid on [-L, L)^d with N points per axis.

    Args:
        d: Dimension, 1 or 2
        L: Half-width
        N: Points per axis (even, at least 8)

    Returns:
        SpaceGrid with its paired FreqGrid available as ``grid.freq``

    Raises:
        BadDimensionError, NonpositiveLError, OddNError
    """
    if d not in SUPPORTED_DIMENSIONS:
        raise BadDimensionError(d)
    if not L > 0:
        raise NonpositiveLError(L)
    if N % 2 != 0 or N < MIN_POINTS_PER_AXIS:
        raise OddNError(N)
    grid = SpaceGrid(d=d, L=float(L), N=int(N))
    logger.debug(f"Grid d={d} L={L} N={N} h={grid.h:.4g} nyquist={grid.freq.nyquist:.4g}")
    return grid


def evaluate_symbol(grid: SpaceGrid, m: SymbolLike) -> np.ndarray:
    """Evaluate a frequency symbol on the FreqGrid, FFT layout."""
    if callable(m):
        values = np.asarray(m(grid.freq.norms), dtype=float)
    elif np.isscalar(m):
        values = np.full(grid.shape, float(m))  # type: ignore[arg-type]
    else:
        values = np.asarray(m, dtype=float)
    if values.shape != grid.shape:
        raise ShapeMismatchError(grid.shape, values.shape)
    bad = int(np.count_nonzero(~np.isfinite(values)))
    if bad:
        raise NonfiniteSymbolError(bad)
    return values


def mirror_symbol(values: np.ndarray) -> np.ndarray:
    """Symbol table at -xi in FFT layout; the Nyquist index maps to itself."""
    out = np.asarray(values)
    for axis in range(out.ndim):
        out = np.roll(np.flip(out, axis=axis), 1, axis=axis)
    return out


def symbol_odd_part(values: np.ndarray) -> float:
    """max |m(xi) - m(-xi)| relative to max |m|."""
    scale = max(float(np.max(np.abs(values))), np.finfo(float).tiny)
    return float(np.max(np.abs(values - mirror_symbol(values)))) / scale


def apply_multiplier(grid: SpaceGrid, m: SymbolLike, u: np.ndarray) -> np.ndarray:
    """
    Apply the Fourier multiplier m(-i grad) to a grid function.

    Real input gives real output, which requires m(xi) = m(-xi) on the lattice
    (every radial symbol qualifies). Complex input accepts any real symbol.

    Raises:
        NonEvenSymbolError: If u is real and m is not even
    """
    values = evaluate_symbol(grid, m)
    u = np.asarray(u)
    if u.size != grid.size:
        raise ShapeMismatchError(grid.size, u.size)
    real_input = np.isrealobj(u)
    if real_input:
        deviation = symbol_odd_part(values)
        if deviation > SYMMETRY_TOL:
            raise NonEvenSymbolError(deviation)
    out = np.fft.ifftn(values * np.fft.fftn(u.reshape(grid.shape))).ravel()
    if real_input:
        return out.real
    return out


@cache
def _difference_index(grid: SpaceGrid) -> np.ndarray:
    idx = np.arange(grid.N)
    diff = (idx[:, None] - idx[None, :]) % grid.N
    if grid.d == 1:
        return diff
    stacked = diff[:, None, :, None] * grid.N + diff[None, :, None, :]
    return stacked.reshape(grid.size, grid.size)


def circulant_matrix(grid: SpaceGrid, table: np.ndarray) -> np.ndarray:
    """Dense matrix M[i, j] = table[(i - j) mod N] (per axis) on flat indices."""
    table = np.asarray(table)
    if table.shape != grid.shape:
        raise ShapeMismatchError(grid.shape, table.shape)
    return table.ravel()[_difference_index(grid)]


def multiplier_matrix(grid: SpaceGrid, m: SymbolLike) -> np.ndarray:
    """Dense matrix of m(-i grad) in the nodal basis.

    Real symmetric for even symbols. Otherwise complex Hermitian, as for a symbol
    cut to frequency cubes whose mirror images fall in another class.
    """
    values = evaluate_symbol(grid, m)
    kernel = np.fft.ifftn(values)
    if symbol_odd_part(values) <= SYMMETRY_TOL:
        kernel = kernel.real
    return circulant_matrix(grid, kernel)


def interpolation_matrix(grid: SpaceGrid, y: np.ndarray) -> np.ndarray:
    """
    Trigonometric interpolation from the grid axis to the points y (one axis).

    The Nyquist mode is split symmetrically so real samples interpolate to real values.
    Points outside [-L, L) get zero rows.
    """
    y = np.asarray(y, dtype=float)
    xi = grid.freq.axis
    phase = np.outer(y - grid.axis[0], xi)
    basis = np.exp(1j * phase)
    nyquist = grid.N // 2
    basis[:, nyquist] = np.cos(phase[:, nyquist])
    forward = np.fft.fft(np.eye(grid.N), axis=0) / grid.N
    matrix = (basis @ forward).real
    matrix[(y < -grid.L) | (y >= grid.L)] = 0.0
    return matrix


def trig_interpolate(grid: SpaceGrid, u: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Interpolate a real grid function onto the tensor grid y^d, shape (len(y),)*d."""
    matrix = interpolation_matrix(grid, y)
    values = np.asarray(u, dtype=float).reshape(grid.shape)
    if grid.d == 1:
        return matrix @ values
    return matrix @ values @ matrix.T


@dataclass(frozen=True, eq=False)
class RadialAnnuli:
    """Quadrature of the punctured unit ball split into annuli e^{-k-1} < |xi| < e^{-k}."""

    d: int
    edges: np.ndarray
    points: np.ndarray
    weights: np.ndarray
    radii: np.ndarray
    annulus: np.ndarray

    @property
    def count(self) -> int:
        return len(self.edges) - 1

    @property
    def measure(self) -> float:
        return float(np.sum(self.weights))

    def integrate_radial(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.sum(self.weights * f(self.radii)))


def make_annuli(
    K_ann: int = K_ANN,
    nodes_per_annulus: int = NODES_PER_ANNULUS,
    d: int = 1,
    angular_nodes: int = ANGULAR_NODES,
) -> RadialAnnuli:
    """
    Build Gauss-Legendre quadrature on each annulus sigma_{k+1} < |xi| < sigma_k.

    In d=1 each annulus is the pair of intervals +-[sigma_{k+1}, sigma_k); in d=2 the
    angle uses the periodic trapezoid rule with ``angular_nodes`` points.
    """
    if d not in SUPPORTED_DIMENSIONS:
        raise BadDimensionError(d)
    if K_ann < 1:
        raise InvalidParameterError("K_ann", K_ann, ">= 1")

    t, w = leggauss(nodes_per_annulus)
    edges = np.exp(-np.arange(K_ann + 1, dtype=float))
    points, weights, radii, annulus = [], [], [], []
    for k in range(K_ann):
        outer, inner = edges[k], edges[k + 1]
        half = 0.5 * (outer - inner)
        r = inner + half * (t + 1.0)
        wr = half * w
        if d == 1:
            points.append(np.concatenate([r, -r])[:, None])
            weights.append(np.concatenate([wr, wr]))
            radii.append(np.concatenate([r, r]))
            annulus.append(np.full(2 * r.size, k))
        else:
            theta = 2 * math.pi * np.arange(angular_nodes) / angular_nodes
            rr, tt = np.meshgrid(r, theta, indexing="ij")
            ww = np.repeat(wr * r * (2 * math.pi / angular_nodes), angular_nodes)
            points.append(np.stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()], axis=1))
            weights.append(ww)
            radii.append(rr.ravel())
            annulus.append(np.full(rr.size, k))

    logger.debug(f"Annuli K={K_ann} nodes={nodes_per_annulus} d={d}")
    return RadialAnnuli(
        d=d,
        edges=edges,
        points=np.concatenate(points),
        weights=np.concatenate(weights),
        radii=np.concatenate(radii),
        annulus=np.concatenate(annulus),
    )


def hermite_functions(n_levels: int, x: np.ndarray) -> np.ndarray:
    """
    Normalized Hermite functions psi_0..psi_{n_levels-1} at x, shape (n_levels, len(x)).

    Runs the three-term recurrence on the polynomial factor and carries the Gaussian
    factor as a per-point log scale, renormalizing whenever the factor grows large.
    """
    x = np.asarray(x, dtype=float).ravel()
    out = np.zeros((n_levels, x.size))
    log_scale = -0.5 * x**2
    prev = np.zeros_like(x)
    cur = np.full_like(x, math.pi**-0.25)
    for n in range(n_levels):
        out[n] = cur * np.exp(log_scale)
        nxt = math.sqrt(2.0 / (n + 1)) * x * cur - math.sqrt(n / (n + 1)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > 1e150
        if np.any(big):
            factor = np.abs(cur[big])
            cur[big] /= factor
            prev[big] /= factor
            log_scale[big] += np.log(factor)
    return out


@dataclass(frozen=True, eq=False)
class HermiteBasis:
    """Harmonic-oscillator eigenbasis up to total degree ``order`` with its quadrature."""

    d: int
    order: int
    nodes: np.ndarray
    weights: np.ndarray
    table: np.ndarray
    gram_deviation: float

    @property
    def c_d(self) -> float:
        return E_TO_E / self.d

    @cached_property
    def multi_indices(self) -> np.ndarray:
        """All alpha with |alpha| <= order, by total degree then lexicographic."""
        if self.d == 1:
            return np.arange(self.order + 1)[:, None]
        pairs = [(a, deg - a) for deg in range(self.order + 1) for a in range(deg, -1, -1)]
        return np.array(pairs, dtype=int)

    @cached_property
    def degrees(self) -> np.ndarray:
        return self.multi_indices.sum(axis=1)

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues c_d(2|alpha| + d) of h on each basis element."""
        return self.c_d * (2 * self.degrees + self.d).astype(float)

    def coefficients(self, values: np.ndarray) -> np.ndarray:
        """Expansion coefficients from samples on the tensor Gauss-Hermite nodes."""
        if self.d == 1:
            return self.table @ (self.weights * values)
        weighted = self.weights[:, None] * values * self.weights[None, :]
        full = self.table @ weighted @ self.table.T
        alpha = self.multi_indices
        return full[alpha[:, 0], alpha[:, 1]]

    def evaluate(self, alpha: tuple[int, ...], grid: SpaceGrid) -> np.ndarray:
        """Sample psi_alpha on the nodes of a SpaceGrid."""
        factors = [hermite_functions(a + 1, grid.axis)[a] for a in alpha]
        if len(factors) == 1:
            return factors[0]
        return np.outer(factors[0], factors[1]).ravel()

    def synthesize(self, coefficients: np.ndarray, grid: SpaceGrid) -> np.ndarray:
        """Evaluate sum_alpha c_alpha psi_alpha on the nodes of a SpaceGrid."""
        values = hermite_functions(self.order + 1, grid.axis)
        if self.d == 1:
            return values.T @ coefficients
        full = np.zeros((self.order + 1, self.order + 1))
        alpha = self.multi_indices
        full[alpha[:, 0], alpha[:, 1]] = coefficients
        return (values.T @ full @ values).ravel()


def hermite_basis(d: int, M: int) -> HermiteBasis:
    """
    Build the oscillator basis of total degree <= M on 2(M+1) Gauss-Hermite nodes per axis.

    Quadrature weights are the Christoffel numbers 1/sum_n psi_n(x_i)^2, which absorb
    the Gaussian weight and stay bounded for large nodes.

    Raises:
        BadDimensionError, OverflowOrderError
    """
    if d not in SUPPORTED_DIMENSIONS:
        raise BadDimensionError(d)
    if M < 1:
        raise InvalidParameterError("Hermite order", M, ">= 1")

    n_nodes = 2 * (M + 1)
    nodes, _ = roots_hermite(n_nodes)
    full = hermite_functions(n_nodes, nodes)
    weights = 1.0 / np.sum(full**2, axis=0)
    table = full[: M + 1]
    gram = (table * weights) @ table.T
    deviation = float(np.max(np.abs(gram - np.eye(M + 1))))
    if not deviation <= HERMITE_GRAM_TOL:
        raise OverflowOrderError(M, deviation)
    logger.debug(f"Hermite basis d={d} M={M} nodes={n_nodes} gram deviation={deviation:.2e}")
    return HermiteBasis(
        d=d, order=M, nodes=nodes, weights=weights, table=table, gram_deviation=deviation
    )
