"""Symmetric eigensolves, singular values, counting and weak Schatten quasinorms."""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, orth, svdvals

from boundstate_lab.constants import COUNT_TOL, PSD_TOL, SYMMETRY_TOL
from boundstate_lab.exceptions import (
    InvalidParameterError,
    NegativeEntryError,
    NotPSDError,
    NotSymmetricError,
    ShapeMismatchError,
)
from boundstate_lab.types import FanCheck, MinMaxCheck, SpectrumKind, VariationalCheck
from boundstate_lab.utils import get_logger

logger = get_logger("core.spectra")


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues or singular values sorted in decreasing order."""

    values: np.ndarray
    kind: SpectrumKind = "eigenvalues-symmetric"
    vectors: np.ndarray | None = None

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def top(self) -> float:
        return float(self.values[0]) if self.values.size else 0.0


def as_spectrum(
    values: np.ndarray | list[float], kind: SpectrumKind = "singular-values"
) -> Spectrum:
    """Wrap an arbitrary list as a descending Spectrum."""
    array = np.sort(np.asarray(values, dtype=float))[::-1]
    return Spectrum(values=array, kind=kind)


def symmetry_defect(M: np.ndarray) -> float:
    scale = max(float(np.linalg.norm(M)), np.finfo(float).tiny)
    return float(np.linalg.norm(M - M.conj().T)) / scale


def eigh_descending(M: np.ndarray, vectors: bool = False, tol: float = SYMMETRY_TOL) -> Spectrum:
    """
    Full spectrum of a symmetric (Hermitian) matrix in decreasing order.

    Raises:
        NotSymmetricError: If the relative symmetry defect exceeds tol
    """
    M = np.asarray(M)
    defect = symmetry_defect(M)
    if defect > tol:
        raise NotSymmetricError(defect)
    if vectors:
        w, v = eigh(M)
        return Spectrum(values=w[::-1].copy(), vectors=v[:, ::-1].copy())
    w = eigh(M, eigvals_only=True)
    return Spectrum(values=w[::-1].copy())


def singular_values(A: np.ndarray) -> Spectrum:
    if A.size == 0:
        return Spectrum(values=np.zeros(0), kind="singular-values")
    return Spectrum(values=svdvals(A), kind="singular-values")


def _nonnegative(S: Spectrum, tol: float = PSD_TOL) -> np.ndarray:
    values = S.values
    if values.size == 0:
        return values
    floor = -tol * max(1.0, float(np.max(np.abs(values))))
    if np.min(values) < floor:
        raise NegativeEntryError(float(np.min(values)))
    return np.clip(values, 0.0, None)


def weak_quasinorm(S: Spectrum, p: float) -> float:
    """
    sup_j (j+1)^{1/p} s_j over the list.

    Raises:
        NegativeEntryError: If an entry is negative beyond rounding
    """
    if p < 1:
        raise InvalidParameterError("p", p, ">= 1")
    values = _nonnegative(S)
    if values.size == 0:
        return 0.0
    ranks = np.arange(1, values.size + 1, dtype=float)
    return float(np.max(ranks ** (1.0 / p) * values))


def schatten_norm(S: Spectrum, p: float) -> float:
    """(sum s_j^p)^{1/p}; p=1 is the trace norm, p=2 the Hilbert-Schmidt norm."""
    values = _nonnegative(S)
    if values.size == 0:
        return 0.0
    return float(np.sum(values**p) ** (1.0 / p))


def count_ge(S: Spectrum, r: float) -> int:
    """Number of entries >= r."""
    return int(np.count_nonzero(S.values >= r))


def projector_complement(F: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis Q of span(F) and the complementary projector I - QQ^*."""
    Q = orth(F) if F.size else np.zeros((n, 0))
    return Q, np.eye(n) - Q @ Q.conj().T


def variational_check(K: np.ndarray, F: np.ndarray, tol: float = COUNT_TOL) -> VariationalCheck:
    """
    Check N_{>=1}(K) <= dim F + N_{>=1}(P K P) with P the projector onto F's complement.

    Counts use the threshold 1 - tol on both sides. Also checks the interlacing
    lambda_{D+k}(K) <= lambda_k(P K P).

    Raises:
        NotPSDError: If K has a negative eigenvalue beyond tolerance
    """
    K = np.asarray(K)
    spectrum = eigh_descending(K)
    scale = max(1.0, spectrum.top)
    if spectrum.values.size and spectrum.values[-1] < -PSD_TOL * scale:
        raise NotPSDError(float(spectrum.values[-1]))

    Q, P = projector_complement(np.asarray(F), K.shape[0])
    dim = Q.shape[1]
    projected = eigh_descending(P @ K @ P)
    threshold = 1.0 - tol
    lhs = count_ge(spectrum, threshold)
    rhs = dim + count_ge(projected, threshold)

    shifted = spectrum.values[dim:]
    interlacing = bool(np.all(shifted <= projected.values[: shifted.size] + tol * scale))
    holds = lhs <= rhs
    if not (holds and interlacing):
        logger.warning(f"Variational check failed: lhs={lhs} rhs={rhs} interlacing={interlacing}")
    return {
        "lhs": lhs,
        "rhs": rhs,
        "dim": dim,
        "holds": holds,
        "interlacing_holds": interlacing,
    }


def fan_check(A: np.ndarray, B: np.ndarray, m: int, tol: float = COUNT_TOL) -> FanCheck:
    """
    Check mu_m(A+B) <= mu_k(A) + mu_k(B) with k = ceil(m/2), indices from 1.

    Raises:
        ShapeMismatchError: If A and B differ in shape
    """
    if A.shape != B.shape:
        raise ShapeMismatchError(A.shape, B.shape)
    if m < 1:
        raise InvalidParameterError("Singular value index", m, ">= 1")

    def pick(values: np.ndarray, index: int) -> float:
        return float(values[index - 1]) if index <= values.size else 0.0

    half = (m + 1) // 2
    lhs = pick(svdvals(A + B), m)
    rhs = pick(svdvals(A), half) + pick(svdvals(B), half)
    return {"m": m, "lhs": lhs, "rhs": rhs, "holds": lhs <= rhs + tol * max(1.0, rhs)}


def minmax_eigenvalue(
    K: np.ndarray, j: int, rng: np.random.Generator, samples: int = 200
) -> MinMaxCheck:
    """
    Min-max value of the j-th (0-based) largest eigenvalue.

    The exact value removes the top-j eigenvectors; the sampled value is the minimum,
    over random j-dimensional subspaces S, of max over unit u orthogonal to S of <u, Ku>.
    Every sample bounds lambda_j from above.
    """
    spectrum = eigh_descending(K, vectors=True)
    assert spectrum.vectors is not None
    n = K.shape[0]

    def top_on_complement(S: np.ndarray) -> float:
        _, P = projector_complement(S, n)
        basis = orth(P) if n > S.shape[1] else np.zeros((n, 0))
        if basis.shape[1] == 0:
            return float("-inf")
        return float(eigh(basis.T @ K @ basis, eigvals_only=True)[-1])

    exact = top_on_complement(spectrum.vectors[:, :j])
    sampled = min(top_on_complement(rng.standard_normal((n, j))) for _ in range(samples))
    return {
        "index": j,
        "eigenvalue": float(spectrum.values[j]),
        "exact": exact,
        "sampled_min": sampled,
    }


def random_psd(rng: np.random.Generator, n: int, rank: int | None = None) -> np.ndarray:
    """Random PSD matrix with spectrum spread around 1."""
    rank = n if rank is None else rank
    X = rng.standard_normal((n, rank)) / np.sqrt(rank)
    scale = rng.uniform(0.5, 3.0)
    return scale * (X @ X.T)
