"""Custom exceptions for the bound-state laboratory."""


class BoundStateLabError(Exception):
    """Base exception for bound-state laboratory errors."""


class InvalidParameterError(BoundStateLabError, ValueError):
    """Raised when a numerical parameter lies outside its admissible range."""

    def __init__(self, name: str, value: object, expected: str):
        self.name = name
        self.value = value
        self.expected = expected
        super().__init__(f"{name} must be {expected}, got {value}")


# Grids and quadrature


class GridError(BoundStateLabError):
    """Base exception for grid and quadrature errors."""


class OddNError(GridError):
    """Raised when the number of points per axis is odd or too small."""

    def __init__(self, n: int):
        self.n = n
        super().__init__(f"Points per axis must be even and >= 8, got {n}")


class BadDimensionError(GridError):
    """Raised for a dimension outside {1, 2}."""

    def __init__(self, d: int):
        self.d = d
        super().__init__(f"Unsupported dimension {d}, expected 1 or 2")


class NonpositiveLError(GridError):
    """Raised when the half-width of the grid is not positive."""

    def __init__(self, half_width: float):
        self.half_width = half_width
        super().__init__(f"Half-width must be positive, got {half_width}")


class NonEvenSymbolError(GridError):
    """Raised when a real symbol is not even, so its multiplier does not map reals to reals."""

    def __init__(self, deviation: float):
        self.deviation = deviation
        super().__init__(f"Symbol is not even on the frequency lattice (deviation {deviation:.2e})")


class NonfiniteSymbolError(GridError):
    """Raised when a frequency symbol is NaN or infinite on a grid node."""

    def __init__(self, count: int):
        self.count = count
        super().__init__(f"Frequency symbol is not finite on {count} node(s)")


class OverflowOrderError(GridError):
    """Raised when the Hermite recurrence loses orthonormality."""

    def __init__(self, order: int, deviation: float):
        self.order = order
        self.deviation = deviation
        super().__init__(f"Hermite basis of order {order} lost orthonormality ({deviation:.2e})")


# Potentials


class PotentialError(BoundStateLabError):
    """Base exception for potential construction errors."""


class NegativeAmplitudeError(PotentialError):
    """Raised when a potential is built with a negative amplitude."""

    def __init__(self, amplitude: float):
        self.amplitude = amplitude
        super().__init__(f"Potential amplitude must be >= 0, got {amplitude}")


class NegativeCouplingError(PotentialError):
    """Raised when a coupling factor is negative."""

    def __init__(self, coupling: float):
        self.coupling = coupling
        super().__init__(f"Coupling must be >= 0, got {coupling}")


class NonpositiveRError(PotentialError):
    """Raised when a dilation factor is not positive."""

    def __init__(self, radius: float):
        self.radius = radius
        super().__init__(f"Dilation factor must be positive, got {radius}")


class ShapeMismatchError(BoundStateLabError):
    """Raised when array shapes or sample counts do not match."""

    def __init__(self, expected: object, got: object):
        self.expected = expected
        self.got = got
        super().__init__(f"Shape mismatch: expected {expected}, got {got}")


class NegativeValueError(PotentialError):
    """Raised when a sampled potential contains a negative value."""

    def __init__(self, path: str, value: float):
        self.path = path
        self.value = value
        super().__init__(f"Negative potential sample {value} in {path}")


class SampleParseError(PotentialError):
    """Raised when a sample file cannot be parsed."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"Cannot parse potential samples at {path}: {reason}")


# Spectra


class SpectrumError(BoundStateLabError):
    """Base exception for matrix spectrum errors."""


class NotSymmetricError(SpectrumError):
    """Raised when a matrix expected to be symmetric is not."""

    def __init__(self, defect: float):
        self.defect = defect
        super().__init__(f"Matrix is not symmetric (relative defect {defect:.2e})")


class NotPSDError(SpectrumError):
    """Raised when a matrix expected to be positive semidefinite is not."""

    def __init__(self, min_eigenvalue: float):
        self.min_eigenvalue = min_eigenvalue
        super().__init__(f"Matrix is not positive semidefinite (min eigenvalue {min_eigenvalue})")


class NegativeEntryError(SpectrumError):
    """Raised when a quasinorm receives a negative spectral value."""

    def __init__(self, value: float):
        self.value = value
        super().__init__(f"Spectrum contains negative entry {value}")


# Operators


class OperatorError(BoundStateLabError):
    """Base exception for operator assembly errors."""


class UnsupportedExponentError(OperatorError):
    """Raised for a fractional exponent outside the supported range."""

    def __init__(self, s: float):
        self.s = s
        super().__init__(f"Exponent s={s} is below the supported range s >= 1/2")


class DivergentAtZeroError(OperatorError):
    """Raised when an operator is requested at an energy where it diverges."""

    def __init__(self, window: str, s: float, d: int):
        self.window = window
        self.s = s
        self.d = d
        super().__init__(f"Window '{window}' diverges at E=0 for s={s}, d={d}")


class UnresolvedWindowError(OperatorError):
    """Raised for the critical high window without a truncation acknowledgment."""

    def __init__(self, s: float, d: int):
        self.s = s
        self.d = d
        super().__init__(
            f"High window at s={s}=d/2 (d={d}) depends on the grid cutoff; "
            "pass acknowledge_truncation=True"
        )


class QuadratureUnresolvedError(OperatorError):
    """Raised when two quadrature refinement levels disagree."""

    def __init__(self, coarse: float, fine: float):
        self.coarse = coarse
        self.fine = fine
        super().__init__(f"Quadrature unresolved: {coarse} vs refined {fine}")


# Norms


class NormError(BoundStateLabError):
    """Base exception for norm evaluation errors."""


class NonIntegerLError(NormError):
    """Raised when unit cubes cannot tile the grid."""

    def __init__(self, half_width: float):
        self.half_width = half_width
        super().__init__(f"Unit-cube norms need an integer half-width, got {half_width}")


class TruncationUnresolvedError(NormError):
    """Raised when a Hermite expansion misses too much of the norm."""

    def __init__(self, order: int, residual: float, norm_sq: float):
        self.order = order
        self.residual = residual
        self.norm_sq = norm_sq
        super().__init__(
            f"Hermite order {order} leaves residual {residual:.3e} of norm² {norm_sq:.3e}"
        )


# Bounds


class BoundError(BoundStateLabError):
    """Base exception for bound evaluation errors."""


class TheoremNotApplicableError(BoundError):
    """Raised when a bound does not apply to the given (d, s)."""

    def __init__(self, theorem_id: str, d: int, s: float):
        self.theorem_id = theorem_id
        self.d = d
        self.s = s
        super().__init__(f"{theorem_id} does not apply to d={d}, s={s}")


class RhsInfiniteError(BoundError):
    """Raised when a right-hand side is not finite."""

    def __init__(self, theorem_id: str):
        self.theorem_id = theorem_id
        super().__init__(f"Right-hand side of {theorem_id} is not finite on this grid")


class WrongRegimeError(BoundError):
    """Raised when a comparison bound is used outside its regime."""

    def __init__(self, check: str, d: int, s: float):
        self.check = check
        self.d = d
        self.s = s
        super().__init__(f"{check} needs a different regime than d={d}, s={s}")


class UnresolvedDilationError(BoundError):
    """Raised when a dilated potential does not fit its grid."""

    def __init__(self, radius: float):
        self.radius = radius
        super().__init__(f"Dilation by R={radius} is truncated by the grid")


class NotCompactlySupportedError(BoundError):
    """Raised when a lower-bound check receives a potential without compact support."""

    def __init__(self, decay_tag: str):
        self.decay_tag = decay_tag
        super().__init__(f"Potential with decay '{decay_tag}' is not compactly supported")


class EmptySuiteError(BoundError):
    """Raised when a constant fit receives no reports."""

    def __init__(self) -> None:
        super().__init__("Cannot fit a constant on an empty suite")


class MixedSuiteError(BoundError):
    """Raised when a constant fit mixes theorems or (d, s) classes."""

    def __init__(self, keys: list[str]):
        self.keys = keys
        super().__init__(f"Suite mixes report classes: {', '.join(keys)}")


# Cwikel machinery


class CwikelError(BoundStateLabError):
    """Base exception for weak-ideal estimate errors."""


class ZeroInputError(CwikelError):
    """Raised when a lattice decomposition receives a zero function."""

    def __init__(self, which: str):
        self.which = which
        super().__init__(f"Lattice decomposition needs nonzero {which}")


class TooLargeError(CwikelError):
    """Raised when a dense operator would exceed the size cap."""

    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"Dense size {size} exceeds cap {cap}")


class ExponentOutOfRangeError(CwikelError):
    """Raised when a Lebesgue exponent is outside the admissible range."""

    def __init__(self, name: str, value: float, allowed: str):
        self.name = name
        self.value = value
        self.allowed = allowed
        super().__init__(f"{name}={value} outside {allowed}")


class EmptyFactorizationFamilyError(CwikelError):
    """Raised when no factorization of the symbol is supplied."""

    def __init__(self) -> None:
        super().__init__("At least one factorization g^2 = g_p g_p' is required")


# Configuration and reports


class ConfigError(BoundStateLabError):
    """Base exception for experiment configuration errors."""


class ConfigFileNotFoundError(ConfigError):
    """Raised when the configuration file doesn't exist."""

    def __init__(self, path: str):
        self.path = path
        super().__init__(f"Config file '{path}' not found")


class ConfigInvalidError(ConfigError):
    """Raised when the configuration cannot be parsed or validated."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"Invalid config {path}: {reason}")


class ReportError(BoundStateLabError):
    """Base exception for report storage errors."""


class ReportCorruptError(ReportError):
    """Raised when a stored summary is corrupted."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"Corrupted summary at {path}: {reason}")
