"""Potential construction, ingestion and transformation. Handles V >= 0 and v = V^{1/2}."""

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Literal

import numpy as np

from boundstate_lab.core.numgrid import SpaceGrid, make_space_grid, trig_interpolate
from boundstate_lab.exceptions import (
    InvalidParameterError,
    NegativeAmplitudeError,
    NegativeCouplingError,
    NegativeValueError,
    NonpositiveRError,
    SampleParseError,
    ShapeMismatchError,
)
from boundstate_lab.types import DecayTag
from boundstate_lab.utils import get_logger

logger = get_logger("core.potentials")

PotentialKind = Literal["well", "gaussian", "power", "bump"]

# Relative size of boundary samples above which a potential counts as truncated
TRUNCATION_LEVEL = 1e-10


@dataclass(frozen=True)
class PotentialSpec:
    """Analytic descriptor of a potential profile."""

    kind: PotentialKind
    V0: float
    a: float = 1.0  # support radius (well, bump)
    w: float = 1.0  # gaussian width
    beta: float = 2.0  # power-law decay exponent
    core: float = 1.0  # power-law core radius

    @property
    def decay_tag(self) -> DecayTag:
        if self.kind in ("well", "bump"):
            return "compact"
        if self.kind == "gaussian":
            return "gaussian"
        return "power"

    @property
    def label(self) -> str:
        if self.kind in ("well", "bump"):
            return f"{self.kind}(V0={self.V0:g},a={self.a:g})"
        if self.kind == "gaussian":
            return f"gaussian(V0={self.V0:g},w={self.w:g})"
        return f"power(V0={self.V0:g},beta={self.beta:g},core={self.core:g})"

    def profile(self, r: np.ndarray) -> np.ndarray:
        """Evaluate V as a function of |x|."""
        r = np.asarray(r, dtype=float)
        if self.kind == "well":
            return np.where(r <= self.a, self.V0, 0.0)
        if self.kind == "gaussian":
            return self.V0 * np.exp(-((r / self.w) ** 2))
        if self.kind == "power":
            return self.V0 * (1.0 + (r / self.core) ** 2) ** (-self.beta / 2)
        inside = r < self.a
        u = np.where(inside, (r / self.a) ** 2, 0.0)
        return np.where(inside, self.V0 * np.exp(1.0 - 1.0 / np.where(inside, 1.0 - u, 1.0)), 0.0)

    def scaled(self, factor: float) -> "PotentialSpec":
        return replace(self, V0=self.V0 * factor)

    def dilated(self, R: float, s: float, d: int) -> "PotentialSpec":
        """Descriptor of x -> R^{-2s} V(x/R)."""
        amplitude = self.V0 * R ** (-2 * s)
        if self.kind == "gaussian":
            return replace(self, V0=amplitude, w=self.w * R)
        if self.kind == "power":
            return replace(self, V0=amplitude, core=self.core * R)
        return replace(self, V0=amplitude, a=self.a * R)


@dataclass(frozen=True, eq=False)
class Potential:
    """Nonnegative sampled potential with coupling and decay metadata."""

    grid: SpaceGrid
    values: np.ndarray
    coupling: float = 1.0
    decay_tag: DecayTag = "sampled"
    spec: PotentialSpec | None = None
    truncated: bool = False
    name: str = field(default="sampled")

    @cached_property
    def sqrt(self) -> np.ndarray:
        """v = V^{1/2}, computed once."""
        return np.sqrt(self.values)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values)

    @property
    def label(self) -> str:
        if self.coupling == 1.0:
            return self.name
        return f"{self.coupling:g}*{self.name}"


def _check_truncation(grid: SpaceGrid, values: np.ndarray) -> bool:
    peak = float(np.max(values)) if values.size else 0.0
    if peak == 0.0:
        return False
    edge = np.abs(np.abs(grid.nodes) - grid.L) <= grid.h + 1e-12 * grid.L
    return bool(np.max(values[np.any(edge, axis=1)]) > TRUNCATION_LEVEL * peak)


def build(spec: PotentialSpec, grid: SpaceGrid) -> Potential:
    """
    Sample an analytic potential on a grid.

    Args:
        spec: Potential descriptor (well, gaussian, power or bump)
        grid: Target grid

    Returns:
        Potential with decay tag set from the descriptor

    Raises:
        NegativeAmplitudeError: If V0 < 0
    """
    if spec.V0 < 0:
        raise NegativeAmplitudeError(spec.V0)
    for name in ("a", "w", "core"):
        if getattr(spec, name) <= 0:
            raise InvalidParameterError(f"Width {name}", getattr(spec, name), "positive")
    values = spec.profile(grid.radius)
    values.setflags(write=False)
    return Potential(
        grid=grid,
        values=values,
        coupling=1.0,
        decay_tag=spec.decay_tag,
        spec=spec,
        truncated=_check_truncation(grid, values),
        name=spec.label,
    )


def well(grid: SpaceGrid, V0: float, a: float = 1.0) -> Potential:
    return build(PotentialSpec("well", V0, a=a), grid)


def gaussian(grid: SpaceGrid, V0: float, w: float = 1.0) -> Potential:
    return build(PotentialSpec("gaussian", V0, w=w), grid)


def power(grid: SpaceGrid, V0: float, beta: float, core: float = 1.0) -> Potential:
    return build(PotentialSpec("power", V0, beta=beta, core=core), grid)


def bump(grid: SpaceGrid, V0: float, a: float = 1.0) -> Potential:
    return build(PotentialSpec("bump", V0, a=a), grid)


def from_values(
    grid: SpaceGrid, values: np.ndarray, name: str = "sampled", decay_tag: DecayTag = "sampled"
) -> Potential:
    """Wrap raw nonnegative samples as a Potential."""
    values = np.array(values, dtype=float).ravel()
    if values.size != grid.size:
        raise ShapeMismatchError(grid.size, values.size)
    if np.any(values < 0):
        raise NegativeAmplitudeError(float(values.min()))
    values.setflags(write=False)
    return Potential(
        grid=grid,
        values=values,
        decay_tag=decay_tag,
        truncated=_check_truncation(grid, values),
        name=name,
    )


def scale_coupling(P: Potential, factor: float) -> Potential:
    """Multiply the potential by a coupling factor >= 0."""
    if factor < 0:
        raise NegativeCouplingError(factor)
    values = P.values * factor
    values.setflags(write=False)
    return replace(
        P,
        values=values,
        coupling=P.coupling * factor,
        spec=P.spec.scaled(factor) if P.spec is not None else None,
    )


def rescale_R(
    P: Potential,
    R: float,
    s: float,
    grid: SpaceGrid | None = None,
    method: Literal["auto", "trig", "nearest"] = "auto",
) -> Potential:
    """
    Dilate a potential: x -> R^{-2s} V(x/R), resampled on ``grid``.

    With an analytic descriptor the profile is re-evaluated exactly. Sampled potentials
    use nearest-node resampling, or trigonometric interpolation with ``method="trig"``.

    Raises:
        NonpositiveRError: If R <= 0
    """
    if not R > 0:
        raise NonpositiveRError(R)
    target = grid if grid is not None else P.grid
    if R == 1.0 and target == P.grid:
        return P

    if P.spec is not None and method == "auto":
        dilated = build(P.spec.dilated(R, s, P.grid.d), target)
        return replace(dilated, coupling=P.coupling)

    amplitude = R ** (-2 * s)
    if method == "trig":
        source = trig_interpolate(P.grid, P.values, target.axis / R).ravel()
        values = np.clip(source, 0.0, None) * amplitude
    else:
        scaled = target.nodes / R
        index = np.rint((scaled + P.grid.L) / P.grid.h).astype(int)
        inside = np.all((index >= 0) & (index < P.grid.N), axis=1)
        flat = np.ravel_multi_index(tuple(np.clip(index, 0, P.grid.N - 1).T), P.grid.shape)
        values = np.where(inside, P.values[flat], 0.0) * amplitude
    values.setflags(write=False)
    truncated = _check_truncation(target, values)
    if truncated:
        logger.warning(f"Dilation R={R} of {P.label} is truncated on L={target.L}")
    return Potential(
        grid=target,
        values=values,
        coupling=P.coupling,
        decay_tag=P.decay_tag,
        truncated=truncated,
        name=f"dilate(R={R:g},{P.name})",
    )


def save_samples(P: Potential, path: str | Path) -> Path:
    """Write samples one per line under a "# d L N" header."""
    path = Path(path)
    header = f"{P.grid.d} {P.grid.L!r} {P.grid.N}"
    np.savetxt(path, P.values, fmt="%.17g", header=header, comments="# ")
    logger.info(f"Saved {P.values.size} samples to {path}")
    return path


def load_samples(path: str | Path, grid: SpaceGrid | None = None) -> Potential:
    """
    Load a sampled potential written by save_samples.

    Args:
        path: Sample file (header "# d L N", one value per line, row-major)
        grid: Expected grid; built from the header when omitted

    Returns:
        Potential with decay tag "sampled"

    Raises:
        SampleParseError: If the header or a value cannot be parsed
        ShapeMismatchError: If the header or row count disagrees with the grid
        NegativeValueError: If a sample is negative
    """
    path = Path(path)
    try:
        with open(path) as f:
            header = f.readline()
    except OSError as e:
        raise SampleParseError(str(path), str(e)) from e

    fields = header.lstrip("#").split()
    if not header.startswith("#") or len(fields) != 3:
        raise SampleParseError(str(path), f"bad header {header.strip()!r}")
    try:
        d, half_width, n = int(fields[0]), float(fields[1]), int(fields[2])
    except ValueError as e:
        raise SampleParseError(str(path), f"bad header {header.strip()!r}") from e

    if grid is None:
        grid = make_space_grid(d, half_width, n)
    elif (d, n) != (grid.d, grid.N) or not math.isclose(half_width, grid.L):
        raise ShapeMismatchError((grid.d, grid.L, grid.N), (d, half_width, n))

    try:
        values = np.loadtxt(path, comments="#", ndmin=1, dtype=float)
    except ValueError as e:
        raise SampleParseError(str(path), str(e)) from e
    if values.size != grid.size:
        raise ShapeMismatchError(grid.size, values.size)
    if not np.all(np.isfinite(values)):
        raise SampleParseError(str(path), "non-finite sample")
    if np.any(values < 0):
        raise NegativeValueError(str(path), float(values.min()))

    logger.info(f"Loaded {values.size} samples from {path}")
    return from_values(grid, values, name=path.stem)
