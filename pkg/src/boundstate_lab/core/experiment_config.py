"""Experiment configuration module. Handles loading run configs from TOML or JSON."""

import json
import math
import tomllib
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from boundstate_lab.constants import (
    DEFAULT_DELTA,
    DEFAULT_EPS,
    DEFAULT_OUT_DIR,
    MIN_EXPONENT,
    MIN_POINTS_PER_AXIS,
    RUN_MODES,
    SUPPORTED_DIMENSIONS,
    SWEEP_J_MAX,
    THEOREM_IDS,
)
from boundstate_lab.core.numgrid import SpaceGrid, make_space_grid
from boundstate_lab.core.potentials import Potential, PotentialSpec, build, load_samples
from boundstate_lab.exceptions import ConfigFileNotFoundError, ConfigInvalidError
from boundstate_lab.utils import get_logger

logger = get_logger("core.experiment_config")

POTENTIAL_KINDS = ("well", "gaussian", "power", "bump", "samples")
_SPEC_FIELDS = ("a", "w", "beta", "core")


@dataclass(frozen=True)
class PotentialEntry:
    """One [[potentials]] table: an analytic descriptor or a sample file."""

    kind: str
    V0: float = 1.0
    params: tuple[tuple[str, float], ...] = ()
    path: str | None = None

    @property
    def label(self) -> str:
        if self.kind == "samples":
            return f"samples({self.path})"
        return self.spec().label

    def spec(self) -> PotentialSpec:
        return PotentialSpec(self.kind, self.V0, **dict(self.params))  # type: ignore[arg-type]

    def build(self, grid: SpaceGrid) -> Potential:
        if self.kind == "samples":
            assert self.path is not None
            return load_samples(self.path, grid)
        return build(self.spec(), grid)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated run configuration."""

    mode: str
    d: int
    s: float
    L: float
    N: int
    potentials: tuple[PotentialEntry, ...]
    eps: float = DEFAULT_EPS
    delta: float = DEFAULT_DELTA
    seed: int = 0
    theorems: tuple[str, ...] = ()
    couplings: tuple[float, ...] = (1.0,)
    radii: tuple[float, ...] = (1.0, 2.0, 4.0)
    hermite_order: int | None = None
    j_max: int = SWEEP_J_MAX
    constants: tuple[tuple[str, float], ...] = ()
    out_dir: Path = DEFAULT_OUT_DIR
    source: str = field(default="<memory>", compare=False)

    def grid(self) -> SpaceGrid:
        return make_space_grid(self.d, self.L, self.N)

    def build_potentials(self, grid: SpaceGrid | None = None) -> list[Potential]:
        target = grid if grid is not None else self.grid()
        return [entry.build(target) for entry in self.potentials]

    def as_dict(self) -> dict[str, object]:
        """Plain description recorded in every summary."""
        return {
            "mode": self.mode,
            "d": self.d,
            "s": self.s,
            "eps": self.eps,
            "delta": self.delta,
            "seed": self.seed,
            "grid": {"L": self.L, "N": self.N},
            "sweep": {"j_max": self.j_max},
            "theorems": list(self.theorems),
            "couplings": list(self.couplings),
            "radii": list(self.radii),
            "hermite_order": self.hermite_order,
            "potentials": [entry.label for entry in self.potentials],
            "constants": dict(self.constants),
        }


def _detect_format(path: Path, text: str) -> str:
    """Detect config format from the suffix, falling back to the content."""
    suffix = path.suffix.lower()
    if suffix == ".toml":
        return "toml"
    if suffix == ".json":
        return "json"
    return "json" if text.lstrip().startswith("{") else "toml"


def _parse(path: Path, text: str) -> dict[str, Any]:
    fmt = _detect_format(path, text)
    try:
        data = tomllib.loads(text) if fmt == "toml" else json.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigInvalidError(str(path), f"{fmt} parse error: {e}") from e
    if not isinstance(data, dict):
        raise ConfigInvalidError(str(path), "top level must be a table")
    return data


def _number(raw: Mapping[str, Any], key: str, default: float, source: str) -> float:
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigInvalidError(source, f"'{key}' must be a number, got {value!r}")
    return float(value)


def _integer(raw: Mapping[str, Any], key: str, default: int, source: str) -> int:
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigInvalidError(source, f"'{key}' must be an integer, got {value!r}")
    return value


def _numbers(
    raw: Mapping[str, Any], key: str, default: tuple[float, ...], source: str
) -> tuple[float, ...]:
    values = raw.get(key, list(default))
    if not isinstance(values, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in values
    ):
        raise ConfigInvalidError(source, f"'{key}' must be a list of numbers")
    return tuple(float(v) for v in values)


def _parse_potential(raw: Any, index: int, base: Path, source: str) -> PotentialEntry:
    if not isinstance(raw, dict):
        raise ConfigInvalidError(source, f"potentials[{index}] must be a table")
    kind = raw.get("kind")
    if kind not in POTENTIAL_KINDS:
        raise ConfigInvalidError(
            source, f"potentials[{index}].kind must be one of {POTENTIAL_KINDS}, got {kind!r}"
        )
    if kind == "samples":
        path = raw.get("path")
        if not isinstance(path, str):
            raise ConfigInvalidError(source, f"potentials[{index}] needs a 'path' string")
        resolved = Path(path) if Path(path).is_absolute() else base / path
        return PotentialEntry(kind="samples", path=str(resolved))

    V0 = _number(raw, "V0", 1.0, source)
    if V0 < 0:
        raise ConfigInvalidError(source, f"potentials[{index}].V0 must be >= 0, got {V0}")
    params = []
    for name in _SPEC_FIELDS:
        if name in raw:
            value = _number(raw, name, 1.0, source)
            if value <= 0 and name != "beta":
                raise ConfigInvalidError(source, f"potentials[{index}].{name} must be > 0")
            params.append((name, value))
    unknown = set(raw) - {"kind", "V0", *_SPEC_FIELDS}
    if unknown:
        raise ConfigInvalidError(source, f"potentials[{index}] has unknown keys {sorted(unknown)}")
    return PotentialEntry(kind=kind, V0=V0, params=tuple(params))


def validate_config(config: ExperimentConfig) -> ExperimentConfig:
    """
    Check parameter ranges.

    Raises:
        ConfigInvalidError: If any parameter lies outside the supported range
    """
    source = config.source
    problems = []
    if config.mode not in RUN_MODES:
        problems.append(f"mode must be one of {RUN_MODES}, got {config.mode!r}")
    if config.d not in SUPPORTED_DIMENSIONS:
        problems.append(f"d must be one of {SUPPORTED_DIMENSIONS}, got {config.d}")
    if not config.s >= MIN_EXPONENT:
        problems.append(f"s must be >= {MIN_EXPONENT}, got {config.s}")
    if not (config.L > 0 and math.isfinite(config.L) and float(config.L).is_integer()):
        problems.append(f"grid.L must be a positive integer, got {config.L}")
    if config.N < MIN_POINTS_PER_AXIS or config.N % 2:
        problems.append(f"grid.N must be even and >= {MIN_POINTS_PER_AXIS}, got {config.N}")
    if not config.eps > 0:
        problems.append(f"eps must be > 0, got {config.eps}")
    if not config.delta > 0:
        problems.append(f"delta must be > 0, got {config.delta}")
    if config.seed < 0 or config.seed >= 2**64:
        problems.append(f"seed must be an unsigned 64-bit integer, got {config.seed}")
    if config.mode != "selftest" and not config.potentials:
        problems.append("at least one [[potentials]] entry is required")
    bad_ids = [t for t in config.theorems if t not in THEOREM_IDS]
    if bad_ids:
        problems.append(f"unknown theorem ids {bad_ids}")
    if any(c < 0 for c in config.couplings):
        problems.append("couplings must be >= 0")
    if any(r <= 0 for r in config.radii):
        problems.append("radii must be > 0")
    if config.j_max < 0:
        problems.append(f"sweep.j_max must be >= 0, got {config.j_max}")
    if config.hermite_order is not None and config.hermite_order < 1:
        problems.append(f"hermite_order must be >= 1, got {config.hermite_order}")

    if problems:
        raise ConfigInvalidError(source, "; ".join(problems))
    return config


def config_from_dict(
    data: Mapping[str, Any], source: str = "<memory>", base: Path | None = None
) -> ExperimentConfig:
    """Build and validate an ExperimentConfig from a parsed table."""
    base = base if base is not None else Path.cwd()
    grid = data.get("grid", {})
    sweep = data.get("sweep", {})
    if not isinstance(grid, dict) or not isinstance(sweep, dict):
        raise ConfigInvalidError(source, "[grid] and [sweep] must be tables")
    potentials = data.get("potentials", [])
    if not isinstance(potentials, list):
        raise ConfigInvalidError(source, "potentials must be an array of tables")
    theorems = data.get("theorems", [])
    if not isinstance(theorems, list) or not all(isinstance(t, str) for t in theorems):
        raise ConfigInvalidError(source, "theorems must be a list of strings")
    constants = data.get("constants", {})
    if not isinstance(constants, dict):
        raise ConfigInvalidError(source, "[constants] must be a table")
    order = data.get("hermite_order")

    config = ExperimentConfig(
        mode=str(data.get("mode", "count")),
        d=_integer(data, "d", 1, source),
        s=_number(data, "s", 1.0, source),
        L=_number(grid, "L", 40.0, source),
        N=_integer(grid, "N", 512, source),
        potentials=tuple(
            _parse_potential(raw, i, base, source) for i, raw in enumerate(potentials)
        ),
        eps=_number(data, "eps", DEFAULT_EPS, source),
        delta=_number(data, "delta", DEFAULT_DELTA, source),
        seed=_integer(data, "seed", 0, source),
        theorems=tuple(theorems),
        couplings=_numbers(data, "couplings", (1.0,), source),
        radii=_numbers(data, "radii", (1.0, 2.0, 4.0), source),
        hermite_order=None if order is None else _integer(data, "hermite_order", 0, source),
        j_max=_integer(sweep, "j_max", SWEEP_J_MAX, source),
        constants=tuple(
            sorted((str(k), _number(constants, k, 0.0, source)) for k in constants)
        ),
        out_dir=Path(str(data.get("out", DEFAULT_OUT_DIR))),
        source=source,
    )
    return validate_config(config)


def load_config(config_path: str | Path) -> ExperimentConfig:
    """
    Load an experiment config from a TOML or JSON file.

    Supports two formats:
    1. TOML (``.toml`` suffix, or any content not starting with "{")
    2. JSON (``.json`` suffix, or content starting with "{")

    Raises:
        ConfigFileNotFoundError: If the file doesn't exist
        ConfigInvalidError: If the file cannot be parsed or fails validation
    """
    path = Path(config_path)
    if not path.exists():
        raise ConfigFileNotFoundError(str(path))

    try:
        text = path.read_text(encoding="utf-8-sig")
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigInvalidError(str(path), str(e)) from e

    config = config_from_dict(_parse(path, text), source=str(path), base=path.parent)
    logger.info(f"Loaded {config.mode} config with {len(config.potentials)} potentials from {path}")
    return config


def parse_grid_override(tokens: list[str]) -> dict[str, float]:
    """Parse ``N=.. L=..`` tokens from the command line."""
    values: dict[str, float] = {}
    for token in tokens:
        key, sep, raw = token.partition("=")
        if not sep or key not in ("N", "L"):
            raise ConfigInvalidError("--grid", f"expected N=<int> or L=<int>, got {token!r}")
        try:
            values[key] = float(raw)
        except ValueError as e:
            raise ConfigInvalidError("--grid", f"bad value in {token!r}") from e
    if "N" in values and not values["N"].is_integer():
        raise ConfigInvalidError("--grid", f"N must be an integer, got {values['N']}")
    return values


def apply_overrides(
    config: ExperimentConfig,
    mode: str | None = None,
    seed: int | None = None,
    out_dir: str | Path | None = None,
    grid: Mapping[str, float] | None = None,
) -> ExperimentConfig:
    """Apply CLI overrides and re-validate."""
    changes: dict[str, Any] = {}
    if mode is not None:
        changes["mode"] = mode
    if seed is not None:
        changes["seed"] = seed
    if out_dir is not None:
        changes["out_dir"] = Path(out_dir)
    if grid:
        if "N" in grid:
            changes["N"] = int(grid["N"])
        if "L" in grid:
            changes["L"] = float(grid["L"])
    if not changes:
        return config
    logger.debug(f"Config overrides: {changes}")
    return validate_config(replace(config, **changes))
