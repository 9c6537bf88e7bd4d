"""Experiment configuration parsed from JSON into dataclasses.

Every parse failure raises :class:`~tfop.errors.ConfigError` naming the
offending field path (and the line and column for malformed JSON).
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import ConfigError, InvalidInputError
from .grid import GridSpec, SampledFunction
from .norms import parse_exponent
from .phase import PhaseSpec
from .weights import WeightSpec

LOGGER = logging.getLogger(__name__)

EXPERIMENTS = (
    "identity_suite",
    "reformulation_2_6",
    "bound_2_7",
    "schatten_decay",
    "kernel_identities",
    "norm_audits",
)
WEIGHT_NAMES = ("omega", "v", "omega_1", "omega_2")
FORMATS = ("json", "csv")


@dataclasses.dataclass(frozen=True)
class GridConfig:
    """Per-axis lattice of the base space ``R^n``.

    ``half_width = None`` selects the self-dual box ``L = sqrt(pi N / 2)``.
    """

    dim: int = 1
    points: int = 8
    half_width: float | None = None

    def spec(self, dim: int | None = None) -> GridSpec:
        d = self.dim if dim is None else dim
        if self.half_width is None:
            return GridSpec.self_dual(d, self.points)
        return GridSpec(d, self.half_width, self.points)


@dataclasses.dataclass(frozen=True)
class PhaseConfig:
    family: str = "bilinear"
    A: tuple[tuple[float, ...], ...] | None = None
    b: tuple[float, ...] | None = None
    eps: float = 0.0
    freqs: tuple[tuple[float, ...], ...] | None = None

    def spec(self, n: int) -> PhaseSpec:
        if self.family == "zero":
            return PhaseSpec.zero(n, n, n)
        if self.family == "bilinear":
            return PhaseSpec.bilinear(n)
        return PhaseSpec(
            self.family,  # type: ignore[arg-type]
            n,
            n,
            n,
            None if self.A is None else np.asarray(self.A, dtype=float),
            None if self.b is None else np.asarray(self.b, dtype=float),
            self.eps,
            None if self.freqs is None else np.asarray(self.freqs, dtype=float),
        )


@dataclasses.dataclass(frozen=True)
class AmplitudeConfig:
    """Gaussian ``exp(-|X - c|^2 / (2 s^2) + i <k, X>)`` on ``R^(N + m)``."""

    family: str = "gaussian"
    center: float | tuple[float, ...] = 0.0
    spread: float = 0.5
    modulation: float | tuple[float, ...] = 0.0
    scale: float = 1.0

    def sample(self, grid: GridSpec, spread: float | None = None) -> SampledFunction:
        s = self.spread if spread is None else spread
        c = np.broadcast_to(np.asarray(self.center, dtype=float), (grid.dim,))
        k = np.broadcast_to(np.asarray(self.modulation, dtype=float), (grid.dim,))
        X = grid.coords()
        r2 = np.sum((X - c) ** 2, axis=-1)
        vals = self.scale * np.exp(-r2 / (2.0 * s * s) + 1j * (X @ k))
        return SampledFunction(grid, vals)


@dataclasses.dataclass(frozen=True)
class WeightConfig:
    """Product of bracket powers; ``factors`` pairs a coordinate selector with an exponent."""

    factors: tuple[tuple[tuple[int, ...], float], ...] = ()
    constant: float = 1.0

    def spec(self, dim: int) -> WeightSpec:
        return WeightSpec(dim, self.factors, self.constant)


@dataclasses.dataclass(frozen=True)
class ExponentConfig:
    p: float = 2.0
    q: float = 2.0
    quadruple: tuple[float, ...] | None = None


@dataclasses.dataclass(frozen=True)
class OutputConfig:
    directory: str = "results"
    formats: tuple[str, ...] = ("json",)


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "identity_suite"
    grid: GridConfig = GridConfig()
    phase: PhaseConfig = PhaseConfig()
    amplitude: AmplitudeConfig = AmplitudeConfig()
    weights: Mapping[str, WeightConfig] = dataclasses.field(default_factory=dict)
    exponents: ExponentConfig = ExponentConfig()
    window_spread: float = 0.45
    seed: int = 0
    output: OutputConfig = OutputConfig()

    def weight(self, name: str, dim: int) -> WeightSpec:
        """Named weight on ``R^dim``; absent names are the unit weight."""
        w = self.weights.get(name)
        try:
            return WeightSpec.unit(dim) if w is None else w.spec(dim)
        except InvalidInputError as exc:
            raise ConfigError(f"weights.{name}: {exc}") from exc

    def with_seed(self, seed: int | None) -> "ExperimentConfig":
        return self if seed is None else dataclasses.replace(self, seed=seed)

    def to_dict(self) -> dict[str, Any]:
        """Plain JSON-compatible echo of the configuration."""
        out = dataclasses.asdict(self)
        # weights are echoed in the same shape the parser accepts
        out["weights"] = {
            k: {
                "factors": [{"selector": list(sel), "exponent": e} for sel, e in v.factors],
                "constant": v.constant,
            }
            for k, v in sorted(self.weights.items())
        }
        return _plain(out)


def _plain(obj: Any) -> Any:
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


# ---------------------------------------------------------------- parsing


def _expect_mapping(obj: Any, path: str) -> Mapping[str, Any]:
    if not isinstance(obj, Mapping):
        raise ConfigError(f"{path}: expected an object, got {type(obj).__name__}")
    return obj


def _reject_unknown(obj: Mapping[str, Any], allowed: Sequence[str], path: str) -> None:
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise ConfigError(f"{path}.{extra[0]}: unknown field")


def _number(value: Any, path: str, positive: bool = False) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{path}: expected a number, got a boolean")
    if isinstance(value, str):
        try:
            out = parse_exponent(value)
        except (InvalidInputError, ValueError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    elif isinstance(value, (int, float)):
        out = float(value)
    else:
        raise ConfigError(f"{path}: expected a number, got {type(value).__name__}")
    if math.isnan(out):
        raise ConfigError(f"{path}: NaN is not allowed")
    if positive and not out > 0:
        raise ConfigError(f"{path}: must be positive")
    return out


def _integer(value: Any, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{path}: must be at least {minimum}")
    return int(value)


def _vector(value: Any, path: str) -> float | tuple[float, ...]:
    if isinstance(value, list):
        return tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(value))
    return _number(value, path)


def _matrix(value: Any, path: str) -> tuple[tuple[float, ...], ...]:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise ConfigError(f"{path}: expected a list of rows")
    return tuple(tuple(_number(v, f"{path}[{i}][{j}]") for j, v in enumerate(r)) for i, r in enumerate(value))


def _grid(obj: Any, path: str) -> GridConfig:
    obj = _expect_mapping(obj, path)
    _reject_unknown(obj, ("dim", "points", "half_width"), path)
    dim = _integer(obj.get("dim", 1), f"{path}.dim", 1)
    points = _integer(obj.get("points", 8), f"{path}.points", 2)
    if points % 2:
        raise ConfigError(f"{path}.points: must be even")
    hw = obj.get("half_width")
    hw = None if hw is None else _number(hw, f"{path}.half_width", positive=True)
    return GridConfig(dim, points, hw)


def _phase(obj: Any, path: str) -> PhaseConfig:
    obj = _expect_mapping(obj, path)
    _reject_unknown(obj, ("family", "A", "b", "eps", "freqs"), path)
    family = obj.get("family", "bilinear")
    if family not in ("bilinear", "quadratic", "perturbed", "zero"):
        raise ConfigError(f"{path}.family: unknown phase family {family!r}")
    A = None if obj.get("A") is None else _matrix(obj["A"], f"{path}.A")
    b = obj.get("b")
    if b is not None:
        if not isinstance(b, list):
            raise ConfigError(f"{path}.b: expected a list")
        b = tuple(_number(v, f"{path}.b[{i}]") for i, v in enumerate(b))
    eps = _number(obj.get("eps", 0.0), f"{path}.eps")
    freqs = None if obj.get("freqs") is None else _matrix(obj["freqs"], f"{path}.freqs")
    return PhaseConfig(family, A, b, eps, freqs)


def _amplitude(obj: Any, path: str) -> AmplitudeConfig:
    obj = _expect_mapping(obj, path)
    _reject_unknown(obj, ("family", "center", "spread", "modulation", "scale"), path)
    family = obj.get("family", "gaussian")
    if family != "gaussian":
        raise ConfigError(f"{path}.family: unknown amplitude family {family!r}")
    return AmplitudeConfig(
        family,
        _vector(obj.get("center", 0.0), f"{path}.center"),
        _number(obj.get("spread", 0.5), f"{path}.spread", positive=True),
        _vector(obj.get("modulation", 0.0), f"{path}.modulation"),
        _number(obj.get("scale", 1.0), f"{path}.scale", positive=True),
    )


def _weight(obj: Any, path: str) -> WeightConfig:
    obj = _expect_mapping(obj, path)
    _reject_unknown(obj, ("factors", "constant"), path)
    raw = obj.get("factors", [])
    if not isinstance(raw, list):
        raise ConfigError(f"{path}.factors: expected a list")
    factors = []
    for i, item in enumerate(raw):
        p = f"{path}.factors[{i}]"
        item = _expect_mapping(item, p)
        _reject_unknown(item, ("selector", "exponent"), p)
        sel = item.get("selector")
        if not isinstance(sel, list) or not sel:
            raise ConfigError(f"{p}.selector: expected a non-empty list of axis indices")
        sel_t = tuple(_integer(v, f"{p}.selector[{j}]", 0) for j, v in enumerate(sel))
        factors.append((sel_t, _number(item.get("exponent", 0.0), f"{p}.exponent")))
    return WeightConfig(tuple(factors), _number(obj.get("constant", 1.0), f"{path}.constant", positive=True))


def _exponents(obj: Any, path: str) -> ExponentConfig:
    obj = _expect_mapping(obj, path)
    _reject_unknown(obj, ("p", "q", "quadruple"), path)
    vals = {}
    for key in ("p", "q"):
        v = _number(obj.get(key, 2.0), f"{path}.{key}")
        if v < 1:
            raise ConfigError(f"{path}.{key}: exponents must lie in [1, inf]")
        vals[key] = v
    quad = obj.get("quadruple")
    if quad is not None:
        if not isinstance(quad, list) or len(quad) != 4:
            raise ConfigError(f"{path}.quadruple: expected four exponents")
        quad = tuple(_number(v, f"{path}.quadruple[{i}]") for i, v in enumerate(quad))
        if min(quad) < 1:
            raise ConfigError(f"{path}.quadruple: exponents must lie in [1, inf]")
    return ExponentConfig(vals["p"], vals["q"], quad)


def _output(obj: Any, path: str) -> OutputConfig:
    obj = _expect_mapping(obj, path)
    _reject_unknown(obj, ("directory", "formats"), path)
    directory = obj.get("directory", "results")
    if not isinstance(directory, str) or not directory:
        raise ConfigError(f"{path}.directory: expected a non-empty string")
    formats = obj.get("formats", ["json"])
    if not isinstance(formats, list) or not formats:
        raise ConfigError(f"{path}.formats: expected a non-empty list")
    for i, f in enumerate(formats):
        if f not in FORMATS:
            raise ConfigError(f"{path}.formats[{i}]: unknown format {f!r}")
    return OutputConfig(directory, tuple(formats))


def parse_config(obj: Any) -> ExperimentConfig:
    """Validate a decoded JSON document and build the configuration."""
    obj = _expect_mapping(obj, "config")
    _reject_unknown(
        obj,
        ("experiment", "grid", "phase", "amplitude", "weights", "exponents", "window_spread", "seed", "output"),
        "config",
    )
    experiment = obj.get("experiment", "identity_suite")
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"config.experiment: unknown experiment {experiment!r}")
    weights_raw = _expect_mapping(obj.get("weights", {}), "config.weights")
    for name in weights_raw:
        if name not in WEIGHT_NAMES:
            raise ConfigError(f"config.weights.{name}: unknown weight name")
    weights = {name: _weight(w, f"config.weights.{name}") for name, w in weights_raw.items()}
    seed = _integer(obj.get("seed", 0), "config.seed", 0)
    if seed >= 2**64:
        raise ConfigError("config.seed: must fit in 64 bits")
    return ExperimentConfig(
        experiment=experiment,
        grid=_grid(obj.get("grid", {}), "config.grid"),
        phase=_phase(obj.get("phase", {}), "config.phase"),
        amplitude=_amplitude(obj.get("amplitude", {}), "config.amplitude"),
        weights=weights,
        exponents=_exponents(obj.get("exponents", {}), "config.exponents"),
        window_spread=_number(obj.get("window_spread", 0.45), "config.window_spread", positive=True),
        seed=seed,
        output=_output(obj.get("output", {}), "config.output"),
    )


def loads_config(text: str) -> ExperimentConfig:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_config(obj)


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return loads_config(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
