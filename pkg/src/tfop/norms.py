"""Mixed-norm functionals on sampled STFT arrays and amplitudes.

Every norm here is a nested reduction of a non-negative array: ``L^p`` levels
become weighted sums and ``sup`` levels become lattice maxima. The grid has no
null sets, so essential suprema are plain maxima.
"""

from __future__ import annotations

import dataclasses
import itertools
import logging
import math
from typing import Callable, Literal, Sequence

import numpy as np

from .errors import FitnessError, InvalidInputError
from .grid import GridSpec, SampledFunction, dft_axes, require_same_grid
from .stft import StftArray, lp_reduce, stft
from .weights import WeightSpec, WindowSpec, weight_on_phase_space

LOGGER = logging.getLogger(__name__)

INF = math.inf


def parse_exponent(p: float | str) -> float:
    """Accept numbers or the strings ``"inf"``/``"infinity"``."""
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity", "oo"):
            return INF
        p = float(p)
    p = float(p)
    if not p >= 1.0:
        raise InvalidInputError(f"exponents must lie in [1, inf], got {p}")
    return p


def conjugate_exponent(p: float) -> float:
    if p == 1.0:
        return INF
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


@dataclasses.dataclass(frozen=True)
class ExponentSpec:
    """Lebesgue exponents ordered innermost first."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if not 1 <= len(self.values) <= 4:
            raise InvalidInputError("between one and four exponents are allowed")
        object.__setattr__(self, "values", tuple(parse_exponent(v) for v in self.values))


@dataclasses.dataclass(frozen=True)
class SubspacePartition:
    """Axis-aligned blocks of array axes, innermost nesting level first."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", tuple(tuple(int(a) for a in b) for b in self.blocks))

    @classmethod
    def standard(cls, n: int) -> "SubspacePartition":
        """Space axes at the first level, frequency axes at the third."""
        return cls((tuple(range(n)), (), tuple(range(n, 2 * n)), ()))

    def validate(self, ndim: int) -> None:
        flat = [a for b in self.blocks for a in b]
        if sorted(flat) != list(range(ndim)):
            raise InvalidInputError(
                f"partition {self.blocks} does not assign each of {ndim} axes exactly once"
            )


def nested_reduce(values: np.ndarray, levels: Sequence[tuple[Sequence[int], float]], cells: Sequence[float]) -> float:
    """Reduce ``values`` level by level.

    Parameters
    ----------
    values : ndarray
        Non-negative array.
    levels : sequence of (axes, p)
        Original axis indices reduced at each level, innermost first.
    cells : sequence of float
        Quadrature weight of every original axis.
    """
    remaining = list(range(values.ndim))
    out = values
    for axes, p in levels:
        axes = tuple(axes)
        pos = tuple(remaining.index(a) for a in axes)
        cell = float(np.prod([cells[a] for a in axes])) if axes else 1.0
        out = lp_reduce(out, pos, p, cell)
        remaining = [a for a in remaining if a not in axes]
    if remaining:
        raise InvalidInputError(f"axes {remaining} were not reduced")
    return float(out)


def _weighted_magnitude(V: StftArray, omega: WeightSpec | None) -> np.ndarray:
    if np.any(np.isnan(V.values)):
        raise InvalidInputError("STFT array contains NaN")
    mag = np.abs(V.values)
    if omega is not None and not omega.is_trivial:
        mag = mag * weight_on_phase_space(omega, V.grid)
    return mag


def modulation_norm(V: StftArray, p: float, q: float, omega: WeightSpec | None = None) -> float:
    """``|| || V omega ||_{L^p(dx)} ||_{L^q(dxi)}``."""
    p, q = parse_exponent(p), parse_exponent(q)
    n = V.dim
    cells = V.axis_cells()
    return nested_reduce(_weighted_magnitude(V, omega), [(range(n), p), (range(n, 2 * n), q)], cells)


def coorbit_norm(V: StftArray, part: SubspacePartition, exps: ExponentSpec, omega: WeightSpec | None = None) -> float:
    """Four-level mixed norm ``L^s(V4; L^r(V3; L^q(V2; L^p(V1))))`` of ``V omega``."""
    if len(exps.values) != len(part.blocks):
        raise InvalidInputError("one exponent is needed per partition block")
    part.validate(2 * V.dim)
    return nested_reduce(_weighted_magnitude(V, omega), list(zip(part.blocks, exps.values)), V.axis_cells())


# ---------------------------------------------------------------- patches


def patch_norm(
    f: SampledFunction,
    step: float,
    window: WindowSpec,
    p: float,
    q: float,
    omega: WeightSpec | None = None,
    tol: float = 1e-10,
) -> float:
    """Norm built from localized pieces ``f_a = f chi(. - x_a)``.

    ``F(xi) = (sum_a |hat f_a(xi) omega(x_a, xi)|^p)^(1/p)`` and the result is
    ``|| F ||_{L^q}``. The translates of ``window`` by ``step`` must sum to one.
    """
    require_same_grid(f.grid, window.grid)
    p, q = parse_exponent(p), parse_exponent(q)
    g = f.grid
    count = 2.0 * g.half_width / step
    shift = step / g.spacing
    if abs(count - round(count)) > 1e-9 or abs(shift - round(shift)) > 1e-9:
        raise InvalidInputError("patch step must divide the box and be a multiple of h")
    count, shift = int(round(count)), int(round(shift))
    axes = tuple(range(g.dim))
    offsets = list(itertools.product(range(count), repeat=g.dim))
    pieces = [np.roll(window.samples, tuple(o * shift for o in off), axis=axes) for off in offsets]
    total = np.sum(pieces, axis=0)
    if np.max(np.abs(total - 1.0)) > tol:
        raise InvalidInputError("window translates do not form a partition of unity")
    xi = g.coords("frequency").reshape(-1, g.dim)
    acc = np.zeros(g.shape)
    for off, piece in zip(offsets, pieces):
        centre = np.array(off, dtype=float) * step
        centre = (centre + g.half_width) % (2 * g.half_width) - g.half_width
        mag = np.abs(dft_axes(f.values * piece, g))
        if omega is not None and not omega.is_trivial:
            pts = np.concatenate([np.tile(centre, (xi.shape[0], 1)), xi], axis=1)
            mag = mag * omega(pts).reshape(g.shape)
        acc = np.maximum(acc, mag) if math.isinf(p) else acc + mag**p
    F = acc if math.isinf(p) else acc ** (1.0 / p)
    return float(lp_reduce(F, axes, q, g.cell("frequency")))


# ---------------------------------------------------------------- amplitudes

AmplitudeVariant = Literal[
    "thm2_5", "cor2_6_1", "cor2_6_2", "cor2_6_3", "thm2_7_1", "thm2_7_2", "thm2_8", "thm2_10"
]
AMPLITUDE_VARIANTS: tuple[str, ...] = (
    "thm2_5", "cor2_6_1", "cor2_6_2", "cor2_6_3", "thm2_7_1", "thm2_7_2", "thm2_8", "thm2_10",
)


@dataclasses.dataclass(frozen=True)
class AmplitudeLayout:
    """Dimensions of the blocks ``(x, y, zeta)`` of an amplitude's variable.

    ``x`` is the output variable (``n_x`` axes), ``y`` the input variable and
    ``zeta`` the integrated phase variable.
    """

    nx: int
    ny: int
    m: int

    @property
    def dim(self) -> int:
        return self.nx + self.ny + self.m

    def x(self) -> tuple[int, ...]:
        return tuple(range(self.nx))

    def y(self) -> tuple[int, ...]:
        return tuple(range(self.nx, self.nx + self.ny))

    def zeta(self) -> tuple[int, ...]:
        return tuple(range(self.nx + self.ny, self.dim))

    def dual(self, axes: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.dim + a for a in axes)


def amplitude_partition(layout: AmplitudeLayout, v1: Sequence[int] | None = None) -> SubspacePartition:
    """Blocks ``(V2, V1, V1', V2')`` for an axis-aligned split of the amplitude variable.

    ``v1`` lists the ``N = n_x + n_y`` coordinate axes spanning ``V1``; the
    default is the ``(x, y)`` block.
    """
    v1 = tuple(layout.x() + layout.y()) if v1 is None else tuple(sorted(v1))
    if len(v1) != layout.nx + layout.ny or len(set(v1)) != len(v1):
        raise InvalidInputError("V1 must consist of N distinct coordinate axes")
    if min(v1) < 0 or max(v1) >= layout.dim:
        raise InvalidInputError("V1 axis out of range")
    v2 = tuple(a for a in range(layout.dim) if a not in v1)
    return SubspacePartition((v2, v1, layout.dual(v1), layout.dual(v2)))


def amplitude_levels(
    layout: AmplitudeLayout,
    variant: str,
    p: float = 1.0,
    q: float = 1.0,
    v1: Sequence[int] | None = None,
) -> list[tuple[tuple[int, ...], float]]:
    """Reduction levels (innermost first) of each amplitude norm variant.

    Axes refer to the ``2 (N + m)`` axes of the amplitude STFT, ordered
    ``(x, y, zeta, xi, eta, z)``.
    """
    L = layout
    x, y, zeta = L.x(), L.y(), L.zeta()
    xi, eta, z = L.dual(x), L.dual(y), L.dual(zeta)

    def sup_int_sup(u: tuple[int, ...]) -> list[tuple[tuple[int, ...], float]]:
        # sup over zeta and the remaining dual axes, integral over u, sup over (x, y)
        tau = tuple(a for a in xi + eta + z if a not in u)
        return [(tuple(sorted(zeta + tau)), INF), (u, 1.0), (x + y, INF)]

    if variant == "thm2_5":
        part = amplitude_partition(L, v1)
        return sup_int_sup(part.blocks[3])
    if variant == "cor2_6_1":
        return sup_int_sup(z)
    if variant == "cor2_6_2":
        if L.m != L.nx:
            raise InvalidInputError("this variant needs m equal to the x dimension")
        return sup_int_sup(xi)
    if variant == "cor2_6_3":
        if L.m != L.ny:
            raise InvalidInputError("this variant needs m equal to the y dimension")
        return sup_int_sup(eta)
    if variant == "thm2_7_1":
        return [(xi + eta, p), (z, INF), (zeta, 1.0), (x + y, p)]
    if variant == "thm2_7_2":
        return [(xi + eta, p), (zeta, INF), (z, 1.0), (x + y, p)]
    if variant in ("thm2_8", "thm2_10"):
        if variant == "thm2_8":
            q = p
        b = amplitude_partition(L, v1).blocks
        return [(b[0], INF), (b[1], p), (b[2], q), (b[3], 1.0)]
    raise InvalidInputError(f"unknown amplitude norm variant {variant!r}")


def amplitude_norm(
    Va: StftArray,
    variant: str,
    layout: AmplitudeLayout,
    p: float = 1.0,
    q: float = 1.0,
    v1: Sequence[int] | None = None,
    omega: WeightSpec | None = None,
) -> float:
    """Nested sup/integral norm of ``|V_chi a omega|`` for an amplitude ``a``.

    Parameters
    ----------
    Va : StftArray
        STFT of the amplitude on an ``(N + m)``-dimensional grid.
    variant : str
        One of :data:`AMPLITUDE_VARIANTS`.
    layout : AmplitudeLayout
        Block sizes of ``(x, y, zeta)``.
    p, q : float
        Exponents used by the variants that take them.
    v1 : sequence of int, optional
        Coordinate axes of the ``N``-dimensional block ``V1``.
    omega : WeightSpec, optional
        Weight on ``R^(2 (N + m))``.
    """
    if Va.dim != layout.dim:
        raise InvalidInputError(f"STFT dimension {Va.dim} does not match layout {layout}")
    p, q = parse_exponent(p), parse_exponent(q)
    levels = amplitude_levels(layout, variant, p, q, v1)
    return nested_reduce(_weighted_magnitude(Va, omega), levels, Va.axis_cells())


def check_amplitude_decay(a: SampledFunction, tol: float = 1e-10, axes: Sequence[int] | None = None) -> None:
    """Require the amplitude to decay below ``tol`` (relative) at the box edge.

    Only the seam layers of ``axes`` (default: all axes) are inspected.
    """
    vals = np.abs(a.values)
    peak = float(np.max(vals))
    if peak == 0.0:
        return
    axes = range(vals.ndim) if axes is None else axes
    edge = max((float(np.take(vals, 0, axis=ax).max()) for ax in axes), default=0.0)
    if edge > tol * peak:
        raise FitnessError(f"amplitude does not decay at the box edge ({edge / peak:.2e} relative)")


# ---------------------------------------------------------------- smooth amplitudes

DerivativeOracle = Callable[[tuple[int, ...]], np.ndarray]


def multi_indices(dim: int, order: int) -> list[tuple[int, ...]]:
    """All multi-indices of length ``dim`` with total order at most ``order``."""
    out = [a for a in itertools.product(range(order + 1), repeat=dim) if sum(a) <= order]
    return sorted(out, key=lambda a: (sum(a), tuple(-v for v in a)))


def cNp_norm(
    derivative: DerivativeOracle,
    grid: GridSpec,
    order: int,
    p: float,
    omega: WeightSpec | None = None,
) -> float:
    """``sum_{|alpha| <= order} ( iint sup_y |a^(alpha) omega|^p dx dzeta )^(1/p)``.

    Parameters
    ----------
    derivative : callable
        Returns the samples of ``a^(alpha)`` on ``grid`` for a multi-index.
        Should raise ``KeyError`` or ``NotImplementedError`` when unavailable.
    grid : GridSpec
        Grid on ``R^(3n)`` with axes ordered ``(x, y, zeta)``.
    """
    if grid.dim % 3:
        raise InvalidInputError("amplitude grid must have dimension 3n")
    p = parse_exponent(p)
    n = grid.dim // 3
    w = 1.0 if omega is None or omega.is_trivial else omega(grid.coords())
    total = 0.0
    for alpha in multi_indices(grid.dim, order):
        try:
            vals = np.asarray(derivative(alpha))
        except (KeyError, NotImplementedError) as exc:
            raise InvalidInputError(f"missing derivative {alpha}") from exc
        mag = np.abs(vals) * w
        levels = [(tuple(range(n, 2 * n)), INF), (tuple(range(n)) + tuple(range(2 * n, 3 * n)), p)]
        total += nested_reduce(mag, levels, [grid.spacing] * grid.dim)
    return total


# ---------------------------------------------------------------- embeddings


@dataclasses.dataclass(frozen=True, eq=False)
class NormSpec:
    """Recipe for a norm of a sampled function.

    ``kind`` is ``"modulation"`` (needs ``window``) or ``"patch"`` (needs
    ``window`` built by :func:`tfop.weights.partition_window` and ``step``).
    """

    kind: Literal["modulation", "patch"]
    p: float
    q: float
    window: WindowSpec
    omega: WeightSpec | None = None
    step: float | None = None

    def __call__(self, f: SampledFunction) -> float:
        if self.kind == "modulation":
            return modulation_norm(stft(f, self.window), self.p, self.q, self.omega)
        if self.kind == "patch":
            if self.step is None:
                raise InvalidInputError("patch norms need a step")
            return patch_norm(f, self.step, self.window, self.p, self.q, self.omega)
        raise InvalidInputError(f"unknown norm kind {self.kind!r}")


def embedding_ratio(family: Sequence[SampledFunction], spec_1: NormSpec, spec_2: NormSpec) -> float:
    """Largest ``norm_2(f) / norm_1(f)`` over a family; a diagnostic only."""
    best = 0.0
    for f in family:
        den = spec_1(f)
        if den == 0.0:
            raise InvalidInputError("zero function in the family")
        if spec_1 is spec_2:
            best = max(best, 1.0)
            continue
        best = max(best, spec_2(f) / den)
    return best
