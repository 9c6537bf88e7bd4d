"""Polynomial weights, window functions and finite-box weight audits.

Weights are products of Japanese brackets ``<z>^s = (1 + |z|^2)^(s/2)`` over
selected coordinate blocks. Windows are real, non-negative samples on a grid.
"""

from __future__ import annotations

import dataclasses
import itertools
import logging
import math
from typing import Literal, Sequence

import numpy as np

from .errors import FitnessError, InvalidInputError
from .grid import GridSpec, SampledFunction

LOGGER = logging.getLogger(__name__)


def bracket(z: np.ndarray) -> np.ndarray:
    """Japanese bracket over the last axis of ``z``."""
    z = np.asarray(z, dtype=float)
    return np.sqrt(1.0 + np.sum(z * z, axis=-1))


@dataclasses.dataclass(frozen=True)
class WeightSpec:
    """Product weight ``constant * prod_k <z[selector_k]>^(s_k)``.

    Parameters
    ----------
    dim : int
        Ambient dimension of the weight.
    factors : tuple of (tuple of int, float)
        Coordinate selector and exponent for each bracket factor.
    constant : float
        Positive multiplicative constant.
    transform : tuple of tuple of float, optional
        Square matrix ``M``; the weight is evaluated at ``M z``.
    """

    dim: int
    factors: tuple[tuple[tuple[int, ...], float], ...] = ()
    constant: float = 1.0
    transform: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InvalidInputError("weight dimension must be positive")
        if not self.constant > 0:
            raise InvalidInputError("weight constant must be positive")
        norm = []
        for sel, s in self.factors:
            sel = tuple(int(i) for i in sel)
            if not sel or min(sel) < 0 or max(sel) >= self.dim:
                raise InvalidInputError(f"selector {sel} out of range for dim {self.dim}")
            norm.append((sel, float(s)))
        object.__setattr__(self, "factors", tuple(norm))
        if self.transform is not None:
            M = np.asarray(self.transform, dtype=float)
            if M.shape != (self.dim, self.dim):
                raise InvalidInputError(f"transform must be {self.dim}x{self.dim}")
            object.__setattr__(self, "transform", tuple(tuple(float(v) for v in row) for row in M))

    @classmethod
    def unit(cls, dim: int) -> "WeightSpec":
        """The trivial weight 1."""
        return cls(dim)

    @classmethod
    def bracket_power(cls, dim: int, s: float, selector: Sequence[int] | None = None) -> "WeightSpec":
        """``<z[selector]>^s``; the whole vector when ``selector`` is None."""
        sel = tuple(range(dim)) if selector is None else tuple(selector)
        return cls(dim, ((sel, s),))

    @classmethod
    def phase_space(cls, n: int, t: float = 0.0, s: float = 0.0) -> "WeightSpec":
        """``<x>^t <xi>^s`` on ``R^n x R^n``."""
        factors = []
        if t:
            factors.append((tuple(range(n)), t))
        if s:
            factors.append((tuple(range(n, 2 * n)), s))
        return cls(2 * n, tuple(factors))

    @property
    def is_trivial(self) -> bool:
        return self.constant == 1.0 and all(s == 0 for _, s in self.factors)

    def inverse(self) -> "WeightSpec":
        """The weight ``1 / w``."""
        return WeightSpec(
            self.dim, tuple((sel, -s) for sel, s in self.factors), 1.0 / self.constant, self.transform
        )

    def compose(self, matrix: np.ndarray) -> "WeightSpec":
        """The weight ``z -> w(matrix z)``."""
        M = np.asarray(matrix, dtype=float)
        if self.transform is not None:
            M = np.asarray(self.transform) @ M
        return WeightSpec(self.dim, self.factors, self.constant, tuple(map(tuple, M)))

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Evaluate on an array of points of shape ``(..., dim)``."""
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.dim:
            raise InvalidInputError(f"points of dimension {pts.shape[-1]} given to a weight on R^{self.dim}")
        if self.transform is not None:
            pts = pts @ np.asarray(self.transform).T
        out = np.full(pts.shape[:-1], self.constant, dtype=float)
        for sel, s in self.factors:
            if s != 0.0:
                out = out * bracket(pts[..., list(sel)]) ** s
        return out


def eval_weight(w: WeightSpec, point: Sequence[float] | np.ndarray) -> float:
    """Weight value at a single point."""
    pt = np.asarray(point, dtype=float).reshape(-1)
    if pt.size != w.dim:
        raise InvalidInputError(f"point of dimension {pt.size} given to a weight on R^{w.dim}")
    return float(w(pt))


def weight_on_phase_space(w: WeightSpec, grid: GridSpec) -> np.ndarray:
    """Weight sampled on the lattice ``(x_j, xi_k)`` of an STFT over ``grid``.

    Returns an array of shape ``grid.shape + grid.shape``.
    """
    n = grid.dim
    if w.dim != 2 * n:
        raise InvalidInputError(f"phase-space weight must live on R^{2 * n}, got R^{w.dim}")
    if w.is_trivial:
        return np.ones(grid.shape * 2)
    x = grid.coords("space").reshape(-1, n)
    xi = grid.coords("frequency").reshape(-1, n)
    pts = np.concatenate(
        [np.repeat(x, xi.shape[0], axis=0), np.tile(xi, (x.shape[0], 1))], axis=1
    )
    return w(pts).reshape(grid.shape * 2)


@dataclasses.dataclass(frozen=True)
class ModerateAudit:
    """Finite-box estimate of a moderateness constant."""

    estimate: float
    half_width: float
    pairs: int


def _pair_ratio_max(num: WeightSpec, den_a: WeightSpec, den_b: WeightSpec, pts: np.ndarray, chunk: int = 4096) -> float:
    best = 0.0
    wa = den_a(pts)
    wb = den_b(pts)
    for start in range(0, pts.shape[0], chunk):
        x = pts[start : start + chunk]
        s = x[:, None, :] + pts[None, :, :]
        ratio = num(s) / (wa[start : start + chunk, None] * wb[None, :])
        best = max(best, float(ratio.max()))
    return best


def audit_moderate(omega: WeightSpec, v: WeightSpec, grid: GridSpec) -> ModerateAudit:
    """Largest ``omega(x+y) / (omega(x) v(y))`` over all grid pairs.

    A finite value is evidence on the sampled box only and must not be read
    as a proof of moderateness.
    """
    if omega.dim != v.dim or omega.dim != grid.dim:
        raise InvalidInputError("weights and grid must share the ambient dimension")
    pts = grid.coords().reshape(-1, grid.dim)
    est = _pair_ratio_max(omega, omega, v, pts)
    return ModerateAudit(est, grid.half_width, pts.shape[0] ** 2)


@dataclasses.dataclass(frozen=True)
class SubmultiplicativeAudit:
    """Finite-box estimates for ``v(x+y) <= C v(x) v(y)`` and ``v(t x) <= C v(x)``."""

    submultiplicative: float
    scaling: float
    half_width: float


SCALING_FACTORS = tuple(k / 10 for k in range(11))


def audit_submultiplicative(v: WeightSpec, grid: GridSpec) -> SubmultiplicativeAudit:
    """Audit submultiplicativity and the dilation bound for ``t`` in {0, 0.1, ..., 1}."""
    sub = audit_moderate(v, v, grid).estimate
    pts = grid.coords().reshape(-1, grid.dim)
    base = v(pts)
    scale = max(float(np.max(v(t * pts) / base)) for t in SCALING_FACTORS)
    return SubmultiplicativeAudit(sub, scale, grid.half_width)


# ---------------------------------------------------------------- windows

WindowFamily = Literal["gaussian", "bump", "sampled"]
Normalization = Literal["none", "l1", "l2"]


def _bump_profile(r: np.ndarray) -> np.ndarray:
    out = np.zeros_like(r)
    inside = r < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


@dataclasses.dataclass(frozen=True, eq=False)
class WindowSpec:
    """Real non-negative window sampled on a grid.

    Parameters
    ----------
    family : {"gaussian", "bump", "sampled"}
        ``gaussian`` is ``exp(-|x|^2 / (2 param^2))``; ``bump`` is
        ``exp(-1 / (1 - |x/param|^2))`` inside the ball of radius ``param``;
        ``sampled`` wraps explicit samples.
    grid : GridSpec
    param : float
        Spread of the Gaussian or radius of the bump.
    normalization : {"none", "l1", "l2"}
        Rescaling applied after sampling. Bumps default to ``l2``.
    """

    family: WindowFamily
    grid: GridSpec
    param: float = 1.0
    normalization: Normalization | None = None
    samples: np.ndarray | None = dataclasses.field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.family not in ("gaussian", "bump", "sampled"):
            raise InvalidInputError(f"unknown window family {self.family!r}")
        if self.family != "sampled" and not self.param > 0:
            raise InvalidInputError("window parameter must be positive")
        norm = self.normalization
        if norm is None:
            norm = "l2" if self.family == "bump" else "none"
            object.__setattr__(self, "normalization", norm)
        vals = self._raw()
        if np.any(np.abs(vals.imag) > 0) or np.any(vals.real < -1e-15):
            raise InvalidInputError("windows must be real and non-negative")
        vals = vals.real
        cell = self.grid.cell()
        if norm == "l1":
            vals = vals / (cell * vals.sum())
        elif norm == "l2":
            vals = vals / math.sqrt(cell * np.sum(vals * vals))
        if not np.any(vals > 0):
            raise InvalidInputError("window vanishes identically")
        object.__setattr__(self, "samples", vals)

    def _raw(self) -> np.ndarray:
        if self.family == "sampled":
            if self.samples is None:
                raise InvalidInputError("sampled windows need explicit samples")
            vals = np.asarray(self.samples)
            if vals.shape != self.grid.shape:
                raise InvalidInputError("window samples do not match the grid")
            return vals.astype(complex)
        pts = self.grid.coords()
        r = np.sqrt(np.sum(pts * pts, axis=-1))
        if self.family == "gaussian":
            return np.exp(-(r**2) / (2.0 * self.param**2)).astype(complex)
        if self.param >= self.grid.half_width:
            raise InvalidInputError("bump radius must fit inside the box")
        return _bump_profile(r / self.param).astype(complex)

    @classmethod
    def from_values(cls, grid: GridSpec, values: np.ndarray, normalization: Normalization = "none") -> "WindowSpec":
        return cls("sampled", grid, 1.0, normalization, np.asarray(values, dtype=float))

    @property
    def values(self) -> SampledFunction:
        return SampledFunction(self.grid, self.samples)

    def l2_norm(self) -> float:
        return float(math.sqrt(self.grid.cell() * np.sum(self.samples**2)))

    def l1_norm(self) -> float:
        return float(self.grid.cell() * np.sum(np.abs(self.samples)))

    def check_fitness(self, tol: float = 1e-12) -> None:
        """Require decay below ``tol`` (relative) on the periodic seam of the box."""
        edge = edge_magnitude(self.samples)
        peak = float(np.max(np.abs(self.samples)))
        if edge > tol * peak:
            raise FitnessError(
                f"window does not decay at the box edge: {edge:.3e} relative to peak {peak:.3e}"
            )


def edge_magnitude(values: np.ndarray) -> float:
    """Largest magnitude on the seam layer ``x_d = -L`` of every axis.

    On the periodic lattice the node ``-L`` is also the node ``+L``, so this
    layer is the set of nodes at distance ``L`` from the centre.
    """
    vals = np.abs(np.asarray(values))
    best = 0.0
    for ax in range(vals.ndim):
        best = max(best, float(np.take(vals, 0, axis=ax).max()))
    return best


def partition_window(grid: GridSpec, step: float, radius: float | None = None) -> WindowSpec:
    """Window whose translates by ``step * Z^n`` sum to one on the torus.

    A bump of radius ``radius`` (default ``step``) is divided by the periodic
    sum of its lattice translates. ``2L / step`` must be an integer.
    """
    count = 2.0 * grid.half_width / step
    if abs(count - round(count)) > 1e-9:
        raise InvalidInputError("the patch step must divide the box side")
    count = int(round(count))
    shift = step / grid.spacing
    if abs(shift - round(shift)) > 1e-9:
        raise InvalidInputError("the patch step must be a multiple of the grid spacing")
    shift = int(round(shift))
    radius = step if radius is None else radius
    pts = grid.coords()
    bump = _bump_profile(np.sqrt(np.sum(pts * pts, axis=-1)) / radius)
    total = np.zeros_like(bump)
    for offs in itertools.product(range(count), repeat=grid.dim):
        total += np.roll(bump, tuple(o * shift for o in offs), axis=tuple(range(grid.dim)))
    if np.min(total) <= 0:
        raise InvalidInputError("bump translates do not cover the box")
    return WindowSpec.from_values(grid, bump / total)
