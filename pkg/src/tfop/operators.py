"""Fourier integral and pseudo-differential operators as matrices on a grid.

Operators act on samples: entry ``(j, k)`` already contains the source
quadrature weight, so ``T @ f`` gives the samples of ``Op f``. All
constructions are exact discrete models on self-dual grids
(:meth:`GridSpec.self_dual`), where frequency and space lattices coincide and
sampled amplitudes can be read in either role.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from typing import Callable

import numpy as np

from .errors import FitnessError, GridMismatchError, InvalidInputError
from .grid import GridSpec, SampledFunction, dft_axes, idft_axes, require_same_grid, trig_interpolate
from .norms import check_amplitude_decay
from .phase import PhaseSpec

LOGGER = logging.getLogger(__name__)

ROTATION_TOL = 1e-12


@dataclasses.dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Sampled linear operator from ``source`` samples to ``target`` samples.

    ``entries`` has shape ``(target.size, source.size)`` with the source
    quadrature weight folded in.
    """

    source: GridSpec
    target: GridSpec
    entries: np.ndarray

    def __post_init__(self) -> None:
        ent = np.asarray(self.entries, dtype=complex)
        if ent.shape != (self.target.size, self.source.size):
            raise InvalidInputError(
                f"entries of shape {ent.shape} do not map {self.source.size} to {self.target.size} samples"
            )
        if not np.all(np.isfinite(ent)):
            raise InvalidInputError("operator entries must be finite")
        object.__setattr__(self, "entries", ent)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def apply(self, f: SampledFunction) -> SampledFunction:
        require_same_grid(f.grid, self.source)
        out = self.entries @ f.values.reshape(-1)
        return SampledFunction(self.target, out.reshape(self.target.shape))

    def __call__(self, f: SampledFunction) -> SampledFunction:
        return self.apply(f)

    def pairing(self, f: SampledFunction, g: SampledFunction) -> complex:
        """``(T f, g)`` with the quadrature inner product of the target grid."""
        require_same_grid(g.grid, self.target)
        Tf = self.apply(f)
        return complex(self.target.cell() * np.vdot(g.values, Tf.values))


def _split_grid(a: SampledFunction, n_target: int, n_source: int) -> tuple[GridSpec, GridSpec, int]:
    m = a.grid.dim - n_target - n_source
    if m < 0:
        raise InvalidInputError("amplitude dimension is smaller than n_target + n_source")
    return a.grid.with_dim(n_source), a.grid.with_dim(n_target), m


def _check_phase(a: SampledFunction, phi: PhaseSpec) -> None:
    if a.grid.dim != phi.dim:
        raise InvalidInputError(f"amplitude dimension {a.grid.dim} does not match phase dimension {phi.dim}")
    if not a.grid.is_self_dual:
        LOGGER.warning("operator built on a grid that is not self-dual; the discrete model is not exact")


def fio_kernel(a: SampledFunction, phi: PhaseSpec, require_decay: bool = True) -> SampledFunction:
    """``K(x, y) = (2 pi)^(-N/2) int a(x, y, zeta) exp(i phi(x, y, zeta)) dzeta``.

    Parameters
    ----------
    a : SampledFunction
        Amplitude on the ``(n2 + n1 + m)``-dimensional grid, axes ``(x, y, zeta)``.
    phi : PhaseSpec
    require_decay : bool
        Enforce decay of ``a`` along the integrated ``zeta`` axes, the
        only truncated integral. Switch off only for
        amplitudes whose lattice sums are exact (constants, polynomials in
        the frequency variable).
    """
    _check_phase(a, phi)
    if require_decay:
        check_amplitude_decay(a, axes=range(phi.N, phi.dim))
    g = a.grid
    N = phi.N
    vals = a.values * np.exp(1j * phi.value(g.coords()))
    zeta_axes = tuple(range(N, phi.dim))
    K = (2 * math.pi) ** (-N / 2) * g.spacing**phi.m * np.sum(vals, axis=zeta_axes)
    return SampledFunction(g.with_dim(N), K)


def apply_kernel(K: SampledFunction, f: SampledFunction) -> SampledFunction:
    """``(T f)(x_j) = h^n1 sum_k K(x_j, y_k) f(y_k)``; bilinear, no conjugation."""
    n1 = f.grid.dim
    n2 = K.grid.dim - n1
    if n2 < 1 or K.grid.with_dim(n1) != f.grid:
        raise GridMismatchError("kernel and function grids do not match")
    mat = K.values.reshape(K.grid.points**n2, -1)
    out = f.grid.cell() * (mat @ f.values.reshape(-1))
    return SampledFunction(K.grid.with_dim(n2), out.reshape((K.grid.points,) * n2))


def kernel_operator(K: SampledFunction, n_source: int) -> OperatorMatrix:
    """Matrix of the integral operator with kernel ``K(x, y)``, ``y`` in ``R^n_source``."""
    n_target = K.grid.dim - n_source
    if n_target < 1 or n_source < 1:
        raise InvalidInputError("kernel must have both target and source axes")
    src = K.grid.with_dim(n_source)
    tgt = K.grid.with_dim(n_target)
    return OperatorMatrix(src, tgt, src.cell() * K.values.reshape(tgt.size, src.size))


def op_fio(a: SampledFunction, phi: PhaseSpec, require_decay: bool = True) -> OperatorMatrix:
    """Fourier integral operator with amplitude ``a`` and phase ``phi``.

    Entry ``(j, k)`` is ``(2 pi)^(-N/2) h^m sum_zeta a e^{i phi}`` at
    ``(x_j, y_k, zeta)`` times the source weight ``h^n1``.
    """
    _check_phase(a, phi)
    if require_decay:
        check_amplitude_decay(a, axes=range(phi.N, phi.dim))
    g = a.grid
    N, m = phi.N, phi.m
    tgt, src = g.with_dim(phi.n2), g.with_dim(phi.n1)
    X = g.coords()
    weight = (2 * math.pi) ** (-N / 2) * g.spacing**m * src.cell()
    # assemble one target row block at a time to bound memory
    rows = np.empty((tgt.size, src.size), dtype=complex)
    vals = a.values.reshape(tgt.size, src.size, -1)
    Xr = X.reshape(tgt.size, src.size, -1, phi.dim)
    for j in range(tgt.size):
        rows[j] = weight * np.sum(vals[j] * np.exp(1j * phi.value(Xr[j])), axis=-1)
    return OperatorMatrix(src, tgt, rows)


# ---------------------------------------------------------------- pseudo-differential


def _symbol_grid(a: SampledFunction) -> int:
    if a.grid.dim % 2:
        raise InvalidInputError("symbols live on a grid of even dimension 2n")
    if not a.grid.is_self_dual:
        raise InvalidInputError("symbols must be sampled on a self-dual grid")
    return a.grid.dim // 2


def _eval_first_block(a: SampledFunction, n: int, z: np.ndarray) -> np.ndarray:
    """Values ``a(z_p, xi)`` for points ``z`` of shape ``(P, n)``; result ``(P,) + xi shape``.

    Lattice points are read directly, other points use the band-limited
    periodic interpolant along each of the first ``n`` axes.
    """
    g = a.grid
    h = g.spacing
    pos = (z + g.half_width) / h
    on_lattice = np.all(np.abs(pos - np.round(pos)) < 1e-9, axis=-1)
    out = np.empty((z.shape[0],) + (g.points,) * n, dtype=complex)
    if np.any(on_lattice):
        idx = np.round(pos[on_lattice]).astype(int) % g.points
        out[on_lattice] = a.values[tuple(idx.T)]
    off = ~on_lattice
    if np.any(off):
        zo = z[off]
        vals = trig_interpolate(a.values, g, 0, zo[:, 0])
        # vals has shape (P, rest...); remaining first-block axes follow
        for d in range(1, n):
            vals = np.stack([trig_interpolate(vals[p], g, 0, zo[p, d]) for p in range(zo.shape[0])])
        out[off] = vals
    return out


def _interpolation_points(g: GridSpec, x: np.ndarray, t: float) -> np.ndarray:
    """Points ``(1 - t) x_j + t y_k`` for all node pairs, on the torus.

    ``y_k`` is replaced by its periodic image nearest to ``x_j`` so that the
    point lies between the two nodes; without this, wrapped pairs would put
    ``t = 1/2`` midpoints in the middle of the box.
    """
    d = x[:, None, :] - x[None, :, :]
    d = (d + g.half_width) % (2 * g.half_width) - g.half_width
    z = x[:, None, :] - t * d
    return (z + g.half_width) % (2 * g.half_width) - g.half_width


def pseudo_kernel(a: SampledFunction, t: float) -> SampledFunction:
    """Kernel ``K(x, y) = (2 pi)^(-n/2) (F_2^{-1} a)((1 - t) x + t y, x - y)``.

    The inverse partial transform is taken on the frequency lattice, so the
    difference ``x - y`` is read off periodically.
    """
    n = _symbol_grid(a)
    g = a.grid
    B = (2 * math.pi) ** (-n / 2) * idft_axes(a.values, g, axes=range(n, 2 * n))
    B = SampledFunction(g, B)
    sp = g.with_dim(n)
    x = sp.coords().reshape(-1, n)
    P = x.shape[0]
    z = _interpolation_points(g, x, t).reshape(-1, n)
    Bz = _eval_first_block(B, n, z).reshape(P, P, -1)
    ix = np.array(np.unravel_index(np.arange(P), sp.shape)).T
    diff = (ix[:, None, :] - ix[None, :, :] + g.points // 2) % g.points
    flat = np.ravel_multi_index(tuple(np.moveaxis(diff, -1, 0)), sp.shape)
    K = np.take_along_axis(Bz, flat[..., None], axis=-1)[..., 0]
    return SampledFunction(g.with_dim(2 * n), K.reshape(sp.shape * 2))


def op_pseudo(a: SampledFunction, t: float, require_decay: bool = False) -> OperatorMatrix:
    """``a_t(x, D)`` through its distribution kernel."""
    n = _symbol_grid(a)
    if require_decay:
        check_amplitude_decay(a, axes=range(n, 2 * n))
    return kernel_operator(pseudo_kernel(a, t), n)


def op_pseudo_direct(a: SampledFunction, t: float) -> OperatorMatrix:
    """``a_t(x, D)`` by direct quadrature of ``a((1-t)x + ty, xi) e^{i<x - y, xi>}``."""
    n = _symbol_grid(a)
    g = a.grid
    sp = g.with_dim(n)
    x = sp.coords().reshape(-1, n)
    xi = x  # self-dual lattice
    P = x.shape[0]
    z = _interpolation_points(g, x, t).reshape(-1, n)
    az = _eval_first_block(a, n, z).reshape(P, P, P)
    phase = np.exp(1j * np.einsum("jkd,ld->jkl", x[:, None, :] - x[None, :, :], xi))
    scale = (2 * math.pi) ** (-n) * g.freq_spacing**n * sp.cell()
    return OperatorMatrix(sp, sp, scale * np.sum(az * phase, axis=-1))


def quantization_transfer(a: SampledFunction, s: float, t: float) -> SampledFunction:
    """Symbol ``b`` with ``b_t(x, D) = a_s(x, D)``.

    ``b`` is the Fourier multiplier ``exp(i (s - t) <x*, xi*>)`` applied to
    ``a``, where ``(x*, xi*)`` are dual to ``(x, xi)`` and ``D = -i d``.
    """
    n = _symbol_grid(a)
    if s == t:
        return a
    g = a.grid
    peak = float(np.max(np.abs(a.values)))
    A = dft_axes(a.values, g)
    if peak > 0:
        # spectral tail on the Nyquist layers signals aliasing
        edge = max(float(np.max(np.abs(np.take(A, 0, axis=ax)))) for ax in range(2 * n))
        if edge > 1e-8 * float(np.max(np.abs(A))):
            raise FitnessError("symbol is not band-limited on this grid")
    k = g.coords("frequency")
    mult = np.exp(1j * (s - t) * np.sum(k[..., :n] * k[..., n:], axis=-1))
    return SampledFunction(g, idft_axes(mult * A, g))


# ---------------------------------------------------------------- rotated amplitudes


def op_fio_rotated(
    a: SampledFunction,
    phi: PhaseSpec,
    t1: float,
    t2: float,
    require_decay: bool = True,
) -> OperatorMatrix:
    """``(2 pi)^(-n) iint a(t1 x + t2 y, zeta) f(y) exp(i phi(x, y, zeta)) dy dzeta``.

    ``a`` lives on ``R^(2n)`` with axes ``(first variable, zeta)``.
    """
    if abs(t1 * t1 + t2 * t2 - 1.0) > ROTATION_TOL:
        raise InvalidInputError(f"t1^2 + t2^2 must equal 1, got {t1 * t1 + t2 * t2!r}")
    n = _symbol_grid(a)
    if not (phi.n1 == phi.n2 == phi.m == n):
        raise InvalidInputError("phase dimensions must equal the symbol's half dimension")
    if require_decay:
        check_amplitude_decay(a, axes=range(n, 2 * n))
    g = a.grid
    sp = g.with_dim(n)
    x = sp.coords().reshape(-1, n)
    P = x.shape[0]
    z = (t1 * x[:, None, :] + t2 * x[None, :, :]).reshape(-1, n)
    az = _eval_first_block(a, n, z).reshape(sp.shape * 3)
    a3 = SampledFunction(g.with_dim(3 * n), az)
    return op_fio(a3, phi, require_decay=False)


def lift_amplitude(func: Callable[..., np.ndarray], grid: GridSpec, t1: float, t2: float) -> SampledFunction:
    """Sample ``(x, y, zeta) -> func(t1 x + t2 y, zeta)`` on a ``3n`` grid from a closed form."""
    n = grid.dim // 3
    pts = grid.coords()
    x, y, zeta = pts[..., :n], pts[..., n : 2 * n], pts[..., 2 * n :]
    u = t1 * x + t2 * y
    args = [u[..., d] for d in range(n)] + [zeta[..., d] for d in range(n)]
    return SampledFunction(grid, func(*args))
