"""Uniform periodic grids, normalized discrete Fourier transforms and quadrature.

A grid discretizes the box ``[-L, L)^n`` with ``N`` points per axis. Space
nodes are ``x_j = -L + j h`` with ``h = 2L/N`` and frequency nodes are
``xi_k = pi k / L`` for ``k = -N/2, ..., N/2 - 1``. The forward transform is

    F f(xi_k) = (2 pi)^(-n/2) h^n sum_j f(x_j) exp(-i <x_j, xi_k>),

which is the Riemann sum of the unitary Fourier integral. On this lattice the
sum is an exact model of the 2L-periodic band-limited problem.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from typing import Callable, Literal, Sequence

import numpy as np

from .errors import GridMismatchError, InvalidInputError

LOGGER = logging.getLogger(__name__)

Domain = Literal["space", "frequency"]


@dataclasses.dataclass(frozen=True)
class GridSpec:
    """Uniform grid on ``[-L, L)^dim`` with ``N`` points per axis.

    Parameters
    ----------
    dim : int
        Ambient dimension n.
    half_width : float
        Half side length L of the box.
    points : int
        Even number of points N per axis.
    """

    dim: int
    half_width: float
    points: int

    def __post_init__(self) -> None:
        if int(self.dim) != self.dim or self.dim < 1:
            raise InvalidInputError(f"dim must be a positive integer, got {self.dim}")
        if not (self.half_width > 0 and math.isfinite(self.half_width)):
            raise InvalidInputError(f"half_width must be positive, got {self.half_width}")
        if int(self.points) != self.points or self.points < 2 or self.points % 2:
            raise InvalidInputError(f"points must be an even integer >= 2, got {self.points}")

    @classmethod
    def self_dual(cls, dim: int, points: int) -> "GridSpec":
        """Grid whose space and frequency lattices coincide.

        Choosing ``L = sqrt(pi N / 2)`` gives ``h = pi / L``, so sampled
        symbols and amplitudes can treat a variable as either a space or a
        frequency variable without resampling. Operator constructions are
        exact discrete models on such grids.
        """
        return cls(dim, math.sqrt(math.pi * points / 2.0), points)

    @property
    def spacing(self) -> float:
        """Space step h."""
        return 2.0 * self.half_width / self.points

    @property
    def freq_spacing(self) -> float:
        """Frequency step pi / L."""
        return math.pi / self.half_width

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points,) * self.dim

    @property
    def size(self) -> int:
        return self.points**self.dim

    @property
    def is_self_dual(self) -> bool:
        return math.isclose(self.spacing, self.freq_spacing, rel_tol=1e-12)

    def axis(self) -> np.ndarray:
        """Space nodes along one axis."""
        return -self.half_width + self.spacing * np.arange(self.points)

    def freq_axis(self) -> np.ndarray:
        """Centered frequency nodes along one axis."""
        return self.freq_spacing * np.arange(-self.points // 2, self.points // 2)

    def coords(self, domain: Domain = "space") -> np.ndarray:
        """Node coordinates as an array of shape ``shape + (dim,)``."""
        ax = self.axis() if domain == "space" else self.freq_axis()
        mesh = np.meshgrid(*([ax] * self.dim), indexing="ij")
        return np.stack(mesh, axis=-1)

    def cell(self, domain: Domain = "space") -> float:
        """Quadrature weight of a single node."""
        step = self.spacing if domain == "space" else self.freq_spacing
        return step**self.dim

    def with_dim(self, dim: int) -> "GridSpec":
        """Same per-axis lattice in another dimension."""
        return GridSpec(dim, self.half_width, self.points)

    def index_of(self, value: float, domain: Domain = "space", atol: float = 1e-9) -> int:
        """Lattice index of a coordinate, raising if it is off the lattice."""
        if domain == "space":
            pos = (value + self.half_width) / self.spacing
        else:
            pos = value / self.freq_spacing + self.points // 2
        idx = round(pos)
        if abs(pos - idx) > atol:
            raise InvalidInputError(f"{value} is not a {domain} lattice point")
        return int(idx) % self.points


@dataclasses.dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex samples of a function on a grid.

    Parameters
    ----------
    grid : GridSpec
    values : ndarray
        Array of shape ``grid.shape``.
    domain : {"space", "frequency"}
        Whether the samples sit on space or frequency nodes.
    """

    grid: GridSpec
    values: np.ndarray
    domain: Domain = "space"

    def __post_init__(self) -> None:
        vals = np.asarray(self.values)
        if vals.shape != self.grid.shape:
            raise InvalidInputError(
                f"values of shape {vals.shape} do not match grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("sampled values must be finite")
        if self.domain not in ("space", "frequency"):
            raise InvalidInputError(f"unknown domain {self.domain!r}")
        object.__setattr__(self, "values", vals.astype(complex, copy=False))

    @classmethod
    def from_callable(
        cls,
        grid: GridSpec,
        func: Callable[..., np.ndarray],
        domain: Domain = "space",
    ) -> "SampledFunction":
        """Sample ``func(*coordinate_arrays)`` on the grid nodes."""
        pts = grid.coords(domain)
        vals = func(*[pts[..., d] for d in range(grid.dim)])
        vals = np.broadcast_to(np.asarray(vals, dtype=complex), grid.shape).copy()
        return cls(grid, vals, domain)

    def norm(self) -> float:
        """Quadrature L2 norm."""
        return float(np.sqrt(self.grid.cell(self.domain) * np.sum(np.abs(self.values) ** 2)))

    def replace(self, values: np.ndarray) -> "SampledFunction":
        return SampledFunction(self.grid, values, self.domain)


def require_same_grid(*grids: GridSpec) -> None:
    first = grids[0]
    for other in grids[1:]:
        if other != first:
            raise GridMismatchError(f"grid mismatch: {first} vs {other}")


def _axes_or_all(values: np.ndarray, axes: Sequence[int] | None) -> tuple[int, ...]:
    if axes is None:
        return tuple(range(values.ndim))
    return tuple(a % values.ndim for a in axes)


def dft_axes(values: np.ndarray, grid: GridSpec, axes: Sequence[int] | None = None) -> np.ndarray:
    """Normalized forward transform of ``values`` along ``axes``.

    Each transformed axis must have length ``grid.points`` and is interpreted
    as a space axis of ``grid``; the result sits on centered frequency nodes.
    """
    axes = _axes_or_all(values, axes)
    n = grid.points
    k = np.arange(-n // 2, n // 2)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    scale = grid.spacing / math.sqrt(2.0 * math.pi)
    out = np.asarray(values, dtype=complex)
    for ax in axes:
        out = np.fft.fftshift(np.fft.fft(out, axis=ax), axes=ax)
        shape = [1] * out.ndim
        shape[ax] = n
        out = out * (scale * sign).reshape(shape)
    return out


def idft_axes(values: np.ndarray, grid: GridSpec, axes: Sequence[int] | None = None) -> np.ndarray:
    """Inverse of :func:`dft_axes` along ``axes``."""
    axes = _axes_or_all(values, axes)
    n = grid.points
    k = np.arange(-n // 2, n // 2)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    scale = grid.freq_spacing * n / math.sqrt(2.0 * math.pi)
    out = np.asarray(values, dtype=complex)
    for ax in axes:
        shape = [1] * out.ndim
        shape[ax] = n
        out = out * (scale * sign).reshape(shape)
        out = np.fft.ifft(np.fft.ifftshift(out, axes=ax), axis=ax)
    return out


def forward_dft(f: SampledFunction) -> SampledFunction:
    """Normalized Fourier transform of space samples onto frequency nodes."""
    if f.domain != "space":
        raise InvalidInputError("forward_dft expects space-domain samples")
    return SampledFunction(f.grid, dft_axes(f.values, f.grid), "frequency")


def inverse_dft(F: SampledFunction) -> SampledFunction:
    """Inverse of :func:`forward_dft`."""
    if F.domain != "frequency":
        raise InvalidInputError("inverse_dft expects frequency-domain samples")
    return SampledFunction(F.grid, idft_axes(F.values, F.grid), "space")


def quadrature_integral(f: SampledFunction) -> complex:
    """Riemann sum of the samples with the node weight of their domain."""
    return complex(f.grid.cell(f.domain) * np.sum(f.values))


def trig_interpolate(values: np.ndarray, grid: GridSpec, axis: int, points: np.ndarray) -> np.ndarray:
    """Evaluate the band-limited periodic interpolant of ``values`` along ``axis``.

    Parameters
    ----------
    values : ndarray
        Samples with ``grid.points`` entries along ``axis``.
    grid : GridSpec
        Grid whose per-axis lattice describes ``axis``.
    axis : int
        Axis to interpolate.
    points : ndarray
        Target coordinates (any shape). Points outside the box are wrapped.

    Returns
    -------
    ndarray
        Array with ``axis`` replaced by the axes of ``points``.

    Notes
    -----
    The Nyquist coefficient is split evenly between +-N/2 so the interpolant
    of real data is real and reproduces the samples exactly.
    """
    n = grid.points
    vals = np.moveaxis(np.asarray(values, dtype=complex), axis, -1)
    coef = np.fft.fft(vals, axis=-1) / n
    kk = np.fft.fftfreq(n, d=1.0 / n)
    pts = np.asarray(points, dtype=float)
    # phase relative to the first node
    theta = (pts.reshape(-1) + grid.half_width) * (2.0 * math.pi / (2.0 * grid.half_width))
    basis = np.exp(1j * np.outer(kk, theta))
    nyq = n // 2
    basis[nyq] = np.cos(nyq * theta)
    out = coef @ basis
    out = out.reshape(vals.shape[:-1] + pts.shape)
    lead = vals.ndim - 1
    src = list(range(lead, lead + pts.ndim))
    dst = list(range(axis, axis + pts.ndim))
    return np.moveaxis(out, src, dst)


def dft_at(values: np.ndarray, grid: GridSpec, freqs: np.ndarray) -> np.ndarray:
    """Direct-summation transform of space samples at arbitrary frequencies.

    Parameters
    ----------
    values : ndarray
        Samples on ``grid`` (shape ``grid.shape``).
    freqs : ndarray
        Frequencies of shape ``(..., dim)``.

    Returns
    -------
    ndarray
        ``(2 pi)^(-n/2) h^n sum_j values_j exp(-i <x_j, w>)`` for each ``w``.
    """
    x = grid.axis()
    freqs = np.asarray(freqs, dtype=float)
    lead = freqs.shape[:-1]
    w = freqs.reshape(-1, grid.dim)
    out = np.asarray(values, dtype=complex)[None, ...]
    out = np.broadcast_to(out, (w.shape[0],) + grid.shape)
    scale = (grid.spacing / math.sqrt(2.0 * math.pi)) ** grid.dim
    # contract one axis at a time to keep the cost at O(M N^n)
    for d in range(grid.dim):
        phase = np.exp(-1j * np.outer(w[:, d], x))
        out = np.einsum("mj,mj...->m...", phase, out)
    return (scale * out).reshape(lead)
