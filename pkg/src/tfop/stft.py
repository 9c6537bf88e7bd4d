"""Sampled short-time Fourier transforms and their identities.

``V_chi f(x_j, xi_k)`` is the normalized transform of ``y -> f(y) chi(y - x_j)``
evaluated at ``xi_k``. Translates wrap periodically on the grid, which makes
the Moyal energy identity and the time-frequency covariance exact on the
discrete model.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from typing import Sequence

import numpy as np

from .errors import InvalidInputError
from .grid import GridSpec, SampledFunction, dft_axes, forward_dft, idft_axes, require_same_grid
from .weights import WeightSpec, WindowSpec, bracket, weight_on_phase_space

LOGGER = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True, eq=False)
class StftArray:
    """STFT samples indexed by ``(x_1..x_n, xi_1..xi_n)``.

    Parameters
    ----------
    grid : GridSpec
        Grid of the transformed function (ambient dimension n).
    values : ndarray
        Complex array of shape ``grid.shape + grid.shape``.
    window : WindowSpec
        Window used to build the array.
    """

    grid: GridSpec
    values: np.ndarray
    window: WindowSpec | None = None

    def __post_init__(self) -> None:
        if self.values.shape != self.grid.shape * 2:
            raise InvalidInputError("STFT values do not match the grid")
        if not np.all(np.isfinite(self.values)):
            raise InvalidInputError("STFT values must be finite")

    @property
    def dim(self) -> int:
        return self.grid.dim

    def axis_cells(self) -> np.ndarray:
        """Quadrature weight of each array axis (space axes first)."""
        n = self.grid.dim
        return np.array([self.grid.spacing] * n + [self.grid.freq_spacing] * n)

    def energy(self) -> float:
        """Squared L2 norm over phase space."""
        cell = self.grid.cell("space") * self.grid.cell("frequency")
        return float(cell * np.sum(np.abs(self.values) ** 2))


def translated_windows(window: WindowSpec) -> np.ndarray:
    """Array ``W[j, i] = chi(y_i - x_j)`` with periodic wrap.

    Shape is ``grid.shape + grid.shape`` with translation indices first.
    """
    grid = window.grid
    n, N = grid.dim, grid.points
    idx = []
    for d in range(n):
        shape_j = [1] * (2 * n)
        shape_i = [1] * (2 * n)
        shape_j[d] = N
        shape_i[n + d] = N
        j = np.arange(N).reshape(shape_j)
        i = np.arange(N).reshape(shape_i)
        idx.append((i - j + N // 2) % N)
    return window.samples[tuple(idx)]


def stft(f: SampledFunction, window: WindowSpec, check: bool = True) -> StftArray:
    """Short-time Fourier transform of ``f`` with a real window.

    Parameters
    ----------
    f : SampledFunction
        Space samples.
    window : WindowSpec
        Real window on the same grid.
    check : bool
        Enforce the window decay check that keeps wrap-around negligible.
    """
    require_same_grid(f.grid, window.grid)
    if f.domain != "space":
        raise InvalidInputError("stft expects space-domain samples")
    if check:
        window.check_fitness()
    n = f.grid.dim
    prod = f.values[(None,) * n] * translated_windows(window)
    vals = dft_axes(prod, f.grid, axes=range(n, 2 * n))
    return StftArray(f.grid, vals, window)


def istft(V: StftArray, window: WindowSpec) -> SampledFunction:
    """Reconstruct a function from its STFT.

    Evaluates ``(2 pi)^(-n/2) ||chi||^(-2)`` times the phase-space quadrature
    of ``V(x, xi) exp(i <y, xi>) chi(y - x)``.
    """
    require_same_grid(V.grid, window.grid)
    norm2 = window.l2_norm() ** 2
    if norm2 == 0.0:
        raise InvalidInputError("cannot invert with a zero window")
    n = V.grid.dim
    inner = idft_axes(V.values, V.grid, axes=range(n, 2 * n))
    acc = V.grid.cell() * np.sum(inner * translated_windows(window), axis=tuple(range(n)))
    return SampledFunction(V.grid, acc / norm2)


def _lattice_shift(grid: GridSpec, vec: Sequence[float] | float, domain: str) -> tuple[int, ...]:
    vec = np.atleast_1d(np.asarray(vec, dtype=float))
    if vec.size != grid.dim:
        raise InvalidInputError("shift dimension does not match the grid")
    step = grid.spacing if domain == "space" else grid.freq_spacing
    out = []
    for v in vec:
        k = v / step
        if abs(k - round(k)) > 1e-9:
            raise InvalidInputError(f"{v} is not on the {domain} lattice")
        out.append(int(round(k)))
    return tuple(out)


def modulate_translate(f: SampledFunction, x0: Sequence[float] | float, xi0: Sequence[float] | float) -> SampledFunction:
    """``exp(i <y, xi0>) f(y - x0)`` with periodic wrap; shifts must be on the lattice."""
    s = _lattice_shift(f.grid, x0, "space")
    _lattice_shift(f.grid, xi0, "frequency")
    n = f.grid.dim
    shifted = np.roll(f.values, s, axis=tuple(range(n)))
    y = f.grid.coords()
    phase = np.exp(1j * (y @ np.atleast_1d(np.asarray(xi0, dtype=float))))
    return f.replace(shifted * phase)


def covariance_check(
    f: SampledFunction,
    window: WindowSpec,
    x0: Sequence[float] | float,
    xi0: Sequence[float] | float,
) -> float:
    """Largest deviation of ``|V(M T f)(x, xi)|`` from ``|V f(x - x0, xi - xi0)|``."""
    s = _lattice_shift(f.grid, x0, "space")
    r = _lattice_shift(f.grid, xi0, "frequency")
    n = f.grid.dim
    lhs = np.abs(stft(modulate_translate(f, x0, xi0), window).values)
    rhs = np.roll(np.abs(stft(f, window).values), s + r, axis=tuple(range(2 * n)))
    return float(np.max(np.abs(lhs - rhs)))


def lp_reduce(values: np.ndarray, axes: Sequence[int], p: float, cell: float) -> np.ndarray:
    """Weighted discrete ``L^p`` norm of non-negative ``values`` over ``axes``.

    ``p = inf`` is the maximum. An empty axis tuple returns ``values``.
    """
    axes = tuple(axes)
    if not axes:
        return values
    if math.isinf(p):
        return np.max(values, axis=axes)
    if p == 1.0:
        return cell * np.sum(values, axis=axes)
    # scale by the slice maximum so the p-th powers neither underflow nor overflow
    peak = np.max(values, axis=axes, keepdims=True)
    safe = np.where(peak > 0, peak, 1.0)
    scaled = (cell * np.sum((values / safe) ** p, axis=axes)) ** (1.0 / p)
    return scaled * np.squeeze(safe, axis=axes)


def h_profile(f: SampledFunction, window: WindowSpec, omega: WeightSpec | None, p: float) -> SampledFunction:
    """Frequency profile ``H(xi) = || V f(., xi) omega(., xi) ||_{L^p}``."""
    if not (p >= 1.0):
        raise InvalidInputError("exponent must lie in [1, inf]")
    V = stft(f, window)
    mag = np.abs(V.values)
    if omega is not None and not omega.is_trivial:
        mag = mag * weight_on_phase_space(omega, f.grid)
    n = f.grid.dim
    prof = lp_reduce(mag, range(n), p, f.grid.cell("space"))
    return SampledFunction(f.grid, prof, "frequency")


def tensor_lift_check(
    f: SampledFunction,
    window: WindowSpec,
    window_1: WindowSpec,
    t: float,
    omega: WeightSpec | None = None,
) -> float:
    """Compare the STFT of ``f_0(x, y) = f(y)`` with the factored form.

    Returns the largest deviation of
    ``|V_{chi_1 (x) chi} f_0 (x, y, xi, eta) omega_0|`` from
    ``|V_chi f(y, eta) omega(y, eta)| |hat chi_1(xi)| <xi>^t`` where
    ``omega_0(x, y, xi, eta) = omega(y, eta) <xi>^t``.
    """
    require_same_grid(f.grid, window.grid)
    g, g1 = f.grid, window_1.grid
    if (g1.half_width, g1.points) != (g.half_width, g.points):
        raise InvalidInputError("the lifted block must use the same per-axis lattice")
    n0, n = g1.dim, g.dim
    big = g.with_dim(n0 + n)
    f0 = SampledFunction(big, np.broadcast_to(f.values[(None,) * n0], big.shape).copy())
    w0 = np.multiply.outer(window_1.samples, window.samples)
    lhs_V = stft(f0, WindowSpec.from_values(big, w0))
    xi_br = bracket(g1.coords("frequency")) ** t
    om = np.ones(g.shape * 2) if omega is None else weight_on_phase_space(omega, g)
    # axes of lhs: (x[n0], y[n], xi[n0], eta[n])
    lhs = np.abs(lhs_V.values)
    shape_om = (1,) * n0 + g.shape + (1,) * n0 + g.shape
    shape_xi = (1,) * (n0 + n) + g1.shape + (1,) * n
    lhs = lhs * om.reshape(shape_om) * xi_br.reshape(shape_xi)
    rhs_f = np.abs(stft(f, window).values) * om
    chi1_hat = np.abs(forward_dft(window_1.values).values) * xi_br
    rhs = rhs_f.reshape(shape_om) * chi1_hat.reshape(shape_xi)
    return float(np.max(np.abs(lhs - rhs)))
