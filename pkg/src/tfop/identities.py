"""Time-frequency identities for operators, evaluated on the discrete model.

Each function evaluates both sides of an identity by independent routes and
returns the discrepancy, or returns one side so callers can compare it with a
direct construction.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from typing import Sequence

import numpy as np

from .errors import InvalidInputError
from .grid import GridSpec, SampledFunction, dft_at, require_same_grid
from .norms import modulation_norm
from .operators import fio_kernel, op_fio, pseudo_kernel
from .phase import PhaseSpec, PhaseTaylorSplit
from .stft import stft
from .weights import WeightSpec, WindowSpec

LOGGER = logging.getLogger(__name__)

DESK_SCALE_POINTS = 16
KERNEL_WINDOW_SEAM_TOL = 1e-5


# ---------------------------------------------------------------- localized pairing


@dataclasses.dataclass(frozen=True, eq=False)
class ReformulationWindows:
    """Windows of the localized pairing.

    ``chi`` lives on the amplitude grid and should have unit L2 norm;
    ``chi_1`` (source) and ``chi_2`` (target) should have unit L1 norm.
    The cut-off multiplying the phase is taken to be 1, which is admissible
    for windows without compact support such as Gaussians.
    """

    chi: WindowSpec
    chi_1: WindowSpec
    chi_2: WindowSpec


def _wrapped_shift(values: np.ndarray, base: np.ndarray, points: int) -> np.ndarray:
    """``values[base + j - N/2]`` (periodic) for a batch of base indices; shape ``(B,) + values.shape``."""
    dim = values.ndim
    idx = []
    for d in range(dim):
        shape = [1] * (dim + 1)
        shape[1 + d] = points
        j = np.arange(points).reshape(shape)
        b = base[:, d].reshape([base.shape[0]] + [1] * dim)
        idx.append((b + j - points // 2) % points)
    return values[tuple(idx)]


def localized_symbol(
    a: SampledFunction,
    phi: PhaseSpec,
    chi: WindowSpec,
    X_index: np.ndarray,
) -> np.ndarray:
    """``F((e^{i psi_2,X} chi)(a(. + X) chi))`` at the shifted frequencies for a batch of base points.

    Returns an array of shape ``(B, N_xi, N_eta)``: for every base point ``X``
    the transform is evaluated at ``(xi - phi'_x(X), eta - phi'_y(X), -phi'_zeta(X))``
    with ``(xi, eta)`` on the frequency lattice, by direct summation. The
    factor ``exp(i phi(X))`` is included.
    """
    g = a.grid
    N = g.points
    X1 = g.coords()
    axis = g.axis()
    freq = g.freq_axis()
    X = g.axis()[X_index]
    a_shift = _wrapped_shift(a.values, X_index, N)
    out = np.empty((X.shape[0], N, N), dtype=complex)
    scale = (g.spacing / math.sqrt(2 * math.pi)) ** 3
    chi2 = chi.samples**2
    for b in range(X.shape[0]):
        split = PhaseTaylorSplit.at(phi, X[b])
        G = np.exp(1j * split.psi2(X1)) * chi2 * a_shift[b]
        gx, gy, gz = split.gradient
        Ex = np.exp(-1j * np.outer(freq - gx, axis))
        Ey = np.exp(-1j * np.outer(freq - gy, axis))
        ez = np.exp(1j * gz * axis)
        out[b] = np.exp(1j * split.value) * scale * np.einsum("ax,by,z,xyz->ab", Ex, Ey, ez, G, optimize=True)
    return out


def stft_reformulation_pair(
    a: SampledFunction,
    phi: PhaseSpec,
    f: SampledFunction,
    g: SampledFunction,
    windows: ReformulationWindows,
    batch: int = 256,
) -> complex:
    """Evaluate ``(Op_phi(a) f, g)`` through localized symbols and STFTs.

    The pairing is assembled as the phase-space quadrature of
    ``H(X, xi, eta) V_chi1 f(y, -eta) conj(V_chi2 g(x, xi)) exp(-i (x xi + y eta))``
    where ``H`` is :func:`localized_symbol` scaled by
    ``(2 pi)^((m - N)/2) / c`` and ``c`` is the quadrature of
    ``chi(X1)^2 chi_2(x1) chi_1(y1)`` that normalizes the localization.
    Only ``n1 = n2 = m = 1`` is supported.
    """
    if not (phi.n1 == phi.n2 == phi.m == 1):
        raise InvalidInputError("the localized pairing is implemented for n1 = n2 = m = 1")
    grid = a.grid
    if grid.points > DESK_SCALE_POINTS:
        raise InvalidInputError(f"at most {DESK_SCALE_POINTS} points per axis are supported")
    require_same_grid(grid, windows.chi.grid)
    g1 = grid.with_dim(1)
    require_same_grid(f.grid, g.grid, windows.chi_1.grid, windows.chi_2.grid, g1)
    N = grid.points
    if not np.any(a.values):
        return 0j
    c = grid.cell() * np.einsum(
        "xyz,x,y->", windows.chi.samples**2, windows.chi_2.samples, windows.chi_1.samples
    )
    if c == 0:
        raise InvalidInputError("windows give a zero localization constant")
    V1 = stft(f, windows.chi_1).values
    V2 = stft(g, windows.chi_2).values
    neg = (N - np.arange(N)) % N
    V1m = V1[:, neg]  # V_chi1 f(y, -eta)
    x = g1.axis()
    freq = g1.freq_axis()
    # W[x, xi] = conj(V2(x, xi)) e^{-i x xi};  U[y, eta] = V1(y, -eta) e^{-i y eta}
    W = np.conj(V2) * np.exp(-1j * np.outer(x, freq))
    U = V1m * np.exp(-1j * np.outer(x, freq))
    pref = (2 * math.pi) ** ((phi.m - phi.N) / 2) / c
    all_idx = np.array(np.unravel_index(np.arange(N**3), (N,) * 3)).T
    total = 0j
    for start in range(0, all_idx.shape[0], batch):
        idx = all_idx[start : start + batch]
        H = localized_symbol(a, phi, windows.chi, idx)
        total += np.sum(H * W[idx[:, 0]][:, :, None] * U[idx[:, 1]][:, None, :])
    cell = grid.cell() * g1.cell("frequency") ** 2
    return complex(pref * cell * total)


def direct_pairing(a: SampledFunction, phi: PhaseSpec, f: SampledFunction, g: SampledFunction) -> complex:
    """``(Op_phi(a) f, g)`` from the assembled operator matrix."""
    return op_fio(a, phi).pairing(f, g)


# ---------------------------------------------------------------- kernel STFT


@dataclasses.dataclass(frozen=True)
class KernelIdentityAudit:
    """Discrepancies of the kernel STFT identity and of the two covariance identities."""

    kernel: float
    source_covariance: float
    target_covariance: float

    @property
    def max_discrepancy(self) -> float:
        return max(self.kernel, self.source_covariance, self.target_covariance)


def _translate_modulate(window: WindowSpec, shift_index: int, freq: float, sign: float) -> SampledFunction:
    """``window(. - x_shift) exp(sign * i <., freq>)`` with periodic translation."""
    g = window.grid
    vals = np.roll(window.samples, shift_index - g.points // 2)
    return SampledFunction(g, vals * np.exp(sign * 1j * g.axis() * freq))


def kernel_stft_identity(
    a: SampledFunction,
    phi: PhaseSpec,
    chi_1: WindowSpec,
    chi_2: WindowSpec,
    samples: Sequence[tuple[int, int, int, int]],
) -> KernelIdentityAudit:
    """Compare the STFT of the operator kernel with pairings of localized test functions.

    Parameters
    ----------
    samples : sequence of (ix, iy, ixi, ieta)
        Lattice indices of ``(x, y, xi, eta)``.

    Notes
    -----
    With the unitary transform the kernel side carries the factor
    ``(2 pi)^(-N/2)``: ``V_{chi_2 (x) chi_1} K (x, y, xi, eta)`` equals
    ``(2 pi)^(-N/2) (Op(a) (chi_1(. - y) e^{-i<., eta>}), chi_2(. - x) e^{i<., xi>})``.
    """
    if not (phi.n1 == phi.n2 == 1):
        raise InvalidInputError("the kernel identity is implemented for n1 = n2 = 1")
    K = fio_kernel(a, phi)
    g2 = K.grid
    g1 = g2.with_dim(1)
    require_same_grid(chi_1.grid, chi_2.grid, g1)
    win = WindowSpec.from_values(g2, np.multiply.outer(chi_2.samples, chi_1.samples))
    VK = stft(K, win).values
    T = op_fio(a, phi)
    freq = g1.freq_axis()
    V11 = np.abs(stft(chi_1.values, chi_1).values)
    V22 = np.abs(stft(chi_2.values, chi_2).values)
    N = g1.points
    kern = src = tgt = 0.0
    scale = (2 * math.pi) ** (-phi.N / 2)
    for ix, iy, ixi, ieta in samples:
        f = _translate_modulate(chi_1, iy, freq[ieta], -1.0)
        g = _translate_modulate(chi_2, ix, freq[ixi], +1.0)
        rhs = scale * T.pairing(f, g)
        kern = max(kern, abs(VK[ix, iy, ixi, ieta] - rhs))
        # covariance: |V f(y1, eta1)| = |V chi_1 chi_1(y1 - y, eta1 + eta)|
        Vf = np.abs(stft(f, chi_1).values)
        expect = np.roll(V11, (iy - N // 2, -(ieta - N // 2)), axis=(0, 1))
        src = max(src, float(np.max(np.abs(Vf - expect))))
        g_minus = _translate_modulate(chi_2, ix, freq[ixi], -1.0)
        Vg = np.abs(stft(g_minus, chi_2).values)
        expect = np.roll(V22, (ix - N // 2, -(ixi - N // 2)), axis=(0, 1))
        tgt = max(tgt, float(np.max(np.abs(Vg - expect))))
    return KernelIdentityAudit(float(kern), src, tgt)


# ---------------------------------------------------------------- symbol and kernel


def _gaussian_parameters(chi: WindowSpec) -> tuple[float, float]:
    if chi.family != "gaussian" or chi.grid.dim != 2:
        raise InvalidInputError("the symbol window must be a Gaussian on R^2")
    centre = (chi.grid.points // 2,) * 2
    return chi.param, float(chi.samples[centre])


def kernel_window(chi: WindowSpec, t: float, points: np.ndarray) -> np.ndarray:
    """``psi(p, q) = int chi((1 - t) p + t q, zeta) exp(i (q - p) zeta) dzeta`` for a Gaussian ``chi``.

    ``points`` has shape ``(..., 2)``. The integral is Gaussian and is
    evaluated in closed form.
    """
    sigma, c = _gaussian_parameters(chi)
    p, q = points[..., 0], points[..., 1]
    s = (1 - t) * p + t * q
    return c * np.exp(-(s**2) / (2 * sigma**2)) * sigma * math.sqrt(2 * math.pi) * np.exp(-(sigma**2) * (q - p) ** 2 / 2)


def _gaussian_window_at(chi: WindowSpec, points: np.ndarray) -> np.ndarray:
    sigma, c = _gaussian_parameters(chi)
    return c * np.exp(-np.sum(points**2, axis=-1) / (2 * sigma**2))


def symbol_kernel_stft_check(
    a: SampledFunction,
    t: float,
    chi: WindowSpec,
    samples: Sequence[tuple[float, float, float, float]],
) -> float:
    """Largest deviation between the kernel's and the symbol's localized spectra.

    For each sample ``(x, y, xi, eta)`` compares
    ``|F(K tau_(x - t y, x + (1 - t) y) psi)(xi + (1 - t) eta, -xi + t eta)|``
    with ``|F(a tau_(x, xi) chi)(eta, y)|``. The symbol side is evaluated at
    the dual of ``x`` first and the dual of ``xi`` second.
    """
    if a.grid.dim != 2:
        raise InvalidInputError("symbol checks are implemented for n = 1")
    require_same_grid(a.grid, chi.grid)
    K = pseudo_kernel(a, t)
    g = a.grid
    pts = g.coords()
    worst = 0.0
    for x, y, xi, eta in samples:
        shift = np.array([x - t * y, x + (1 - t) * y])
        lhs_f = K.values * kernel_window(chi, t, pts - shift)
        w = np.array([xi + (1 - t) * eta, -xi + t * eta])
        lhs = abs(dft_at(lhs_f, g, w))
        rhs_f = a.values * _gaussian_window_at(chi, pts - np.array([x, xi]))
        rhs = abs(dft_at(rhs_f, g, np.array([eta, y])))
        worst = max(worst, abs(lhs - rhs))
    return float(worst)


def kernel_weight(omega: WeightSpec, t: float) -> WeightSpec:
    """Weight on the kernel's phase space matching ``omega`` on the symbol's.

    ``omega`` lives on ``(x, xi, x*, xi*)``; the result evaluates it at
    ``((1 - t) x + t y, t xi - (1 - t) eta, xi + eta, y - x)``.
    """
    if omega.dim != 4:
        raise InvalidInputError("kernel weights are implemented for n = 1")
    M = np.array(
        [
            [1 - t, t, 0, 0],
            [0, 0, t, -(1 - t)],
            [0, 0, 1, 1],
            [-1, 1, 0, 0],
        ],
        dtype=float,
    )
    return omega.compose(M)


def symbol_kernel_norm_ratio(
    a: SampledFunction,
    t: float,
    chi: WindowSpec,
    p: float,
    omega: WeightSpec | None = None,
) -> float:
    """``||K||_{M^p(omega_0)} / ||a||_{M^p(omega)}`` with the window pair ``(psi, chi)``."""
    g = a.grid
    K = pseudo_kernel(a, t)
    psi = WindowSpec.from_values(g, kernel_window(chi, t, g.coords()))
    # psi is a sheared Gaussian whose variance along the second axis is at
    # least twice that of chi, so it cannot meet the default seam bound on the
    # same box; a looser explicit bound keeps wrap effects far below the
    # resolution of a norm ratio
    psi.check_fitness(tol=KERNEL_WINDOW_SEAM_TOL)
    omega = WeightSpec.unit(4) if omega is None else omega
    num = modulation_norm(stft(K, psi, check=False), p, p, kernel_weight(omega, t))
    den = modulation_norm(stft(a, chi), p, p, omega)
    if den == 0:
        raise InvalidInputError("zero symbol")
    return num / den


# ---------------------------------------------------------------- Gaussian transform


@dataclasses.dataclass(frozen=True)
class GaussianCheck:
    """Errors of the dilated Gaussian transform against its closed form.

    ``max_error`` uses the dilation route; ``direct_error`` samples the
    narrow product directly and is reported for information (it aliases for
    small ``t``).
    """

    max_error: float
    direct_error: float
    per_t: tuple[tuple[float, float], ...]


def gaussian_closed_form(t: float, xi: np.ndarray, n: int) -> np.ndarray:
    """``pi^(n/2) t^n (2 - t^2)^(-n/2) exp(-t^2 |xi|^2 / (4 (2 - t^2)))`` (unnormalized transform)."""
    r2 = np.sum(np.asarray(xi) ** 2, axis=-1)
    return math.pi ** (n / 2) * t**n * (2 - t * t) ** (-n / 2) * np.exp(-t * t * r2 / (4 * (2 - t * t)))


def gaussian_identity_check(t_values: Sequence[float], grid: GridSpec) -> GaussianCheck:
    """Transform of ``exp(-2|y/t|^2) exp(|y|^2)`` against its closed form.

    The normalized transform equals ``(2 pi)^(-n/2)`` times the closed form.
    Sampled directly, the product has width ``~t / 2`` and aliases on coarse
    grids, so the check uses ``F(u(./t))(xi) = t^n F(u(t .) ... )``: the
    transform of ``psi_0(./t) psi_2`` at ``xi`` equals ``t^n`` times the
    transform of ``psi_0 psi_2(t .)`` at ``t xi``, and the latter is smooth
    on the grid scale.
    """
    n = grid.dim
    xi = grid.coords("frequency")
    y = grid.coords()
    r2 = np.sum(y * y, axis=-1)
    worst = worst_direct = 0.0
    per_t = []
    for t in t_values:
        if not t > 0:
            raise InvalidInputError("t must be positive")
        expect = (2 * math.pi) ** (-n / 2) * gaussian_closed_form(t, xi, n)
        dilated = np.exp(-2 * r2) * np.exp(t * t * r2)
        got = t**n * dft_at(dilated, grid, t * xi)
        err = float(np.max(np.abs(got - expect)))
        direct = np.exp(-2 * r2 / (t * t)) * np.exp(r2)
        err_direct = float(np.max(np.abs(dft_at(direct, grid, xi) - expect)))
        worst = max(worst, err)
        worst_direct = max(worst_direct, err_direct)
        per_t.append((float(t), err))
    return GaussianCheck(worst, worst_direct, tuple(per_t))
