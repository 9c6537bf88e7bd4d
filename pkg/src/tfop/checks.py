"""Desk-scale verification checks.

Each check takes a seeded generator and the phase under test, and returns
:class:`~tfop.report.CheckRecord` values whose ``value`` must not exceed the
``tolerance``. The scenarios (grids, spreads, windows) are fixed here so that
the command-line suite, the tests and the scripts exercise the same cases.
"""

from __future__ import annotations

import logging
import math
from typing import Callable

import numpy as np

from . import calibration
from .grid import GridSpec, SampledFunction, forward_dft, inverse_dft
from .identities import (
    ReformulationWindows,
    direct_pairing,
    gaussian_identity_check,
    kernel_stft_identity,
    stft_reformulation_pair,
    symbol_kernel_norm_ratio,
    symbol_kernel_stft_check,
)
from .norms import modulation_norm
from .operators import fio_kernel, op_fio, op_pseudo, quantization_transfer
from .phase import DEGENERACY_TOL, PhaseSpec, nondegeneracy
from .report import CheckRecord
from .schatten import hs_kernel_identity, interpolation_audit, schatten_norm, singular_values
from .stft import covariance_check, stft, tensor_lift_check
from .weights import WindowSpec

LOGGER = logging.getLogger(__name__)

Check = Callable[[np.random.Generator, PhaseSpec], list[CheckRecord]]

SCHATTEN_EXPONENTS = (1.0, 2.0, 4.0, math.inf)


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(np.ravel(a - b)) / np.linalg.norm(np.ravel(b)))


def gaussian_family(grid: GridSpec, members: int = 10) -> list[SampledFunction]:
    """Modulated Gaussians with centres, spreads and frequencies spread over the box."""
    out = []
    for k in range(members):
        c = -2.0 + 4.0 * k / max(members - 1, 1)
        s = 0.6 + 0.1 * k
        w = 0.5 * (k % 3)
        out.append(SampledFunction.from_callable(grid, lambda x, c=c, s=s, w=w: np.exp(-((x - c) ** 2) / (2 * s * s) + 1j * w * x)))
    return out


def band_limited(grid: GridSpec, rng: np.random.Generator, band: int | None = None) -> SampledFunction:
    """Random trigonometric polynomial with lattice frequencies ``|k| <= band``."""
    N = grid.points
    band = N // 4 if band is None else band
    coef = np.zeros(grid.shape, dtype=complex)
    k = np.arange(N) - N // 2
    mask = np.ones(grid.shape, dtype=bool)
    for d in range(grid.dim):
        shape = [1] * grid.dim
        shape[d] = N
        mask &= (np.abs(k) <= band).reshape(shape)
    n_active = int(mask.sum())
    coef[mask] = rng.standard_normal(n_active) + 1j * rng.standard_normal(n_active)
    return inverse_dft(SampledFunction(grid, coef, "frequency"))


# ---------------------------------------------------------------- grid and STFT


def check_dft(rng: np.random.Generator, phi: PhaseSpec) -> list[CheckRecord]:
    g = GridSpec(1, 8.0, 64)
    f = SampledFunction(g, rng.standard_normal(64) + 1j * rng.standard_normal(64))
    F = forward_dft(f)
    rt = _rel(inverse_dft(F).values, f.values)
    lhs = np.sum(np.abs(F.values) ** 2) * g.cell("frequency")
    rhs = np.sum(np.abs(f.values) ** 2) * g.cell()
    return [
        CheckRecord("dft_round_trip", rt, 1e-12, "unitary discrete Fourier transform round trip"),
        CheckRecord("dft_parseval", abs(lhs - rhs) / rhs, 1e-12, "Parseval identity on the lattice"),
    ]


def check_moyal(rng: np.random.Generator, phi: PhaseSpec) -> list[CheckRecord]:
    g = GridSpec(1, 8.0, 64)
    chi = WindowSpec("gaussian", g, 1.0)
    moyal = m2 = 0.0
    for f in gaussian_family(g):
        target = chi.l2_norm() * f.norm()
        V = stft(f, chi)
        moyal = max(moyal, abs(math.sqrt(V.energy()) - target) / target)
        m2 = max(m2, abs(modulation_norm(V, 2, 2) - target) / target)
    return [
        CheckRecord("moyal_identity", moyal, 1e-8, "Moyal identity for the short-time Fourier transform"),
        CheckRecord("m2_norm_consistency", m2, 1e-8, "M2 norm equals the weighted L2 norm"),
    ]


def check_covariance(rng: np.random.Generator, phi: PhaseSpec) -> list[CheckRecord]:
    g = GridSpec(1, 8.0, 64)
    chi = WindowSpec("gaussian", g, 1.0)
    f = gaussian_family(g, 3)[1]
    worst = 0.0
    for _ in range(5):
        j, k = rng.integers(-10, 11, 2)
        worst = max(worst, covariance_check(f, chi, j * g.spacing, k * g.freq_spacing))
    return [CheckRecord("stft_covariance", worst, 1e-10, "magnitude covariance under time-frequency shifts")]


def check_tensor_lift(rng: np.random.Generator, phi: PhaseSpec) -> list[CheckRecord]:
    g = GridSpec(1, 8.0, 32)
    chi = WindowSpec("gaussian", g, 1.0)
    chi_1 = WindowSpec("gaussian", g, 0.8)
    f = SampledFunction.from_callable(g, lambda x: np.exp(-((x - 0.5) ** 2) / 2))
    worst = max(tensor_lift_check(f, chi, chi_1, t) for t in (0.0, 2.0))
    return [CheckRecord("tensor_lift", worst, 1e-8, "STFT of a function lifted along a dummy variable")]


# ---------------------------------------------------------------- operators


def _y_independent(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    return np.exp(-(x**2) - z**2) * (1 + 0.3 * np.cos(z))


def check_fio_reduction(rng: np.random.Generator, phi: PhaseSpec) -> list[CheckRecord]:
    g3 = GridSpec.self_dual(3, 16)
    g2, g1 = g3.with_dim(2), g3.with_dim(1)
    bil = PhaseSpec.bilinear(1)
    a3 = SampledFunction.from_callable(g3, lambda x, y, z: _y_independent(x, z))
    b2 = SampledFunction.from_callable(g2, _y_independent)
    red = float(np.max(np.abs(op_fio(a3, bil).entries - op_pseudo(b2, 0.0).entries)))
    one = SampledFunction(g3, np.ones(g3.shape))
    T = op_fio(one, bil, require_decay=False)
    f = band_limited(g1, rng)
    rec = _rel(T.apply(f).values, f.values)
    return [
        CheckRecord("fio_pseudo_reduction", red, 1e-8, "bilinear-phase FIO equals the Kohn-Nirenberg operator"),
        CheckRecord("fio_identity_recovery", rec, 1e-6, "unit amplitude with bilinear phase is the identity"),
    ]


def _transfer_symbol(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    return np.exp(-(x**2) / 2 - z**2 / 2) * (1 + 0.3 * np.cos(z)) * (1 + 0.2 * x)


def check_quantization(rng: np.random.Generator, phi: PhaseSpec) -> list[CheckRecord]:
    g2 = GridSpec.self_dual(2, 32)
    a = SampledFunction.from_callable(g2, _transfer_symbol)
    same = float(np.max(np.abs(quantization_transfer(a, 0.3, 0.3).values - a.values)))
    ops = rt = 0.0
    for s, t in ((0.0, 1.0), (1.0, 0.0), (0.0, 0.5), (0.5, 0.25)):
        b = quantization_transfer(a, s, t)
        ops = max(ops, float(np.max(np.abs(op_pseudo(a, s).entries - op_pseudo(b, t).entries))))
        rt = max(rt, float(np.max(np.abs(quantization_transfer(b, t, s).values - a.values))))
    return [
        CheckRecord("quantization_same_index", same, 0.0, "transfer between equal quantizations is the identity"),
        CheckRecord("quantization_transfer", ops, 1e-6, "Fourier multiplier between t-quantizations"),
        CheckRecord("quantization_round_trip", rt, 1e-10, "transfer s to t and back"),
    ]


# ---------------------------------------------------------------- reformulation and kernels


def reformulation_case(points: int) -> tuple[SampledFunction, SampledFunction, SampledFunction, ReformulationWindows]:
    """Gaussian amplitude, test functions and windows of the localized pairing."""
    g3 = GridSpec.self_dual(3, points)
    g1 = g3.with_dim(1)
    s = 0.45
    a = SampledFunction.from_callable(g3, lambda x, y, z: np.exp(-(x * x + y * y + z * z) / (2 * 0.5**2)) * (1 + 0.5 * x))
    f = SampledFunction.from_callable(g1, lambda x: np.exp(-((x - 0.3) ** 2) / (2 * 0.4**2)))
    g = SampledFunction.from_callable(g1, lambda x: np.exp(-((x + 0.2) ** 2) / (2 * 0.45**2)) * np.exp(0.5j * x))
    W = ReformulationWindows(
        WindowSpec("gaussian", g3, s, "l2"),
        WindowSpec("gaussian", g1, s, "l1"),
        WindowSpec("gaussian", g1, s, "l1"),
    )
    return a, f, g, W


def reformulation_error(phi: PhaseSpec, points: int) -> float:
    a, f, g, W = reformulation_case(points)
    T = stft_reformulation_pair(a, phi, f, g, W)
    D = direct_pairing(a, phi, f, g)
    return abs(T - D) / abs(D)


def check_reformulation(rng: np.random.Generator, phi: PhaseSpec) -> list[CheckRecord]:
    return [CheckRecord("reformulation_pairing", reformulation_error(phi, 8), 1e-3, "STFT reformulation of the FIO pairing")]


def check_gaussian(rng: np.random.Generator, phi: PhaseSpec) -> list[CheckRecord]:
    res = gaussian_identity_check([k / 10 for k in range(1, 11)], GridSpec(1, 8.0, 128))
    return [CheckRecord("gaussian_closed_form", res.max_error, 1e-8, "closed-form transform of the dilated Gaussian product")]


def check_kernel_stft(rng: np.random.Generator, phi: PhaseSpec) -> list[CheckRecord]:
    g3 = GridSpec.self_dual(3, 16)
    g1 = g3.with_dim(1)
    a = SampledFunction.from_callable(g3, lambda x, y, z: np.exp(-(x * x + y * y + z * z)))
    c1 = WindowSpec("gaussian", g1, 0.6)
    c2 = WindowSpec("gaussian", g1, 0.55)
    samples = [tuple(int(v) for v in rng.integers(0, 16, 4)) for _ in range(10)]
    audit = kernel_stft_identity(a, phi, c1, c2, samples)
    return [
        CheckRecord("kernel_stft_identity", audit.kernel, 1e-6, "STFT of the FIO kernel as a localized pairing"),
        CheckRecord("kernel_source_covariance", audit.source_covariance, 1e-10, "covariance of the localized source window"),
        CheckRecord("kernel_target_covariance", audit.target_covariance, 1e-10, "covariance of the localized target window"),
    ]


def symbol_family(grid: GridSpec, members: int = 10) -> list[SampledFunction]:
    """Gaussian symbols with drifting centre, spread and a cosine modulation in the dual variable."""
    out = []
    for k in range(members):
        c, w, m = 0.1 * k, 1.0 + 0.1 * k, 0.05 * k
        out.append(SampledFunction.from_callable(grid, lambda x, z, c=c, w=w, m=m: np.exp(-((x - c) ** 2) / w - z**2 / 2) * (1 + m * np.cos(z))))
    return out


def symbol_kernel_ratios(members: int = 10, t: float = 0.0, p: float = 2.0) -> np.ndarray:
    g2 = GridSpec.self_dual(2, 32)
    chi = WindowSpec("gaussian", g2, 0.9)
    return np.array([symbol_kernel_norm_ratio(a, t, chi, p) for a in symbol_family(g2, members)])


def check_symbol_kernel(rng: np.random.Generator, phi: PhaseSpec) -> list[CheckRecord]:
    g2 = GridSpec.self_dual(2, 32)
    chi = WindowSpec("gaussian", g2, 0.9)
    h = g2.spacing
    samples = [tuple(float(v) for v in h * rng.integers(-3, 4, 4)) for _ in range(10)]
    fam = symbol_family(g2, 2)
    mag = max(symbol_kernel_stft_check(a, t, chi, samples) for t in (0.0, 0.5, 1.0) for a in fam)
    r = symbol_kernel_ratios()
    spread = float(r.max() / r.min() - 1.0)
    drift = float(np.max(np.abs(r / calibration.SYMBOL_KERNEL_CONSTANT - 1.0)))
    return [
        CheckRecord("symbol_kernel_magnitude", mag, 1e-6, "symbol and kernel localized spectra agree in magnitude"),
        CheckRecord("symbol_kernel_ratio_spread", spread, calibration.DRIFT_TOLERANCE, "kernel and symbol modulation norms are proportional"),
        CheckRecord("symbol_kernel_constant_drift", drift, calibration.DRIFT_TOLERANCE, "committed proportionality constant"),
    ]


# ---------------------------------------------------------------- Schatten


def check_schatten(rng: np.random.Generator, phi: PhaseSpec) -> list[CheckRecord]:
    g3 = GridSpec.self_dual(3, 16)
    a = SampledFunction.from_callable(g3, lambda x, y, z: np.exp(-(x * x + y * y + z * z)))
    K = fio_kernel(a, phi)
    hs = hs_kernel_identity(K, 1)
    sig = singular_values(op_fio(a, phi))
    norms = [schatten_norm(sig, p) for p in SCHATTEN_EXPONENTS]
    mono = max(0.0, max(norms[i + 1] - norms[i] for i in range(len(norms) - 1)))
    worst = 0.0
    for _ in range(100):
        M = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        p1, p2 = rng.uniform(1.0, 8.0, 2)
        theta = float(rng.uniform())
        worst = max(worst, -interpolation_audit(M, p1, p2, theta))
    diag = singular_values(np.diag([3.0, 4.0]))
    exact = [schatten_norm(diag, 1), schatten_norm(diag, 2), schatten_norm(diag, math.inf)]
    diag_err = max(abs(v - e) for v, e in zip(exact, (7.0, 5.0, 4.0)))
    return [
        CheckRecord("hs_kernel_identity", hs, 1e-8, "Hilbert-Schmidt norm equals the kernel L2 norm"),
        CheckRecord("schatten_monotonicity", mono, 1e-12, "Schatten norms decrease in the exponent"),
        CheckRecord("log_convexity_violation", worst, 1e-10, "log-convexity of Schatten norms in 1/p"),
        CheckRecord("schatten_diagonal", diag_err, 0.0, "Schatten norms of diag(3, 4)"),
    ]


# ---------------------------------------------------------------- phase


def check_nondegeneracy(rng: np.random.Generator, phi: PhaseSpec) -> list[CheckRecord]:
    g = GridSpec.self_dual(phi.dim, 8)
    d = nondegeneracy(phi, g, "full").d
    # recorded as a deficit so that the shared "value <= tolerance" rule applies
    return [CheckRecord("nondegeneracy_deficit", max(0.0, DEGENERACY_TOL - d), 0.0, "mixed Hessian determinant bounded below")]


CHECKS: tuple[tuple[str, Check], ...] = (
    ("dft", check_dft),
    ("moyal", check_moyal),
    ("covariance", check_covariance),
    ("tensor_lift", check_tensor_lift),
    ("fio_reduction", check_fio_reduction),
    ("quantization", check_quantization),
    ("reformulation", check_reformulation),
    ("gaussian", check_gaussian),
    ("kernel_stft", check_kernel_stft),
    ("symbol_kernel", check_symbol_kernel),
    ("schatten", check_schatten),
    ("nondegeneracy", check_nondegeneracy),
)
