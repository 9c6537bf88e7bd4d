"""Singular values and Schatten norms of sampled operators.

Weighted Hilbert spaces are realized by Gram matrices: the squared norm of a
sample vector ``f`` is ``f^* G f``, the quadrature of ``|V_chi f omega|^2``.
Singular values between two such spaces are those of
``G_2^(1/2) T G_1^(-1/2)``.
"""

from __future__ import annotations

import dataclasses
import logging
import math

import numpy as np

from .errors import InvalidInputError, NumericalFailure
from .grid import GridSpec, SampledFunction
from .norms import parse_exponent
from .operators import OperatorMatrix, kernel_operator
from .stft import translated_windows
from .weights import WeightSpec, WindowSpec, weight_on_phase_space

LOGGER = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12
TRUNCATION = 1e-13


@dataclasses.dataclass(frozen=True, eq=False)
class WeightedGram:
    """Positive-definite Gram matrix of the weighted STFT norm on a grid."""

    matrix: np.ndarray
    omega: WeightSpec
    window: WindowSpec
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def condition(self) -> float:
        return float(self.eigenvalues[-1] / self.eigenvalues[0])

    def power(self, s: float) -> np.ndarray:
        """``G^s`` from the stored eigendecomposition."""
        V = self.eigenvectors
        return (V * self.eigenvalues**s) @ V.conj().T

    def norm(self, f: SampledFunction) -> float:
        v = f.values.reshape(-1)
        return float(math.sqrt(max(np.vdot(v, self.matrix @ v).real, 0.0)))


def stft_matrix(window: WindowSpec) -> np.ndarray:
    """Matrix of the STFT map; rows indexed by ``(x_j, xi_k)``, columns by samples."""
    g = window.grid
    n = g.dim
    W = translated_windows(window).reshape(g.size, g.size)
    y = g.coords().reshape(-1, n)
    xi = g.coords("frequency").reshape(-1, n)
    E = np.exp(-1j * xi @ y.T) * (g.spacing / math.sqrt(2 * math.pi)) ** n
    # S[(j, k), i] = E[k, i] W[j, i]
    return (W[:, None, :] * E[None, :, :]).reshape(g.size * g.size, g.size)


def weighted_gram(omega: WeightSpec, window: WindowSpec, grid: GridSpec) -> WeightedGram:
    """Gram matrix with ``f^* G f = sum |V_chi f omega|^2 h^n (pi/L)^n``."""
    if window.grid != grid:
        raise InvalidInputError("window and grid differ")
    S = stft_matrix(window)
    w2 = weight_on_phase_space(omega, grid).reshape(-1) ** 2 * grid.cell() * grid.cell("frequency")
    G = S.conj().T @ (w2[:, None] * S)
    G = 0.5 * (G + G.conj().T)
    vals, vecs = np.linalg.eigh(G)
    if not vals[0] > 0:
        raise NumericalFailure(f"Gram matrix is not positive definite (min eigenvalue {vals[0]:.3e})")
    return WeightedGram(G, omega, window, vals, vecs)


@dataclasses.dataclass(frozen=True)
class SingularSpectrum:
    """Non-increasing singular values with descriptors of the two spaces."""

    values: tuple[float, ...]
    source: str = "l2"
    target: str = "l2"

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if np.any(vals < 0) or np.any(np.diff(vals) > 0):
            raise InvalidInputError("singular values must be non-negative and non-increasing")
        object.__setattr__(self, "values", tuple(float(v) for v in vals))


def _check_gram(G: WeightedGram | None, size: int) -> None:
    if G is None:
        return
    if G.matrix.shape != (size, size):
        raise InvalidInputError("Gram matrix does not match the operator")
    if G.condition > CONDITION_LIMIT:
        raise NumericalFailure(f"Gram matrix condition number {G.condition:.3e} exceeds {CONDITION_LIMIT:.0e}")


def _describe(G: WeightedGram | None) -> str:
    return "l2" if G is None else f"M2 weight {G.omega.factors} window {G.window.family}"


def singular_values(
    T: OperatorMatrix | np.ndarray,
    G1: WeightedGram | None = None,
    G2: WeightedGram | None = None,
) -> SingularSpectrum:
    """Singular values of ``T`` between the spaces of ``G1`` (source) and ``G2`` (target).

    ``None`` stands for the plain sample inner product.
    """
    M = T.entries if isinstance(T, OperatorMatrix) else np.asarray(T, dtype=complex)
    if M.ndim != 2:
        raise InvalidInputError("operator must be a matrix")
    _check_gram(G1, M.shape[1])
    _check_gram(G2, M.shape[0])
    if G2 is not None:
        M = G2.power(0.5) @ M
    if G1 is not None:
        M = M @ G1.power(-0.5)
    s = np.linalg.svd(M, compute_uv=False)
    if s.size and s[0] > 0:
        s = np.where(s < TRUNCATION * s[0], 0.0, s)
    return SingularSpectrum(tuple(s), _describe(G1), _describe(G2))


def schatten_norm(sigma: SingularSpectrum, p: float) -> float:
    """``(sum sigma_j^p)^(1/p)``; ``p = inf`` gives the largest singular value."""
    p = parse_exponent(p)
    s = np.asarray(sigma.values)
    if s.size == 0:
        return 0.0
    if math.isinf(p):
        return float(s[0])
    top = s[0]
    if top == 0:
        return 0.0
    # scale by the largest value to avoid overflow for large p
    return float(top * np.sum((s / top) ** p) ** (1.0 / p))


def interpolation_exponent(p1: float, p2: float, theta: float) -> float:
    """``p`` with ``1/p = (1 - theta)/p1 + theta/p2``."""
    if not 0.0 <= theta <= 1.0:
        raise InvalidInputError("theta must lie in [0, 1]")
    p1, p2 = parse_exponent(p1), parse_exponent(p2)
    inv = (1 - theta) / p1 + theta / p2
    return math.inf if inv == 0 else 1.0 / inv


def interpolation_audit(
    T: OperatorMatrix | np.ndarray | SingularSpectrum,
    p1: float,
    p2: float,
    theta: float,
    p: float | None = None,
) -> float:
    """Log-convexity slack ``||T||_p1^(1-theta) ||T||_p2^theta - ||T||_p``."""
    p_rel = interpolation_exponent(p1, p2, theta)
    if p is not None:
        p = parse_exponent(p)
        if not (math.isinf(p) and math.isinf(p_rel)) and abs(1 / p - 1 / p_rel) > 1e-12:
            raise InvalidInputError(f"exponent {p} does not satisfy the interpolation relation")
    sigma = T if isinstance(T, SingularSpectrum) else singular_values(T)
    a = schatten_norm(sigma, p1)
    b = schatten_norm(sigma, p2)
    # endpoints use the given exponents so the slack vanishes identically
    if theta == 0.0:
        p_rel = parse_exponent(p1)
    elif theta == 1.0:
        p_rel = parse_exponent(p2)
    return a ** (1 - theta) * b**theta - schatten_norm(sigma, p_rel)


def hs_kernel_identity(K: SampledFunction, n_source: int) -> float:
    """``| ||T||_I2 - ||K||_L2 |`` for the integral operator of ``K``."""
    T = kernel_operator(K, n_source)
    hs = schatten_norm(singular_values(T), 2)
    return abs(hs - K.norm())
