"""Closed-form phase functions, nondegeneracy determinants and Taylor splits.

A phase is a real function of ``X = (x, y, zeta)`` with ``x`` in ``R^n2``
(output variable), ``y`` in ``R^n1`` (input variable) and ``zeta`` in
``R^m``. Every bundled family is

    phi(X) = 1/2 X^T A X + <b, X> + eps * sum_k sin(<kappa_k, X>),

so values, gradients and Hessians are available in closed form.
"""

from __future__ import annotations

import dataclasses
import logging
from typing import Literal, Sequence

import numpy as np

from .errors import InvalidInputError
from .grid import GridSpec

LOGGER = logging.getLogger(__name__)

PhaseFamily = Literal["bilinear", "quadratic", "perturbed"]
HESSIAN_BLOCKS = ("xx", "xy", "xzeta", "yy", "yzeta", "zetazeta")
DEGENERACY_TOL = 1e-10


@dataclasses.dataclass(frozen=True, eq=False)
class PhaseSpec:
    """Phase function on ``R^(n2 + n1 + m)``.

    Parameters
    ----------
    family : {"bilinear", "quadratic", "perturbed"}
        ``bilinear`` is ``<x - y, zeta>`` and needs ``n1 = n2 = m``.
    n1, n2, m : int
        Dimensions of ``y``, ``x`` and ``zeta``.
    A : ndarray, optional
        Symmetric matrix of the quadratic part.
    b : ndarray, optional
        Linear part.
    eps : float
        Amplitude of the trigonometric perturbation.
    freqs : ndarray, optional
        Perturbation frequencies ``kappa_k`` as rows.
    """

    family: PhaseFamily
    n1: int = 1
    n2: int = 1
    m: int = 1
    A: np.ndarray | None = None
    b: np.ndarray | None = None
    eps: float = 0.0
    freqs: np.ndarray | None = None

    def __post_init__(self) -> None:
        if min(self.n1, self.n2, self.m) < 1:
            raise InvalidInputError("phase dimensions must be positive")
        D = self.dim
        if self.family == "bilinear":
            if not self.n1 == self.n2 == self.m:
                raise InvalidInputError("the bilinear phase needs n1 = n2 = m")
            n = self.m
            A = np.zeros((D, D))
            eye = np.eye(n)
            A[:n, 2 * n :] = eye
            A[2 * n :, :n] = eye
            A[n : 2 * n, 2 * n :] = -eye
            A[2 * n :, n : 2 * n] = -eye
            b = np.zeros(D)
            eps, freqs = 0.0, np.zeros((0, D))
        elif self.family in ("quadratic", "perturbed"):
            A = np.zeros((D, D)) if self.A is None else np.asarray(self.A, dtype=float)
            b = np.zeros(D) if self.b is None else np.asarray(self.b, dtype=float).reshape(-1)
            if A.shape != (D, D) or b.shape != (D,):
                raise InvalidInputError(f"A must be {D}x{D} and b of length {D}")
            if not np.allclose(A, A.T, atol=1e-14):
                raise InvalidInputError("A must be symmetric")
            if self.family == "perturbed":
                eps = float(self.eps)
                freqs = np.zeros((0, D)) if self.freqs is None else np.atleast_2d(np.asarray(self.freqs, dtype=float))
                if freqs.shape[1] != D:
                    raise InvalidInputError(f"perturbation frequencies must have {D} columns")
            else:
                eps, freqs = 0.0, np.zeros((0, D))
        else:
            raise InvalidInputError(f"unknown phase family {self.family!r}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.all(np.isfinite(freqs))):
            raise InvalidInputError("phase coefficients must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "freqs", freqs)

    @classmethod
    def bilinear(cls, n: int = 1) -> "PhaseSpec":
        return cls("bilinear", n, n, n)

    @classmethod
    def zero(cls, n1: int = 1, n2: int = 1, m: int = 1) -> "PhaseSpec":
        """The phase ``phi = 0``."""
        return cls("quadratic", n1, n2, m)

    @property
    def dim(self) -> int:
        return self.n1 + self.n2 + self.m

    @property
    def N(self) -> int:
        return self.n1 + self.n2

    def slices(self) -> dict[str, slice]:
        return {
            "x": slice(0, self.n2),
            "y": slice(self.n2, self.N),
            "zeta": slice(self.N, self.dim),
        }

    def _points(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.dim:
            raise InvalidInputError(f"points must have {self.dim} coordinates")
        return X

    def value(self, X: np.ndarray) -> np.ndarray:
        X = self._points(X)
        out = 0.5 * np.einsum("...i,ij,...j->...", X, self.A, X) + X @ self.b
        if self.eps and len(self.freqs):
            out = out + self.eps * np.sum(np.sin(X @ self.freqs.T), axis=-1)
        return out

    def gradient(self, X: np.ndarray) -> np.ndarray:
        X = self._points(X)
        out = X @ self.A + self.b
        if self.eps and len(self.freqs):
            out = out + self.eps * np.cos(X @ self.freqs.T) @ self.freqs
        return out

    def hessian(self, X: np.ndarray) -> np.ndarray:
        """Hessians with shape ``X.shape[:-1] + (dim, dim)``."""
        X = self._points(X)
        out = np.broadcast_to(self.A, X.shape[:-1] + self.A.shape).copy()
        if self.eps and len(self.freqs):
            s = np.sin(X @ self.freqs.T)
            out = out - self.eps * np.einsum("...k,ki,kj->...ij", s, self.freqs, self.freqs)
        return out

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return self.value(X)


@dataclasses.dataclass(frozen=True)
class PhaseEval:
    """Value, gradient blocks and the six Hessian blocks at one point."""

    value: float
    grad_x: np.ndarray
    grad_y: np.ndarray
    grad_zeta: np.ndarray
    hessian: dict[str, np.ndarray]


def phase_eval(phi: PhaseSpec, X: Sequence[float] | np.ndarray) -> PhaseEval:
    """Closed-form evaluation of ``phi`` and its derivative blocks at ``X``."""
    X = np.asarray(X, dtype=float).reshape(-1)
    sl = phi.slices()
    g = phi.gradient(X)
    H = phi.hessian(X)
    blocks = {
        "xx": H[sl["x"], sl["x"]],
        "xy": H[sl["x"], sl["y"]],
        "xzeta": H[sl["x"], sl["zeta"]],
        "yy": H[sl["y"], sl["y"]],
        "yzeta": H[sl["y"], sl["zeta"]],
        "zetazeta": H[sl["zeta"], sl["zeta"]],
    }
    return PhaseEval(float(phi.value(X)), g[sl["x"]], g[sl["y"]], g[sl["zeta"]], blocks)


# ---------------------------------------------------------------- nondegeneracy

NondegeneracyKind = Literal["full", "yzeta", "xzeta", "zetazeta"]


@dataclasses.dataclass(frozen=True)
class Nondegeneracy:
    """Smallest absolute determinant over the grid."""

    d: float
    which: str
    degenerate: bool


def _block(phi: PhaseSpec, H: np.ndarray, which: str) -> np.ndarray:
    sl = phi.slices()
    x, y, z = sl["x"], sl["y"], sl["zeta"]
    if which == "full":
        if phi.n1 != phi.n2:
            raise InvalidInputError("the full block needs n1 = n2")
        top = np.concatenate([H[..., x, y], H[..., x, z]], axis=-1)
        bottom = np.concatenate([H[..., z, y], H[..., z, z]], axis=-1)
        return np.concatenate([top, bottom], axis=-2)
    if which == "yzeta":
        if phi.n1 != phi.m:
            raise InvalidInputError("the y-zeta block needs n1 = m")
        return H[..., y, z]
    if which == "xzeta":
        if phi.n2 != phi.m:
            raise InvalidInputError("the x-zeta block needs n2 = m")
        return H[..., x, z]
    if which == "zetazeta":
        return H[..., z, z]
    raise InvalidInputError(f"unknown determinant variant {which!r}")


def nondegeneracy(phi: PhaseSpec, grid: GridSpec, which: NondegeneracyKind = "full") -> Nondegeneracy:
    """``d = min_X |det block(X)|`` over the nodes of ``grid``.

    ``full`` uses the square matrix with rows ``(phi''_xy, phi''_xzeta)`` and
    ``(phi''_zetay, phi''_zetazeta)``.
    """
    if grid.dim != phi.dim:
        raise InvalidInputError(f"grid dimension {grid.dim} does not match the phase ({phi.dim})")
    if phi.eps == 0.0 or not len(phi.freqs):
        H = phi.A[None]
    else:
        H = phi.hessian(grid.coords().reshape(-1, phi.dim))
    dets = np.abs(np.linalg.det(_block(phi, H, which)))
    d = float(np.min(dets))
    return Nondegeneracy(d, which, d < DEGENERACY_TOL)


# ---------------------------------------------------------------- Taylor split

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_GL_NODES = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS


@dataclasses.dataclass(frozen=True, eq=False)
class PhaseTaylorSplit:
    """First-order Taylor split of ``phi`` around a base point ``X``.

    ``psi_1(X1) = phi(X) + <phi'(X), X1>`` and ``psi_2`` is the integral form
    of the remainder, multiplied by the cut-off ``cutoff`` (default 1).
    """

    phi: PhaseSpec
    base: np.ndarray
    value: float
    gradient: np.ndarray

    @classmethod
    def at(cls, phi: PhaseSpec, X: Sequence[float] | np.ndarray) -> "PhaseTaylorSplit":
        X = np.asarray(X, dtype=float).reshape(-1)
        return cls(phi, X, float(phi.value(X)), phi.gradient(X))

    def psi1(self, X1: np.ndarray) -> np.ndarray:
        return self.value + np.asarray(X1, dtype=float) @ self.gradient

    def psi2(self, X1: np.ndarray, cutoff: np.ndarray | float = 1.0) -> np.ndarray:
        """``cutoff(X1) * int_0^1 (1 - s) <phi''(X + s X1) X1, X1> ds`` by Gauss-Legendre."""
        X1 = np.asarray(X1, dtype=float)
        rem = 0.5 * np.einsum("...i,ij,...j->...", X1, self.phi.A, X1)
        if self.phi.eps != 0.0 and len(self.phi.freqs):
            # each perturbation term has Hessian -eps sin(<k, .>) k k^T
            for k in self.phi.freqs:
                u = X1 @ k
                c = float(self.base @ k)
                acc = np.zeros_like(u)
                for s, w in zip(_GL_NODES, _GL_WEIGHTS):
                    acc = acc + w * (1.0 - s) * np.sin(c + s * u)
                rem = rem - self.phi.eps * u * u * acc
        return cutoff * rem
