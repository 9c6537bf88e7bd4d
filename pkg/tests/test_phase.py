import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from tfop.errors import InvalidInputError
from tfop.grid import GridSpec
from tfop.phase import (
    DEGENERACY_TOL,
    HESSIAN_BLOCKS,
    PhaseSpec,
    PhaseTaylorSplit,
    nondegeneracy,
    phase_eval,
)

PERTURBED = PhaseSpec(
    "perturbed",
    A=np.array([[0.3, 0.0, 1.0], [0.0, -0.2, -1.0], [1.0, -1.0, 0.5]]),
    b=np.array([0.1, 0.0, -0.2]),
    eps=0.05,
    freqs=np.array([[1.0, 0.5, -0.3], [0.0, 1.2, 0.7]]),
)

points3 = hnp.arrays(float, 3, elements=st.floats(-4, 4, allow_nan=False))


def test_bilinear_value_and_gradient():
    ev = phase_eval(PhaseSpec.bilinear(), [1.0, 2.0, 3.0])
    assert ev.value == -3.0
    assert ev.grad_x.tolist() == [3.0]
    assert ev.grad_y.tolist() == [-3.0]
    assert ev.grad_zeta.tolist() == [-1.0]


@given(points3)
def test_bilinear_hessian_blocks(X):
    ev = phase_eval(PhaseSpec.bilinear(), X)
    assert set(ev.hessian) == set(HESSIAN_BLOCKS)
    assert ev.hessian["xzeta"].tolist() == [[1.0]]
    assert ev.hessian["yzeta"].tolist() == [[-1.0]]
    for name in ("xx", "xy", "yy", "zetazeta"):
        assert ev.hessian[name].tolist() == [[0.0]]


def test_bilinear_two_dimensional_blocks():
    phi = PhaseSpec.bilinear(2)
    ev = phase_eval(phi, np.arange(6.0))
    np.testing.assert_array_equal(ev.hessian["xzeta"], np.eye(2))
    np.testing.assert_array_equal(ev.hessian["yzeta"], -np.eye(2))
    x, y, z = np.arange(2.0), np.arange(2.0, 4.0), np.arange(4.0, 6.0)
    assert ev.value == pytest.approx((x - y) @ z)


@pytest.mark.parametrize("phi", [PhaseSpec.bilinear(), PERTURBED], ids=["bilinear", "perturbed"])
def test_gradient_finite_differences(phi, rng):
    eps = 1e-5
    for X in rng.uniform(-3, 3, size=(10, 3)):
        fd = np.array([(phi.value(X + eps * e) - phi.value(X - eps * e)) / (2 * eps) for e in np.eye(3)])
        np.testing.assert_allclose(phi.gradient(X), fd, atol=1e-6)


def test_hessian_finite_differences(rng):
    eps = 1e-5
    for X in rng.uniform(-3, 3, size=(10, 3)):
        fd = np.array([(PERTURBED.gradient(X + eps * e) - PERTURBED.gradient(X - eps * e)) / (2 * eps) for e in np.eye(3)])
        np.testing.assert_allclose(PERTURBED.hessian(X), fd, atol=1e-6)


def test_phase_validation():
    with pytest.raises(InvalidInputError):
        PhaseSpec("bilinear", 1, 2, 1)
    with pytest.raises(InvalidInputError):
        PhaseSpec("quadratic", A=np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]))
    with pytest.raises(InvalidInputError):
        PhaseSpec("quadratic", A=np.eye(2))
    with pytest.raises(InvalidInputError):
        PhaseSpec("perturbed", freqs=np.ones((1, 2)))
    with pytest.raises(InvalidInputError):
        PhaseSpec("cubic")
    with pytest.raises(InvalidInputError):
        PhaseSpec("quadratic", A=np.full((3, 3), np.inf))
    with pytest.raises(InvalidInputError):
        PhaseSpec.bilinear().value(np.zeros(2))


@pytest.mark.parametrize("which", ["full", "yzeta", "xzeta"])
def test_bilinear_nondegenerate(which):
    nd = nondegeneracy(PhaseSpec.bilinear(), GridSpec(3, 4.0, 8), which)
    assert nd.d == 1.0
    assert not nd.degenerate


def test_bilinear_zeta_block_vanishes():
    # the bilinear phase has no zeta-zeta curvature
    nd = nondegeneracy(PhaseSpec.bilinear(), GridSpec(3, 4.0, 8), "zetazeta")
    assert nd.d == 0.0 and nd.degenerate


def test_zero_phase_degenerate():
    g = GridSpec(3, 4.0, 8)
    for which in ("full", "yzeta", "xzeta", "zetazeta"):
        nd = nondegeneracy(PhaseSpec.zero(), g, which)
        assert nd.d == 0.0 and nd.degenerate


def test_quadratic_zeta_block():
    A = np.diag([0.0, 0.0, 2.0])
    A[0, 2] = A[2, 0] = 1.0
    A[1, 2] = A[2, 1] = -1.0
    nd = nondegeneracy(PhaseSpec("quadratic", A=A), GridSpec(3, 4.0, 8), "zetazeta")
    assert nd.d == 2.0


def test_perturbed_nondegeneracy_is_grid_minimum():
    g = GridSpec(3, 4.0, 8)
    nd = nondegeneracy(PERTURBED, g, "yzeta")
    H = PERTURBED.hessian(g.coords().reshape(-1, 3))
    assert nd.d == pytest.approx(np.abs(H[:, 1, 2]).min())
    assert nd.d > DEGENERACY_TOL


def test_nondegeneracy_errors():
    with pytest.raises(InvalidInputError):
        nondegeneracy(PhaseSpec.bilinear(), GridSpec(2, 4.0, 8))
    phi = PhaseSpec("quadratic", 1, 2, 1)
    g = GridSpec(4, 4.0, 4)
    with pytest.raises(InvalidInputError):
        nondegeneracy(phi, g, "full")
    with pytest.raises(InvalidInputError):
        nondegeneracy(phi, g, "xzeta")
    with pytest.raises(InvalidInputError):
        nondegeneracy(PhaseSpec.bilinear(), GridSpec(3, 4.0, 4), "diagonal")


@pytest.mark.parametrize("phi", [PhaseSpec.bilinear(), PERTURBED], ids=["bilinear", "perturbed"])
def test_taylor_split_identity(phi):
    g = GridSpec(3, 3.0, 12)
    X1 = g.coords().reshape(-1, 3)
    cutoff = np.exp(-np.sum(X1**2, axis=-1))
    for base in ([0.0, 0.0, 0.0], [0.5, -1.0, 1.5], [-2.0, 1.0, 0.25]):
        split = PhaseTaylorSplit.at(phi, base)
        lhs = cutoff * phi.value(np.asarray(base) + X1)
        rhs = cutoff * split.psi1(X1) + split.psi2(X1, cutoff)
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)


@given(points3, points3)
def test_taylor_split_property(base, X1):
    split = PhaseTaylorSplit.at(PERTURBED, base)
    assert split.psi1(X1) + split.psi2(X1) == pytest.approx(PERTURBED.value(base + X1), abs=1e-10)
