import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfop.checks import band_limited
from tfop.errors import FitnessError, GridMismatchError, InvalidInputError
from tfop.grid import GridSpec, SampledFunction
from tfop.operators import (
    OperatorMatrix,
    apply_kernel,
    fio_kernel,
    kernel_operator,
    lift_amplitude,
    op_fio,
    op_fio_rotated,
    op_pseudo,
    op_pseudo_direct,
    pseudo_kernel,
    quantization_transfer,
)
from tfop.phase import PhaseSpec

BILINEAR = PhaseSpec.bilinear()
QUADRATIC = PhaseSpec(
    "quadratic", A=np.array([[0.2, 0.1, 1.0], [0.1, -0.3, -1.0], [1.0, -1.0, 0.4]]), b=np.array([0.0, 0.3, 0.1])
)


def rel(a, b):
    return np.linalg.norm(np.ravel(a - b)) / np.linalg.norm(np.ravel(b))


@pytest.fixture(scope="module")
def g3():
    return GridSpec.self_dual(3, 16)


@pytest.fixture(scope="module")
def gauss3(g3):
    return SampledFunction.from_callable(g3, lambda x, y, z: np.exp(-(x**2 + y**2 + z**2)) * (1 + 0.2j * x))


# ---------------------------------------------------------------- FIO


def test_identity_recovery(g3, rng):
    one = SampledFunction(g3, np.ones(g3.shape))
    T = op_fio(one, BILINEAR, require_decay=False)
    f = band_limited(g3.with_dim(1), rng)
    assert rel(T.apply(f).values, f.values) < 1e-6


def test_fio_requires_decay(g3):
    one = SampledFunction(g3, np.ones(g3.shape))
    with pytest.raises(FitnessError):
        op_fio(one, BILINEAR)


def test_fio_reduces_to_pseudo(g3):
    b = lambda x, z: np.exp(-(x**2) - z**2) * (1 + 0.3 * np.cos(z))
    a3 = SampledFunction.from_callable(g3, lambda x, y, z: b(x, z))
    b2 = SampledFunction.from_callable(g3.with_dim(2), b)
    assert np.max(np.abs(op_fio(a3, BILINEAR).entries - op_pseudo(b2, 0.0).entries)) < 1e-8


def test_fio_linearity(g3, gauss3):
    a2 = gauss3.replace(np.conj(gauss3.values) * 0.5)
    alpha, beta = 1.5 - 0.5j, -0.25
    lhs = op_fio(gauss3.replace(alpha * gauss3.values + beta * a2.values), QUADRATIC).entries
    rhs = alpha * op_fio(gauss3, QUADRATIC).entries + beta * op_fio(a2, QUADRATIC).entries
    np.testing.assert_allclose(lhs, rhs, atol=1e-14 * np.abs(rhs).max())


def test_fio_zero_vector(g3, gauss3):
    T = op_fio(gauss3, QUADRATIC)
    assert np.all(T.apply(SampledFunction(g3.with_dim(1), np.zeros(16))).values == 0)


def test_fio_dimension_mismatch(g3):
    with pytest.raises(InvalidInputError):
        op_fio(SampledFunction(g3.with_dim(2), np.zeros((16, 16))), BILINEAR)


def test_kernel_zero(g3):
    K = fio_kernel(SampledFunction(g3, np.zeros(g3.shape)), QUADRATIC)
    assert np.all(K.values == 0)


@pytest.mark.parametrize("phi", [BILINEAR, QUADRATIC], ids=["bilinear", "quadratic"])
def test_kernel_two_paths(g3, gauss3, phi):
    K = fio_kernel(gauss3, phi)
    direct = op_fio(gauss3, phi).entries
    assert np.max(np.abs(kernel_operator(K, 1).entries - direct)) < 1e-10
    f = SampledFunction.from_callable(g3.with_dim(1), lambda x: np.exp(-((x - 0.5) ** 2)))
    assert np.max(np.abs(apply_kernel(K, f).values - op_fio(gauss3, phi).apply(f).values)) < 1e-10


def test_kernel_resolution_doubling():
    # on a fixed box, halving the step must not move the kernel at shared nodes
    amp = lambda x, y, z: np.exp(-(x**2 + y**2 + z**2) / 2)
    coarse = GridSpec(3, 8.0, 32)
    fine = GridSpec(3, 8.0, 64)
    Kc = fio_kernel(SampledFunction.from_callable(coarse, amp), QUADRATIC).values
    Kf = fio_kernel(SampledFunction.from_callable(fine, amp), QUADRATIC).values
    assert np.max(np.abs(Kc - Kf[::2, ::2])) < 1e-6


def test_apply_kernel_rank_one():
    g = GridSpec(1, 8.0, 64)
    chi = np.exp(-g.axis() ** 2 / 2)
    K = SampledFunction(g.with_dim(2), np.outer(chi, chi))
    f = SampledFunction(g, np.exp(-((g.axis() - 1.0) ** 2)) + 0.5j)
    expected = g.spacing * np.sum(chi * f.values) * chi
    np.testing.assert_allclose(apply_kernel(K, f).values, expected, atol=1e-12)


@given(st.complex_numbers(max_magnitude=10, allow_nan=False), st.integers(0, 2**32 - 1))
@settings(max_examples=10)
def test_apply_kernel_linear(lam, seed):
    g = GridSpec(1, 4.0, 16)
    rng = np.random.default_rng(seed)
    K = SampledFunction(g.with_dim(2), rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16)))
    f = SampledFunction(g, rng.normal(size=16) + 0j)
    h = SampledFunction(g, rng.normal(size=16) + 0j)
    lhs = apply_kernel(K, f.replace(lam * f.values + h.values)).values
    rhs = lam * apply_kernel(K, f).values + apply_kernel(K, h).values
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * (1 + abs(lam)) * np.abs(K.values).sum())


def test_apply_kernel_grid_mismatch():
    K = SampledFunction(GridSpec(2, 4.0, 16), np.zeros((16, 16)))
    with pytest.raises(GridMismatchError):
        apply_kernel(K, SampledFunction(GridSpec(1, 4.0, 8), np.zeros(8)))


def test_operator_matrix_validation():
    g = GridSpec(1, 4.0, 8)
    with pytest.raises(InvalidInputError):
        OperatorMatrix(g, g, np.zeros((8, 7)))
    with pytest.raises(InvalidInputError):
        OperatorMatrix(g, g, np.full((8, 8), np.inf))
    T = OperatorMatrix(g, g, np.eye(8) / g.spacing)
    f = SampledFunction(g, np.arange(8.0))
    assert T.pairing(f, f) == pytest.approx(np.sum(np.arange(8.0) ** 2))


# ---------------------------------------------------------------- pseudo-differential


@pytest.fixture(scope="module")
def g2():
    return GridSpec.self_dual(2, 32)


@pytest.mark.parametrize("t", [0.0, 0.5, 1.0, 0.3])
def test_unit_symbol_is_identity(g2, t, rng):
    one = SampledFunction(g2, np.ones(g2.shape))
    f = band_limited(g2.with_dim(1), rng)
    assert rel(op_pseudo(one, t).apply(f).values, f.values) < 1e-8


def test_multiplication_symbol_is_diagonal(g2):
    b = lambda x: np.exp(-(x**2) / 3) * (1 + 0.4 * x)
    a = SampledFunction.from_callable(g2, lambda x, z: b(x) + 0 * z)
    T = op_pseudo(a, 0.0).entries
    np.testing.assert_allclose(T, np.diag(b(g2.axis())), atol=1e-10)


@pytest.mark.parametrize("t", [0.0, 0.5, 1.0, 0.7])
@pytest.mark.parametrize("k", [-5, 1, 3, 9])
def test_frequency_multiplier(g2, t, k):
    a = SampledFunction.from_callable(g2, lambda x, z: z + 0 * x)
    kk = k * g2.freq_spacing
    x = g2.axis()
    e = SampledFunction(g2.with_dim(1), np.exp(1j * kk * x))
    np.testing.assert_allclose(op_pseudo(a, t).apply(e).values, kk * e.values, atol=1e-8)


@pytest.mark.parametrize("t", [0.0, 0.5, 1.0, 0.25])
def test_kernel_route_matches_direct_quadrature(g2, t):
    a = SampledFunction.from_callable(g2, lambda x, z: np.exp(-(x**2) / 2 - z**2 / 2) * (1 + 0.3 * np.cos(z)) * (1 + 0.2 * x))
    np.testing.assert_allclose(op_pseudo(a, t).entries, op_pseudo_direct(a, t).entries, atol=1e-8)


def test_symbol_grid_requirements():
    with pytest.raises(InvalidInputError):
        op_pseudo(SampledFunction(GridSpec(2, 4.0, 8), np.ones((8, 8))), 0.0)
    with pytest.raises(InvalidInputError):
        pseudo_kernel(SampledFunction(GridSpec.self_dual(3, 8), np.ones((8,) * 3)), 0.0)


# ---------------------------------------------------------------- quantization transfer


def transfer_symbol(x, z):
    return np.exp(-(x**2) / 2 - z**2 / 2) * (1 + 0.3 * np.cos(z)) * (1 + 0.2 * x)


def test_transfer_same_index(g2):
    a = SampledFunction.from_callable(g2, transfer_symbol)
    assert quantization_transfer(a, 0.4, 0.4) is a


def test_transfer_x_independent(g2):
    a = SampledFunction.from_callable(g2, lambda x, z: np.exp(-(z**2) / 2) + 0 * x)
    b = quantization_transfer(a, 0.0, 1.0)
    np.testing.assert_allclose(b.values, a.values, atol=1e-12)


def test_transfer_bilinear_closed_form(g2):
    # sin(al x) sin(be xi) / (al be) behaves like x xi near the origin; its
    # transfer from s = 0 to t = 1 has the closed form below, tending to x xi + i
    al, be = 2 * g2.freq_spacing, g2.freq_spacing
    a = SampledFunction.from_callable(g2, lambda x, z: np.sin(al * x) * np.sin(be * z) / (al * be))
    b = quantization_transfer(a, 0.0, 1.0)
    X = g2.coords()
    x, z = X[..., 0], X[..., 1]
    expected = (np.cos(al * be) * np.sin(al * x) * np.sin(be * z) + 1j * np.sin(al * be) * np.cos(al * x) * np.cos(be * z)) / (al * be)
    np.testing.assert_allclose(b.values, expected, atol=1e-10)
    origin = b.values[g2.index_of(0.0), g2.index_of(0.0)]
    c = al * be
    assert origin == pytest.approx(1j * math.sin(c) / c, abs=1e-12)
    assert origin.imag > 0


@pytest.mark.parametrize("s,t", [(0.0, 1.0), (1.0, 0.0), (0.0, 0.5), (0.5, 0.25)])
def test_transfer_operator_identity(g2, s, t):
    a = SampledFunction.from_callable(g2, transfer_symbol)
    b = quantization_transfer(a, s, t)
    assert np.max(np.abs(op_pseudo(a, s).entries - op_pseudo(b, t).entries)) < 1e-6


@given(st.floats(0, 1), st.floats(0, 1))
@settings(max_examples=10)
def test_transfer_round_trip(s, t):
    g2 = GridSpec.self_dual(2, 32)
    a = SampledFunction.from_callable(g2, transfer_symbol)
    back = quantization_transfer(quantization_transfer(a, s, t), t, s)
    np.testing.assert_allclose(back.values, a.values, atol=1e-10)


def test_transfer_rejects_aliased_symbol(g2):
    rough = np.zeros(g2.shape)
    rough[16, 16] = 1.0
    with pytest.raises(FitnessError):
        quantization_transfer(SampledFunction(g2, rough), 0.0, 1.0)


# ---------------------------------------------------------------- rotated operators


def rotated_symbol(u, z):
    return np.exp(-(u**2) / (2 * 0.75**2) - z**2 / 2) * (1 + 0.2 * u)


def test_rotated_axis_aligned_matches_fio():
    g2 = GridSpec.self_dual(2, 32)
    a = SampledFunction.from_callable(g2, rotated_symbol)
    a3 = lift_amplitude(rotated_symbol, g2.with_dim(3), 1.0, 0.0)
    T = op_fio_rotated(a, BILINEAR, 1.0, 0.0).entries
    assert np.max(np.abs(T - op_fio(a3, BILINEAR).entries)) < 1e-10


def test_rotated_general_angle_matches_change_of_variables():
    g2 = GridSpec.self_dual(2, 32)
    a = SampledFunction.from_callable(g2, rotated_symbol)
    a3 = lift_amplitude(rotated_symbol, g2.with_dim(3), 0.6, 0.8)
    T = op_fio_rotated(a, BILINEAR, 0.6, 0.8).entries
    assert np.max(np.abs(T - op_fio(a3, BILINEAR).entries)) < 1e-6


@pytest.mark.parametrize("t1,t2", [(1.0, 1.0), (0.5, 0.5), (0.0, 0.0)])
def test_rotated_constraint(t1, t2):
    g2 = GridSpec.self_dual(2, 8)
    a = SampledFunction(g2, np.ones(g2.shape))
    with pytest.raises(InvalidInputError):
        op_fio_rotated(a, BILINEAR, t1, t2, require_decay=False)
