from itertools import combinations, permutations

import numpy as np
import pytest

from models.errors import DimensionError, SingularityError
from models.kernels import (
    accumulate, c_factorization, c_product, c_product_inverse, c_product_zero_distance, hat_y,
    inversion_factor, kernel_k, kernel_s, log_m_factor, m_factor, rho_factor,
    split_positions, u_product, weight_function,
)


def test_context_derived_values(unit_ctx):
    assert unit_ctx.alpha == pytest.approx(2 * np.pi)
    assert unit_ctx.b == 0.5
    assert abs(unit_ctx.phi) == pytest.approx(1.0)


def test_accumulate_switches_to_log_space():
    logs = np.log([2.0, 3.0, 0.5, 4.0])
    assert accumulate(logs, 2) == pytest.approx(12.0)
    assert accumulate(logs, 5) == pytest.approx(12.0)
    assert accumulate([], 3) == 1.0


def test_hat_y():
    np.testing.assert_allclose(hat_y([3.0, 1.0, 0.0]), [3.0, 1.0])
    assert hat_y([2.0]).size == 0


def test_c_product_small_cases(unit_ctx):
    assert c_product(unit_ctx, [0.4]) == 1.0
    assert c_product(unit_ctx, [0.4, -0.1]) == pytest.approx(unit_ctx.gamma.c(0.5, 0.5))
    x = [0.4, -0.1, 0.9]
    assert c_product(unit_ctx, x) * c_product_inverse(unit_ctx, x) == pytest.approx(1.0)


def test_c_product_inverse_vanishes_at_coinciding_positions(unit_ctx):
    assert abs(c_product_inverse(unit_ctx, [0.3, 0.3])) < 1e-10


def test_zero_distance(unit_ctx):
    # pair difference ib - ia + ia = 0.5i sits on the zero set when x_1 - x_2 = 0.5i
    assert c_product_zero_distance(unit_ctx, [0.5j, 0.0]) == pytest.approx(0.0, abs=1e-12)
    assert c_product_zero_distance(unit_ctx, [0.2]) == float("inf")


def test_weight_function(unit_ctx):
    z = np.array([0.3, -0.5, 1.1])
    expected = c_product_inverse(unit_ctx, z) * c_product_inverse(unit_ctx, -z)
    assert weight_function(unit_ctx, z) == pytest.approx(expected)
    assert weight_function(unit_ctx, z).imag == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_kernel_forms_agree(asym_ctx, rng, n):
    x = rng.uniform(-2.0, 2.0, n)
    z = rng.uniform(-2.0, 2.0, n - 1)
    c_form = kernel_s(asym_ctx, x, z, "c")
    g_form = kernel_s(asym_ctx, x, z, "gamma")
    assert abs(c_form - g_form) / abs(c_form) < 1e-10


def test_kernel_k_factorizes(asym_ctx):
    x = np.array([0.2, -0.7, 1.1])
    z = np.array([0.4, -0.3])
    expected = kernel_s(asym_ctx, x, z) * c_product_inverse(asym_ctx, x) * c_product_inverse(asym_ctx, -z)
    assert kernel_k(asym_ctx, x, z) == pytest.approx(expected, rel=1e-11)


def test_kernel_dimension_check(unit_ctx):
    with pytest.raises(DimensionError):
        kernel_s(unit_ctx, [0.1, 0.2], [0.3, 0.4])
    with pytest.raises(ValueError):
        kernel_s(unit_ctx, [0.1, 0.2], [0.3], form="sine")


def test_kernel_singularity_names_factor(unit_ctx):
    # c(b; t - ia + ib/2) has a pole where G(t + ib/2) vanishes, t + ib/2 = ia
    with pytest.raises(SingularityError, match="kernel S#"):
        kernel_s(unit_ctx, [0.0, 1.0], [0.75j])


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_c_factorization(asym_ctx, rng, n):
    x = rng.uniform(-2.0, 2.0, n)
    full = c_product(asym_ctx, x)
    for size in range(1, n):
        for nu in combinations(range(1, n + 1), size):
            assert abs(c_factorization(asym_ctx, x, nu) - full) / abs(full) < 1e-10


def test_split_positions():
    chosen, rest = split_positions([1.0, 2.0, 3.0, 4.0], [2, 4])
    np.testing.assert_allclose(chosen, [2.0, 4.0])
    np.testing.assert_allclose(rest, [1.0, 3.0])


def test_rapidity_factors(unit_ctx):
    y = np.array([1.0, -0.5])
    assert rho_factor(unit_ctx, y) == pytest.approx(np.exp(-2 * np.pi * 0.75 * 1.5))
    assert m_factor(unit_ctx, [0.7]) == pytest.approx(1.0)
    expected = unit_ctx.phi * rho_factor(unit_ctx, y) / unit_ctx.gamma.c(unit_ctx.coupling.dual, 1.5)
    assert np.exp(log_m_factor(unit_ctx, y)) == pytest.approx(expected)


def test_m_factor_tends_to_one(unit_ctx):
    assert abs(m_factor(unit_ctx, [6.0, 0.0]) - 1.0) < 1e-6


def test_u_product_and_inversion_factor(unit_ctx):
    x = np.array([0.4, -0.3, 1.0])
    u = unit_ctx.gamma.u
    expected = u(0.5, 0.7) * u(0.5, -0.6) * u(0.5, -1.3)
    assert u_product(unit_ctx, x) == pytest.approx(expected)
    assert inversion_factor(unit_ctx, x, (0, 1, 2)) == 1.0
    assert inversion_factor(unit_ctx, x, (1, 0, 2)) == pytest.approx(-u(0.5, 0.7))
    full_reversal = inversion_factor(unit_ctx, x, (2, 1, 0))
    assert full_reversal == pytest.approx(-expected)


def test_inversion_factor_is_unimodular(unit_ctx):
    x = np.array([0.4, -0.3, 1.0])
    for perm in permutations(range(3)):
        assert abs(inversion_factor(unit_ctx, x, perm)) == pytest.approx(1.0)


def test_kernel_s_is_symmetric_in_x_and_in_z(asym_ctx, rng):
    x = rng.uniform(-2.0, 2.0, 4)
    z = rng.uniform(-2.0, 2.0, 3)
    base = kernel_s(asym_ctx, x, z)
    for perm in permutations(range(4)):
        moved = kernel_s(asym_ctx, x[list(perm)], z[::-1])
        assert abs(moved - base) < 1e-12 * abs(base)


@pytest.mark.parametrize("fraction", [0.25, 0.5, 0.75])
def test_bound_channel_envelope_peaks_near_the_origin(unit_ctx, fraction):
    p = unit_ctx.params
    grid = np.linspace(-20.0, 20.0, 4001) * p.a
    r = fraction * p.a_s
    envelope = np.abs(unit_ctx.gamma.c(unit_ctx.b, grid + 1j * r)) * np.exp(unit_ctx.coupling.gamma * np.abs(grid))
    assert np.all(np.isfinite(envelope))
    central = np.max(envelope[np.abs(grid) <= 5.0 * p.a])
    assert np.max(envelope) <= central * (1.0 + 1e-9)


def test_inverse_c_is_finite_through_zero(unit_ctx):
    p = unit_ctx.params
    grid = np.concatenate([np.linspace(-20.0, 20.0, 4000) * p.a, [0.0, 1e-9, -1e-9]])
    values = unit_ctx.gamma.c_inverse(unit_ctx.b, grid)
    assert np.all(np.isfinite(values))
    assert np.max(np.abs(values[-3:])) < 1e-6
