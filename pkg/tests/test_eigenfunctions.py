import math
from itertools import permutations

import numpy as np
import pytest

from models.data_models import ContourSpec, Representation
from models.eigenfunctions import (
    EigenEvaluator, contract, outer_weights, pair_grid, sum_grid, translation_phase,
)
from models.errors import DimensionError, ParameterError, PreconditionError
from models.kernels import inversion_factor, u_product
from models.quadrature import axis_rule
from services.kernel_cache import TabulationCache

X2 = np.array([0.3, -0.2])
Y2 = np.array([1.0, -1.0])


def rel(value, reference):
    return abs(value - reference) / abs(reference)


def test_contract_matches_explicit_sum(rng):
    table = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    vectors = rng.normal(size=(3, 4))
    expected = np.einsum("mn,bm,bn->b", table, vectors, vectors)
    np.testing.assert_allclose(contract(table, vectors), expected)


def test_grid_helpers():
    matrix = np.arange(9.0).reshape(3, 3)
    grid = pair_grid(matrix, 3)
    assert grid[0, 1, 2] == matrix[0, 1] * matrix[0, 2] * matrix[1, 2]
    nodes = np.array([1.0, 2.0, 4.0])
    assert sum_grid(nodes, 2)[1, 2] == 6.0
    assert outer_weights(nodes, 2)[2, 1] == 8.0


def test_translation_phase():
    assert translation_phase(2 * math.pi, 0.5, [1.0, 1.0]) == pytest.approx(1.0)


def test_level_one_is_a_plane_wave(unit_evaluator):
    result = unit_evaluator.e([0.5], [2.0])
    assert result.value == pytest.approx(1.0, abs=1e-14)
    assert result.error_estimate == 0.0
    assert unit_evaluator.j([0.25], [1.0]).value == pytest.approx(1j, abs=1e-14)


def test_j2_matches_trapezoid_oracle(unit_ctx, unit_evaluator, trapezoid_j2):
    result = unit_evaluator.j(X2, Y2)
    assert rel(result.value, trapezoid_j2(unit_ctx, X2, Y2)) < 1e-8
    assert np.isfinite(result.error_estimate)


def test_e2_matches_oracle_through_prefactors(unit_ctx, unit_evaluator, trapezoid_j2):
    direct = unit_evaluator.e(X2, Y2).value
    expected = unit_evaluator.via_j_factor(X2, Y2) * trapezoid_j2(unit_ctx, X2, Y2)
    assert rel(direct, expected) < 1e-8


def test_e2_routes_agree(unit_evaluator, rng):
    for _ in range(5):
        x = rng.uniform(-1.0, 1.0, 2)
        y = np.sort(rng.uniform(-1.5, 1.5, 2))[::-1]
        direct = unit_evaluator.e(x, y).value
        via_j = unit_evaluator.e(x, y, Representation.VIA_J).value
        assert rel(via_j, direct) < 1e-7


def test_j2_centered_route(unit_evaluator):
    assert rel(unit_evaluator.j_centered(X2, Y2).value, unit_evaluator.j(X2, Y2).value) < 1e-7


def test_e2_symmetries(unit_ctx, unit_evaluator):
    base = unit_evaluator.e(X2, Y2).value
    swapped = unit_evaluator.e(X2[::-1], Y2).value
    assert rel(swapped, base * inversion_factor(unit_ctx, X2, (1, 0))) < 1e-7
    shifted = unit_evaluator.e(X2 + 0.37, Y2).value
    assert rel(shifted, translation_phase(unit_ctx.alpha, 0.37, Y2) * base) < 1e-7
    parity = unit_evaluator.e(-X2, -Y2).value
    assert rel(parity, base * u_product(unit_ctx, X2) * u_product(unit_ctx, Y2)) < 1e-7


def test_j2_is_symmetric(unit_evaluator):
    base = unit_evaluator.j(X2, Y2).value
    assert rel(unit_evaluator.j(X2[::-1], Y2).value, base) < 1e-8
    assert rel(unit_evaluator.j(-X2, -Y2).value, base) < 1e-7


def test_e_vanishes_at_coinciding_positions(unit_evaluator):
    assert abs(unit_evaluator.e([0.4, 0.4], Y2).value) < 1e-8


def test_complex_positions_are_centred(unit_evaluator):
    x = np.array([0.3 + 0.2j, -0.2 - 0.1j])
    centred = unit_evaluator.j_centered(x, Y2).value
    assert rel(centred, unit_evaluator.j(x, Y2).value) < 1e-7
    # E with an imaginary spread beyond the uncentred band still evaluates
    wide = np.array([0.3 + 0.7j, -0.2 - 0.7j])
    assert np.isfinite(unit_evaluator.e(wide, Y2).value)


def test_precondition_outside_holomorphy_domain(unit_evaluator):
    with pytest.raises(PreconditionError):
        unit_evaluator.e([0.0, 1.6j], Y2)


def test_uncentred_contour_requires_narrow_band(unit_evaluator):
    with pytest.raises(PreconditionError, match="centre"):
        unit_evaluator.j([0.8j, 0.0], Y2)


def test_level_limit(unit_ctx):
    evaluator = EigenEvaluator(unit_ctx, max_level=2, cache=TabulationCache(4))
    with pytest.raises(ParameterError):
        evaluator.e([0.1, 0.2, 0.3], [1.0, 0.0, -1.0])


def test_tables_are_cached(unit_ctx):
    evaluator = EigenEvaluator(unit_ctx, tolerance=1e-8, cache=TabulationCache(16))
    first = evaluator.e(X2, Y2)
    second = evaluator.e(X2[::-1], Y2)
    assert first.cache_misses > 0
    assert second.cache_hits > 0
    assert second.cache_misses == 0


def test_explicit_spec_is_used(unit_ctx):
    spec = ContourSpec(1, (0.0,), 12.0, 24, 16)
    evaluator = EigenEvaluator(unit_ctx, spec=spec, cache=TabulationCache(8))
    result = evaluator.e(X2, Y2)
    assert result.evaluations == spec.nodes_per_axis + spec.halved().nodes_per_axis


@pytest.mark.slow
def test_level_three_routes_agree(asym_ctx, asym_evaluator, rng):
    for _ in range(3):
        x = rng.uniform(-1.0, 1.0, 3)
        y = np.array([1.2, 0.1, -0.9])
        direct = asym_evaluator.e(x, y).value
        assert rel(asym_evaluator.e(x, y, Representation.VIA_J).value, direct) < 1e-6
        assert rel(asym_evaluator.j_centered(x, y).value, asym_evaluator.j(x, y).value) < 1e-6


@pytest.mark.slow
def test_level_three_permutations(asym_ctx, asym_evaluator):
    x = np.array([0.4, -0.3, 0.9])
    y = np.array([1.0, 0.2, -0.8])
    base = asym_evaluator.e(x, y).value
    for perm in permutations(range(3)):
        moved = asym_evaluator.e(x[list(perm)], y).value
        assert rel(moved, base * inversion_factor(asym_ctx, x, perm)) < 1e-6


def test_tabulated_e_matches_pointwise(unit_ctx):
    spec = ContourSpec(1, (0.0,), 10.0, 40, 16)
    evaluator = EigenEvaluator(unit_ctx, spec=spec, cache=TabulationCache(8))
    nodes, _ = axis_rule(spec)
    np.testing.assert_allclose(evaluator.tabulate_e(1, [2.0], spec), np.exp(2j * unit_ctx.alpha * nodes))
    table = evaluator.tabulate_e(2, Y2, spec)
    assert table.shape == (nodes.size, nodes.size)
    i, j = nodes.size // 2 - 5, nodes.size // 2 + 7
    expected = evaluator.e([nodes[i].real, nodes[j].real], Y2).value
    assert table[i, j] == pytest.approx(expected, rel=1e-10)
    with pytest.raises(DimensionError):
        evaluator.tabulate_e(2, [1.0], spec)


def test_tabulated_j_is_symmetric(unit_ctx):
    spec = ContourSpec(1, (0.0,), 8.0, 24, 8)
    table = EigenEvaluator(unit_ctx, cache=TabulationCache(8)).tabulate_j(2, Y2, spec)
    np.testing.assert_allclose(table, table.T, atol=1e-13)
