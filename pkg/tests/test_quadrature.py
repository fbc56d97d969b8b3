import math

import numpy as np
import pytest

from models.data_models import ContourSpec
from models.errors import AccuracyWarning, ParameterError, QuadratureError
from models.quadrature import (
    axis_rule, check_accuracy, halving_error, integrate, legendre_rule, panel_rule,
    recommend_spec,
)


def test_legendre_rule_is_exact_for_polynomials():
    nodes, weights = legendre_rule(5)
    assert np.sum(weights) == pytest.approx(2.0)
    assert np.sum(weights * nodes ** 8) == pytest.approx(2.0 / 9.0, rel=1e-13)


def test_panel_rule_covers_interval():
    nodes, weights = panel_rule((0.0, 1.0, 3.0), 6)
    assert nodes.size == 12
    assert np.sum(weights) == pytest.approx(3.0)
    assert np.sum(weights * nodes ** 3) == pytest.approx(81.0 / 4.0)


def test_axis_rule_applies_offset():
    spec = ContourSpec(1, (0.4,), 2.0, 2, 4)
    nodes, _ = axis_rule(spec)
    np.testing.assert_allclose(nodes.imag, 0.4)


def test_gaussian_in_one_and_two_dimensions():
    spec = ContourSpec(1, (0.0,), 8.0, 16, 12)
    result = integrate(lambda p: np.exp(-p[:, 0] ** 2), spec)
    assert result.value == pytest.approx(math.sqrt(math.pi), rel=1e-12)
    assert result.error_estimate < 1e-7
    assert result.evaluations == spec.total_nodes + spec.halved().total_nodes

    plane = spec.with_dims(2)
    result = integrate(lambda p: np.exp(-np.sum(p ** 2, axis=1)), plane)
    assert result.value == pytest.approx(math.pi, rel=1e-12)


def test_shifted_contour_matches_real_line_for_entire_integrand():
    spec = ContourSpec(1, (0.3,), 9.0, 18, 12)
    result = integrate(lambda p: np.exp(-p[:, 0] ** 2 + 1j * p[:, 0]), spec)
    assert result.value == pytest.approx(math.sqrt(math.pi) * math.exp(-0.25), rel=1e-10)


def test_threads_do_not_change_the_value():
    spec = ContourSpec(2, (0.0, 0.0), 6.0, 48, 16)
    f = lambda p: np.exp(-np.sum(p ** 2, axis=1) + 0.5j * p[:, 0])
    single = integrate(f, spec, estimate_error=False)
    threaded = integrate(f, spec, threads=4, estimate_error=False)
    assert single.value == threaded.value


def test_non_finite_integrand_names_the_node():
    spec = ContourSpec(1, (0.0,), 1.0, 1, 4)
    with pytest.raises(QuadratureError) as info:
        integrate(lambda p: np.full(p.shape[0], np.nan), spec)
    assert info.value.node is not None


def test_check_accuracy_warns():
    assert check_accuracy(1.0, 1e-12, 1e-8, "sample")
    assert check_accuracy(1.0, 1.0, None, "sample")
    with pytest.warns(AccuracyWarning, match="sample"):
        assert not check_accuracy(1.0, 1e-3, 1e-8, "sample")


def test_recommend_spec_truncation_and_density():
    spec = recommend_spec(decay_rate=2.0, oscillation_rate=0.0, tol=1e-8, dims=1, spread=1.0,
                          nodes_per_panel=16, min_density=2.0)
    assert spec.truncation == pytest.approx(math.log(1e8) / 2.0 + 1.0)
    assert spec.nodes_per_axis / (2 * spec.truncation) >= 2.0
    with pytest.raises(ParameterError):
        recommend_spec(decay_rate=0.0, oscillation_rate=1.0, tol=1e-8, dims=1)


def test_halving_error():
    assert halving_error(1.0, 1.0) == 0.0
    assert halving_error(2.0, 2.0 + 1e-4) == pytest.approx(1e-4)
    assert halving_error(1.0 + 1j, 1.0) == pytest.approx(1.0)


def test_error_estimate_covers_a_kink():
    # |z| has a kink inside the middle panel, so the rule converges only algebraically
    spec = ContourSpec(1, (0.0,), 1.5, 3, 8)
    result = integrate(lambda p: np.abs(p[:, 0]), spec)
    true_error = abs(result.value - 2.25)
    assert true_error > 1e-3
    assert result.error_estimate >= true_error


def test_integral_is_linear():
    spec = ContourSpec(1, (0.2,), 8.0, 16, 12)
    f = lambda p: np.exp(-p[:, 0] ** 2)
    g = lambda p: np.exp(-(p[:, 0] - 0.5) ** 2 + 2j * p[:, 0])
    combined = integrate(lambda p: 2.0 * f(p) - 0.5j * g(p), spec).value
    separate = 2.0 * integrate(f, spec).value - 0.5j * integrate(g, spec).value
    assert abs(combined - separate) < 1e-13


def test_doubling_the_nodes_changes_nothing_for_a_gaussian():
    f = lambda p: np.exp(-p[:, 0] ** 2 + 0.7j * p[:, 0])
    coarse = integrate(f, ContourSpec(1, (0.0,), 8.0, 16, 12)).value
    fine = integrate(f, ContourSpec(1, (0.0,), 8.0, 16, 24)).value
    assert abs(fine - coarse) < 1e-13 * abs(fine)


def test_swapping_axes_leaves_the_integral_unchanged():
    spec = ContourSpec(2, (0.0, 0.0), 6.0, 12, 12)
    f = lambda p: np.exp(-p[:, 0] ** 2 - 2.0 * p[:, 1] ** 2 + 0.3j * p[:, 0] * p[:, 1] + p[:, 1])
    direct = integrate(f, spec).value
    swapped = integrate(lambda p: f(p[:, ::-1]), spec).value
    assert abs(direct - swapped) < 1e-13 * abs(direct)
