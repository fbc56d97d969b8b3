import math

import numpy as np
import pytest

from models.data_models import (
    Configuration, ContourSpec, Coupling, Params, PolynomialSpec, ResidueTermSpec,
    configuration_from_dict, contour_spec_from_dict, format_complex, params_from_dict, parse_complex,
)
from models.errors import DimensionError, ParameterError, PreconditionError
from models.params import (
    centered_coords, in_centered_domain, in_holomorphy_domain, in_joint_domain, in_pole_free_domain,
    in_restricted_domain, min_rapidity_gap, ray_rapidities,
)


def test_derived_constants():
    p = Params(1.0, 0.8)
    assert p.alpha == pytest.approx(2 * math.pi / 0.8)
    assert p.a == pytest.approx(0.9)
    assert p.a_s == 0.8
    assert p.a_l == 1.0
    assert p.swapped() == Params(0.8, 1.0)


@pytest.mark.parametrize("a_plus, a_minus", [(0.0, 1.0), (1.0, -2.0), (math.inf, 1.0), (math.nan, 1.0)])
def test_params_reject_bad_periods(a_plus, a_minus):
    with pytest.raises(ParameterError):
        Params(a_plus, a_minus)


def test_coupling_outside_s_a_cites_strip():
    with pytest.raises(PreconditionError, match="S_a"):
        Coupling(Params(1.0, 1.0), 2.1)
    with pytest.raises(PreconditionError):
        Coupling(Params(1.0, 1.0), -0.1)


def test_coupling_strips_and_gamma():
    c = Coupling(Params(1.0, 1.0), 1.3)
    assert c.in_s_a()
    assert not c.in_s_l()
    assert c.gamma == pytest.approx(2 * math.pi * 1.3 / 2)
    assert c.dual == pytest.approx(0.7)
    assert Coupling(Params(1.0, 1.0), 1.0).in_s_l()


def test_min_rapidity_gap():
    assert min_rapidity_gap([1.0, 0.0, -2.0]) == pytest.approx(1.0)
    assert min_rapidity_gap([0.0, 1.0]) == pytest.approx(-1.0)
    with pytest.raises(DimensionError):
        min_rapidity_gap([1.0])


def test_ray_rapidities_are_uniform():
    y = ray_rapidities(3, 2.0)
    np.testing.assert_allclose(y, [2.0, 0.0, -2.0])
    assert min_rapidity_gap(y) == pytest.approx(2.0)
    assert np.sum(ray_rapidities(4, 1.3)) == pytest.approx(0.0)


def test_centered_coords():
    center, residual = centered_coords([1.0, 2.0 + 1j, 3.0 - 1j])
    assert center == pytest.approx(2.0)
    assert np.sum(residual) == pytest.approx(0.0)


def test_holomorphy_domain():
    p = Params(1.0, 1.0)
    assert in_holomorphy_domain(p, 0.5, [0.0, 1.4j])
    assert not in_holomorphy_domain(p, 0.5, [0.0, 1.6j])
    assert in_holomorphy_domain(p, 0.5, [0.3])


def test_restricted_domain_needs_s_l():
    p = Params(1.0, 1.0)
    assert in_restricted_domain(p, 0.5, [0.0, 0.9j])
    assert not in_restricted_domain(p, 0.5, [0.0, 1.1j])
    with pytest.raises(PreconditionError, match="S_l"):
        in_restricted_domain(p, 1.5, [0.0, 0.1j])


def test_centered_and_joint_domains():
    p = Params(1.0, 1.0)
    assert in_centered_domain(p, 0.5, [0.7j, -0.7j])
    assert not in_centered_domain(p, 0.5, [0.8j, -0.8j])
    assert in_joint_domain(p, 0.5, [0.1j, -0.1j], [1.0 + 0.2j, -1.0])
    assert not in_joint_domain(p, 0.5, [0.1j, -0.1j], [1.0 + 0.6j, -1.0])


def test_pole_free_domain():
    p = Params(1.0, 1.0)
    assert in_pole_free_domain(p, 0.5, [0.3j, 0.0])
    assert not in_pole_free_domain(p, 0.5, [0.6j, 0.0])
    assert not in_pole_free_domain(p, 0.5, [0.0, 0.4j, 1.1j])


def test_pole_free_domain_lies_inside_the_restricted_domain(rng):
    p = Params(1.0, 1.0)
    # consecutive gaps below beta but the total spread reaches 1.6 > a_s
    assert not in_pole_free_domain(p, 0.9, [0.8j, 0.0, -0.8j])
    for _ in range(500):
        x = rng.uniform(-1, 1, 3) + 1j * rng.uniform(-0.9, 0.9, 3)
        if not in_restricted_domain(p, 0.9, x):
            assert not in_pole_free_domain(p, 0.9, x)


def test_alpha_times_periods_is_two_pi(rng):
    periods = rng.uniform(0.05, 20.0, (10000, 2))
    products = np.array([Params(ap, am).alpha * ap * am for ap, am in periods])
    np.testing.assert_allclose(products, 2 * math.pi, rtol=1e-14)


def test_configuration_records():
    config = Configuration([0.3, -0.2], [1.0, -1.0])
    assert config.n == 2
    assert config.distinct_x()
    assert config.ordered_y()
    x, y = config.as_arrays()
    assert x.dtype == complex and y.dtype == float
    np.testing.assert_allclose(x, [0.3, -0.2])
    with pytest.raises(DimensionError):
        Configuration([0.3], [1.0, -1.0])


def test_records_from_dicts():
    params = params_from_dict({'a_plus': 1, 'a_minus': '0.8'})
    assert params == Params(1.0, 0.8)
    config = configuration_from_dict({'x': [0.3, [-0.2, 0.1]], 'y': [1, -1]})
    assert config.x == (0.3, -0.2 + 0.1j)
    spec = contour_spec_from_dict({'truncation': 6, 'panels': 12, 'nodes_per_panel': 8}, dims=2)
    assert spec.offsets == (0.0, 0.0)


def test_contour_spec_layout():
    spec = ContourSpec(1, (0.0,), 4.0, 4, 8, breakpoints=(0.5,))
    edges = spec.panel_edges()
    assert edges[0] == -4.0 and edges[-1] == 4.0
    assert 0.5 in edges
    assert spec.nodes_per_axis == 5 * 8
    assert spec.halved().nodes_per_panel == 4
    assert spec.with_dims(3, 0.7).offsets == (0.7, 0.7, 0.7)
    with pytest.raises(DimensionError):
        ContourSpec(2, (0.0,), 4.0, 4, 8)


def test_residue_term_spec_bounds():
    assert ResidueTermSpec(4, (1, 3), 0.5).L == 2
    with pytest.raises(ParameterError):
        ResidueTermSpec(3, (1, 2), 0.5)
    with pytest.raises(ParameterError):
        ResidueTermSpec(4, (3, 1), 0.5)


def test_polynomial_spec():
    poly = PolynomialSpec.power_sum(2, 1)
    assert poly.degree == 1
    np.testing.assert_allclose(poly(np.array([[1.0, 2.0], [0.5, 0.0]])), [3.0, 0.5])
    with pytest.raises(ParameterError):
        PolynomialSpec(1, (((1,), -1.0),))


def test_complex_parsing():
    assert parse_complex("0.5+0.1j") == 0.5 + 0.1j
    assert parse_complex([0.5, -0.2]) == 0.5 - 0.2j
    assert parse_complex(0.3) == 0.3
    assert parse_complex(format_complex(0.5 + 0.1j)) == 0.5 + 0.1j
