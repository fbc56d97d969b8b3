import math

import numpy as np
import pytest

from models.data_models import Params
from models.errors import ParameterError, SingularityError
from models.hyperbolic_gamma import GammaEngine, log_two_cosh


@pytest.fixture(params=[(1.0, 1.0), (1.0, 0.8), (0.7, 1.3)], ids=["unit", "near", "far"])
def engine(request):
    return GammaEngine(Params(*request.param))


def test_log_two_cosh_is_overflow_free():
    u = np.array([0.0, 1.0, -2.0, 800.0, -800.0])
    expected = np.log(2.0 * np.cosh(u[:3]))
    np.testing.assert_allclose(log_two_cosh(u[:3]).real, expected)
    np.testing.assert_allclose(log_two_cosh(u[3:]).real, [800.0, 800.0])


def test_reflection(engine, rng):
    p = engine.params
    z = rng.uniform(-5.0, 5.0, 2000) * p.a_l + 1j * rng.uniform(-0.9, 0.9, 2000) * p.a
    product = np.exp(engine.log_gamma(z) + engine.log_gamma(-z))
    assert np.max(np.abs(product - 1.0)) < 1e-11


def test_unimodular_on_real_line(engine):
    x = np.linspace(-6.0, 6.0, 101)
    np.testing.assert_allclose(np.abs(engine.gamma(x)), 1.0, atol=1e-12)
    assert engine.gamma(0.0) == pytest.approx(1.0, abs=1e-13)


def test_difference_equations(engine):
    p = engine.params
    x = np.linspace(-3.0, 3.0, 41)
    for half, other in ((p.a_s / 2.0, p.a_l), (p.a_l / 2.0, p.a_s)):
        ratio = np.exp(engine.log_gamma(x + 1j * half) - engine.log_gamma(x - 1j * half))
        np.testing.assert_allclose(ratio, 2.0 * np.cosh(math.pi * x / other), rtol=1e-9)


def test_swap_symmetry():
    z = np.array([0.3 + 0.1j, -1.2 + 0.4j, 2.0 - 0.3j])
    first = GammaEngine(Params(1.0, 0.8)).log_gamma(z)
    second = GammaEngine(Params(0.8, 1.0)).log_gamma(z)
    np.testing.assert_allclose(np.exp(first), np.exp(second), rtol=1e-11)


def test_continuation_far_from_the_band():
    engine = GammaEngine(Params(1.0, 1.0))
    z = 0.4 + 2.6j
    # G(z) = 2 cosh(pi (z - i/2)) G(z - i) applied twice
    w = z - 1j
    expected = 2.0 * np.cosh(math.pi * (z - 0.5j)) * 2.0 * np.cosh(math.pi * (w - 0.5j)) * engine.gamma(w - 1j)
    assert engine.gamma(z) == pytest.approx(expected, rel=1e-10)


def test_zero_at_ia(engine):
    assert abs(engine.gamma(1j * engine.params.a)) < 1e-10


def test_pole_raises_singularity(engine):
    with pytest.raises(SingularityError) as info:
        engine.log_gamma(-1j * engine.params.a)
    assert info.value.factor == "G"


def test_residue_at_minus_ia(engine):
    expected = engine.pole_zero_data().residue_at_minus_ia
    assert abs(engine.residue_limit() - expected) / abs(expected) < 1e-6


def test_u_on_real_line(engine, rng):
    z = rng.uniform(-6.0, 6.0, 2000) * engine.params.a_l
    u = engine.u(0.5, z)
    np.testing.assert_allclose(np.abs(u), 1.0, atol=1e-10)
    np.testing.assert_allclose(u * engine.u(0.5, -z), 1.0, atol=1e-10)
    assert engine.u(0.5, 0.0) == pytest.approx(-1.0, abs=1e-12)


def test_u_outside_band_raises():
    engine = GammaEngine(Params(1.0, 1.0))
    with pytest.raises(SingularityError):
        engine.u(0.5, 0.1 + 1.2j)


def test_c_inverse_vanishes_at_zero():
    engine = GammaEngine(Params(1.0, 1.0))
    assert abs(engine.c_inverse(0.5, 0.0)) < 1e-10
    assert engine.c(0.5, 0.7) * engine.c_inverse(0.5, 0.7) == pytest.approx(1.0)


def test_c_asymptotics(engine):
    p = engine.params
    for sign in (1, -1):
        envelope = engine.asymptotic_envelope_c(0.5, 0.6 * p.a_s, sign)
        z = sign * 30.0 * p.a_l + 0.1j * p.a_s
        assert float(envelope.deviation(engine.c(0.5, z), z)) < 1e-8


def test_envelope_parameter_checks():
    engine = GammaEngine(Params(1.0, 1.0))
    with pytest.raises(ParameterError):
        engine.asymptotic_envelope_c(0.5, 1.2)
    with pytest.raises(ParameterError):
        engine.asymptotic_envelope_c(0.5, 0.6, sign=0)


def test_phi_and_script_g():
    engine = GammaEngine(Params(1.0, 1.0))
    # phi(a) = exp(-i alpha a^2 / 4) for a = 1
    assert engine.phi(1.0) == pytest.approx(np.exp(-1j * 2.0 * math.pi / 4.0))
    assert np.isfinite(engine.script_g(0.5))


def test_c_reflection_symmetry(engine, rng):
    # c(b; z) = c(b; -z - 2ia + ib)
    p = engine.params
    b = 0.5 + 0.1j
    z = rng.choice([-1.0, 1.0], 200) * rng.uniform(0.2, 4.0, 200) + 0.3j * rng.uniform(-1.0, 1.0, 200) * p.a_s
    lhs = engine.c(b, z)
    rhs = engine.c(b, -z - 2j * p.a + 1j * b)
    assert np.max(np.abs(lhs - rhs) / np.abs(lhs)) < 1e-10


def test_phi_is_invariant_under_duality(engine, rng):
    p = engine.params
    for b in rng.uniform(0.05, 1.95, 20) * p.a + 1j * rng.uniform(-0.5, 0.5, 20):
        assert engine.phi(2.0 * p.a - b) == pytest.approx(engine.phi(b), rel=1e-13)
