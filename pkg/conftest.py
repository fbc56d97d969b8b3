"""
Shared fixtures for the test suite.
"""

import numpy as np
import pytest
from scipy.integrate import trapezoid

from models.eigenfunctions import EigenEvaluator
from models.kernels import make_context
from services.kernel_cache import TabulationCache


@pytest.fixture
def unit_ctx():
    """a+ = a- = 1, b = 0.5 (alpha = 2 pi)"""
    return make_context(1.0, 1.0, 0.5)


@pytest.fixture
def asym_ctx():
    """a+ = 1, a- = 0.8, b = 0.6"""
    return make_context(1.0, 0.8, 0.6)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_evaluator(unit_ctx):
    return EigenEvaluator(unit_ctx, tolerance=1e-10, cache=TabulationCache(32))


@pytest.fixture
def asym_evaluator(asym_ctx):
    return EigenEvaluator(asym_ctx, tolerance=1e-8, cache=TabulationCache(32))


@pytest.fixture
def trapezoid_j2():
    """Brute-force J_2 on [-T, T] with step T/2000, independent of the panel rules"""
    def oracle(ctx, x, y, truncation=12.0):
        a, b, alpha = ctx.params.a, ctx.b, ctx.alpha
        z = np.linspace(-truncation, truncation, 4001)
        logs = sum(ctx.gamma.log_c(b, z - xj - 1j * a + 0.5j * b) for xj in x)
        integrand = np.exp(logs + 1j * alpha * z * (y[0] - y[1]))
        return np.exp(1j * alpha * y[1] * (x[0] + x[1])) * trapezoid(integrand, z)
    return oracle
