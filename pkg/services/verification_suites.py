"""
Verification suites - seeded property checks over every module.
Each suite returns a list of Check rows; the report embeds the seed and the
parameters so a failure can be replayed.
"""

import logging
import math
import time
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Callable, Dict, List

import numpy as np

from models.asymptotics import AsymptoticForm, fit_decay
from models.bounds_lab import (
    GROWTH_CASES, SLOPE_SLACK, exponent_f, fit_envelope, growth_experiments, polynomial_integral,
    registered_claims,
)
from models.data_models import AsymptoticMode, PolynomialSpec, Representation, RunConfig
from models.eigenfunctions import EigenEvaluator
from models.errors import RcmError
from models.kernels import (
    KernelContext, c_factorization, c_product, inversion_factor, kernel_s, make_context, u_product,
)
from models.params import ray_rapidities
from models.residue_scheme import ContourShiftScheme, u_factor

logger = logging.getLogger(__name__)

LEMMA_PARAMS = (1.0, 0.8, 0.6)
ASYMPTOTIC_COUPLINGS = (0.5, 0.9, 1.3)


@dataclass
class Check:
    """One measured quantity against its threshold"""
    name: str
    measured: float
    threshold: float
    passed: bool

    @classmethod
    def at_most(cls, name: str, measured: float, threshold: float) -> "Check":
        measured = float(measured)
        return cls(name, measured, threshold, bool(np.isfinite(measured) and measured <= threshold))

    @classmethod
    def at_least(cls, name: str, measured: float, threshold: float) -> "Check":
        measured = float(measured)
        return cls(name, measured, threshold, bool(np.isfinite(measured) and measured >= threshold))

    def to_dict(self):
        return {'name': self.name, 'measured': self.measured, 'threshold': self.threshold, 'pass': self.passed}


def relative_gap(value, reference) -> float:
    value = np.asarray(value, dtype=complex)
    reference = np.asarray(reference, dtype=complex)
    scale = np.maximum(np.abs(reference), np.finfo(float).tiny)
    return float(np.max(np.abs(value - reference) / scale))


def _context(config: RunConfig) -> KernelContext:
    return make_context(config.a_plus, config.a_minus, config.b)


def _real_context(config: RunConfig) -> KernelContext:
    return make_context(config.a_plus, config.a_minus, config.b.real)


def _random_x(rng, n: int, width: float = 1.0) -> np.ndarray:
    while True:
        x = rng.uniform(-width, width, n)
        if n < 2 or np.min(np.abs(np.subtract.outer(x, x))[np.triu_indices(n, 1)]) > 0.05:
            return x


def _random_y(rng, n: int, min_gap: float = 0.2, width: float = 1.5) -> np.ndarray:
    while True:
        y = np.sort(rng.uniform(-width, width, n))[::-1]
        if n < 2 or np.min(-np.diff(y)) > min_gap:
            return y


# -- gamma ---------------------------------------------------------------------

def gamma_suite(config: RunConfig, rng) -> List[Check]:
    ctx = _context(config)
    engine = ctx.gamma
    p = ctx.params
    checks = []

    z = rng.uniform(-5.0, 5.0, 10000) * p.a_l + 1j * rng.uniform(-0.9, 0.9, 10000) * p.a
    product = np.exp(engine.log_gamma(z) + engine.log_gamma(-z))
    checks.append(Check.at_most("reflection G(z)G(-z)=1", np.max(np.abs(product - 1.0)), 1e-11))

    checks.append(Check.at_most("zero |G(ia)|", abs(engine.gamma(1j * p.a)), 1e-10))

    expected = engine.pole_zero_data().residue_at_minus_ia
    checks.append(Check.at_most("residue at -ia", relative_gap(engine.residue_limit(), expected), 1e-6))

    for sign in (1, -1):
        envelope = engine.asymptotic_envelope_c(ctx.b, 0.6 * p.a_s, sign)
        w = sign * 30.0 * p.a_l + 0.1j * p.a_s
        deviation = float(envelope.deviation(engine.c(ctx.b, w), w))
        checks.append(Check.at_most(f"c asymptotics at Re z = {sign * 30}a_l", deviation, 1e-8))

    real = rng.uniform(-3.0, 3.0, 1000) * p.a_l
    for half, period, other in ((p.a_s / 2.0, "short", p.a_l), (p.a_l / 2.0, "long", p.a_s)):
        ratio = np.exp(engine.log_gamma(real + 1j * half) - engine.log_gamma(real - 1j * half))
        expected = 2.0 * np.cosh(math.pi * real / other)
        checks.append(Check.at_most(f"difference equation, {period} period", relative_gap(ratio, expected), 1e-9))
    return checks


# -- kernels and algebraic identities -------------------------------------------

def kernels_suite(config: RunConfig, rng) -> List[Check]:
    ctx = _real_context(config)
    engine = ctx.gamma
    p = ctx.params
    checks = []

    z = rng.uniform(-6.0, 6.0, 10000) * p.a_l
    u_plus = engine.u(ctx.b, z)
    u_minus = engine.u(ctx.b, -z)
    checks.append(Check.at_most("u(z)u(-z)=1", np.max(np.abs(u_plus * u_minus - 1.0)), 1e-10))
    checks.append(Check.at_most("|u| = 1 on the real line", np.max(np.abs(np.abs(u_plus) - 1.0)), 1e-10))
    checks.append(Check.at_most("u(0) = -1", abs(engine.u(ctx.b, 0.0) + 1.0), 1e-12))

    gaps = {'kernel forms': 0.0, 'factorization': 0.0, 'E_as modes': 0.0}
    for n in range(2, 6):
        for _ in range(3):
            x = _random_x(rng, n, 2.0)
            zz = rng.uniform(-2.0, 2.0, n - 1)
            gaps['kernel forms'] = max(gaps['kernel forms'], relative_gap(
                kernel_s(ctx, x, zz, "gamma"), kernel_s(ctx, x, zz, "c")))
            full = c_product(ctx, x)
            for size in range(1, n):
                for nu in combinations(range(1, n + 1), size):
                    gaps['factorization'] = max(gaps['factorization'],
                                                relative_gap(c_factorization(ctx, x, nu), full))
            y = _random_y(rng, n)
            gaps['E_as modes'] = max(gaps['E_as modes'], relative_gap(
                AsymptoticForm(ctx, AsymptoticMode.C_RATIO)(x, y), AsymptoticForm(ctx)(x, y)))
    for name, gap in gaps.items():
        checks.append(Check.at_most(name, gap, 1e-10))

    form = AsymptoticForm(ctx)
    x = _random_x(rng, 2)
    y = _random_y(rng, 2)
    two_term = (np.exp(1j * p.alpha * (x[0] * y[0] + x[1] * y[1]))
                - engine.u(ctx.b, x[1] - x[0]) * np.exp(1j * p.alpha * (x[1] * y[0] + x[0] * y[1])))
    checks.append(Check.at_most("E_as two-term expansion", abs(form(x, y) - two_term), 1e-12))

    x = _random_x(rng, 3)
    y = _random_y(rng, 3)
    shift = 0.37
    shifted = form(x, y + shift)
    checks.append(Check.at_most("E_as rapidity shift", relative_gap(
        shifted, np.exp(1j * p.alpha * shift * np.sum(x)) * form(x, y)), 1e-12))
    worst = 0.0
    for perm in permutations(range(3)):
        worst = max(worst, relative_gap(form(x[list(perm)], y), form(x, y) * inversion_factor(ctx, x, perm)))
    checks.append(Check.at_most("E_as permutation covariance", worst, 1e-10))
    return checks


# -- recursion and symmetry --------------------------------------------------------

def _suite_evaluator(ctx: KernelContext, tolerance: float, n: int) -> EigenEvaluator:
    """One shared axis rule wide enough for every sampled configuration"""
    base = EigenEvaluator(ctx, tolerance=tolerance)
    wide_x = np.linspace(-1.0, 1.0, n)
    wide_y = np.linspace(1.5, -1.5, n)
    return EigenEvaluator(ctx, spec=base.recommend(wide_x, wide_y), tolerance=tolerance)


def symmetry_suite(config: RunConfig, rng, samples: int = 20) -> List[Check]:
    ctx = _real_context(config)
    alpha = ctx.alpha
    checks = []
    for n, threshold in ((2, 1e-7), (3, 1e-6)):
        evaluator = _suite_evaluator(ctx, min(config.tolerance, 1e-8), n)
        j_gap, e_gap = 0.0, 0.0
        for _ in range(samples):
            x = _random_x(rng, n)
            y = _random_y(rng, n)
            j_gap = max(j_gap, relative_gap(evaluator.j_centered(x, y).value, evaluator.j(x, y).value))
            e_gap = max(e_gap, relative_gap(evaluator.e(x, y, Representation.VIA_J).value,
                                            evaluator.e(x, y).value))
        checks.append(Check.at_most(f"J vs J_alt, N={n}", j_gap, threshold))
        checks.append(Check.at_most(f"E direct vs via J, N={n}", e_gap, threshold))

        x = _random_x(rng, n)
        y = _random_y(rng, n)
        base = evaluator.e(x, y).value
        j_base = evaluator.j(x, y).value
        perm_gap = 0.0
        for perm in permutations(range(n)):
            moved = x[list(perm)]
            perm_gap = max(perm_gap, relative_gap(evaluator.e(moved, y).value,
                                                  base * inversion_factor(ctx, x, perm)))
            perm_gap = max(perm_gap, relative_gap(evaluator.j(moved, y).value, j_base))
        checks.append(Check.at_most(f"permutation identities, N={n}", perm_gap, 1e-6))

        eta = 0.37
        checks.append(Check.at_most(f"translation phase, N={n}", relative_gap(
            evaluator.e(x + eta, y).value, np.exp(1j * alpha * eta * np.sum(y)) * base), 1e-6))
        parity = base * u_product(ctx, x) * u_product(ctx, y)
        checks.append(Check.at_most(f"parity, N={n}", relative_gap(evaluator.e(-x, -y).value, parity), 1e-6))
        checks.append(Check.at_most(f"J parity, N={n}", relative_gap(evaluator.j(-x, -y).value, j_base), 1e-6))

    evaluator = _suite_evaluator(ctx, min(config.tolerance, 1e-8), 2)
    coinciding = evaluator.e([0.4, 0.4], [1.0, -1.0]).value
    checks.append(Check.at_most("E vanishes at coinciding x", abs(coinciding), 1e-8))
    return checks


# -- contour shift ---------------------------------------------------------------

def lemma_suite(config: RunConfig, rng, samples: int = 10) -> List[Check]:
    ctx = make_context(*LEMMA_PARAMS)
    p = ctx.params
    evaluator = _suite_evaluator(ctx, 1e-6, 3)
    scheme = ContourShiftScheme(evaluator, threads=config.threads)
    checks = []

    worst = 0.0
    for _ in range(samples):
        x = _random_x(rng, 3)
        gap = rng.uniform(0.5, 1.0) * p.a
        y = ray_rapidities(3, gap)
        worst = max(worst, relative_gap(scheme.rhs(x, y).value, evaluator.e(x, y).value))
    checks.append(Check.at_most("shifted contour vs direct E_3", worst, 1e-4))

    # the real line loses alpha (a - Re b/2) sum(y_hat) / ln 10 digits, so at
    # d_3 in [2a, 6a] two shifts of the contour are compared instead
    wide = EigenEvaluator(ctx, tolerance=1e-5)
    low_r, high_r = 0.5 * p.a_s, 0.7 * p.a_s
    far = wide.with_spec(ContourShiftScheme(wide, r=high_r).spec_for(
        np.linspace(-1.0, 1.0, 3), ray_rapidities(3, 6.0 * p.a)))
    worst = 0.0
    for _ in range(samples):
        x = _random_x(rng, 3)
        y = ray_rapidities(3, rng.uniform(2.0, 6.0) * p.a)
        low = ContourShiftScheme(far, r=low_r, threads=config.threads).rhs(x, y).value
        high = ContourShiftScheme(far, r=high_r, threads=config.threads).rhs(x, y).value
        worst = max(worst, relative_gap(low, high))
    checks.append(Check.at_most("shift independence, d_3 in [2a, 6a]", worst, 1e-4))

    real_x = _random_x(rng, 3)

    def u(z):
        return ctx.gamma.u(ctx.b, z)

    expected = {
        (1,): 1.0,
        (2,): -u(real_x[1] - real_x[0]),
        (3,): u(real_x[2] - real_x[0]) * u(real_x[2] - real_x[1]),
    }
    worst = max(abs(u_factor(ctx, real_x, nu) - value) for nu, value in expected.items())
    checks.append(Check.at_most("U_nu for N=3, L=1", worst, 1e-12))

    unimodular = max(abs(abs(u_factor(ctx, real_x, nu)) - 1.0)
                     for size in (1, 2) for nu in combinations(range(1, 4), size))
    checks.append(Check.at_most("|U_nu| = 1 for real x", unimodular, 1e-10))
    return checks


# -- asymptotics -------------------------------------------------------------------

def asymptotics_suite(config: RunConfig, rng, levels=(2, 3)) -> List[Check]:
    checks = []
    for b in ASYMPTOTIC_COUPLINGS:
        ctx = make_context(1.0, 1.0, b)
        threshold = ctx.alpha * ctx.params.a_s / 2.0
        for n in levels:
            x = _random_x(rng, n)
            evaluator = EigenEvaluator(ctx, tolerance=1e-10)
            window = ctx.params.a * np.linspace(0.25, 3.0 if n == 2 else 2.5, 12)
            try:
                fit = fit_decay(evaluator, x, window, threads=config.threads)
            except RcmError as e:
                logger.error("Decay fit failed for b=%s, N=%d: %s", b, n, e)
                checks.append(Check(f"decay rate, b={b}, N={n}", float('nan'), threshold, False))
                continue
            checks.append(Check.at_least(f"decay rate, b={b}, N={n}", fit.fitted_rate, threshold))
            checks.append(Check.at_least(f"fit r^2, b={b}, N={n}", fit.r_squared, 0.99))
    return checks


# -- bounds ----------------------------------------------------------------------------

def bounds_suite(config: RunConfig, rng) -> List[Check]:
    checks = []
    violations = 0
    for L in range(1, 5):
        u = rng.uniform(-5.0, 5.0, (25000, L + 1))
        z = rng.uniform(-7.0, 7.0, (25000, L))
        violations += int(np.sum(exponent_f(u, z) > 1e-12))
    checks.append(Check.at_most("F_L <= 0 violations", violations, 0))

    u = np.array([1.3, -0.4])
    value = polynomial_integral(u, PolynomialSpec.constant(1)).value.real
    checks.append(Check.at_most("I_{1,1} closed form", abs(value - (abs(u[0] - u[1]) + 1.0)), 1e-8))
    value = polynomial_integral([1.0, -1.0], PolynomialSpec.power_sum(1, 1)).value.real
    checks.append(Check.at_most("I_{|z|,1} closed form", abs(value - 2.5), 1e-8))

    for (poly, _), fit in zip(GROWTH_CASES, growth_experiments()):
        checks.append(Check.at_most(f"growth slope L={poly.variables}, M={poly.degree}", fit.fitted_rate,
                                    poly.degree + poly.variables + SLOPE_SLACK))

    ctx = _real_context(config)
    if not ctx.coupling.in_s_l():
        ctx = make_context(config.a_plus, config.a_minus, 0.7 * ctx.params.a_l)
    for claim in registered_claims():
        fit = fit_envelope(claim, ctx)
        checks.append(Check(f"envelope {claim}", fit.fitted_constant, math.inf, fit.passed))
    return checks


SUITE_RUNNERS: Dict[str, Callable] = {
    'gamma': gamma_suite,
    'kernels': kernels_suite,
    'symmetry': symmetry_suite,
    'lemma': lemma_suite,
    'asymptotics': asymptotics_suite,
    'bounds': bounds_suite,
}


def run_suite(name: str, config: RunConfig) -> Dict:
    """Run one suite (or all) with a seeded generator and collect the report"""
    names = list(SUITE_RUNNERS) if name == 'all' else [name]
    if any(n not in SUITE_RUNNERS for n in names):
        raise KeyError(f"Unknown suite {name!r}")
    rng = np.random.default_rng(config.seed)
    checks = []
    timings = {}
    for suite in names:
        start = time.perf_counter()
        logger.info("Running suite %s (seed %d)", suite, config.seed)
        for check in SUITE_RUNNERS[suite](config, rng):
            row = check.to_dict()
            row['suite'] = suite
            checks.append(row)
            if not check.passed:
                logger.warning("%s: %s measured %.3e, threshold %.3e",
                               suite, check.name, check.measured, check.threshold)
        timings[suite] = round(time.perf_counter() - start, 3)
    return {
        'suite': name,
        'seed': config.seed,
        'parameters': {'a_plus': config.a_plus, 'a_minus': config.a_minus, 'b': [config.b_re, config.b_im]},
        'checks': checks,
        'seconds': timings,
        'pass': all(c['pass'] for c in checks),
    }
