"""
Bounds laboratory: the exponent F_L, the integrals I_{P,L} and envelope fits.

The envelope claims are inequalities whose constants are only known to
exist. Each registered claim samples its left-hand side and the shape of
its right-hand side on a declared grid; the fitted constant is the smallest
one making the inequality hold at every sample.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import stats

from .asymptotics import AsymptoticForm, evaluate_e
from .data_models import ContourSpec, EnvelopeFit, EvalResult, PolynomialSpec, Representation
from .eigenfunctions import EigenEvaluator
from .errors import DimensionError, ParameterError, UnknownClaimError
from .kernels import KernelContext, m_factor
from .params import min_rapidity_gap, ray_rapidities
from .quadrature import integrate

logger = logging.getLogger(__name__)

TAIL_RATE = 2.0
SLOPE_SLACK = 0.1


def exponent_f(u, z) -> np.ndarray:
    """F_L(u, z); the last axes hold the L+1 entries of u and the L entries of z"""
    u = np.asarray(u, dtype=float)
    z = np.asarray(z, dtype=float)
    if u.shape[-1] != z.shape[-1] + 1:
        raise DimensionError(f"F_L needs L+1 entries in u and L in z, got {u.shape[-1]} and {z.shape[-1]}")

    def pair_sum(v):
        j, k = np.triu_indices(v.shape[-1], k=1)
        return np.sum(np.abs(v[..., j] - v[..., k]), axis=-1)

    cross = np.sum(np.abs(u[..., :, None] - z[..., None, :]), axis=(-2, -1))
    return pair_sum(u) + pair_sum(z) - cross


def polynomial_spec_for(u: np.ndarray, poly: PolynomialSpec, tol: float,
                        nodes_per_panel: int = 16) -> ContourSpec:
    """Truncation past the last kink with room for the polynomial growth of the tails"""
    reach = float(np.max(np.abs(u)))
    log_tol = math.log(1.0 / tol)
    truncation = reach + log_tol / TAIL_RATE
    for _ in range(3):
        truncation = reach + (log_tol + poly.degree * math.log(truncation + 1.0)) / TAIL_RATE
    panels = max(1, math.ceil(2.0 * truncation))
    breakpoints = tuple(sorted(set(np.round(u, 15).tolist()) | {0.0}))
    return ContourSpec(poly.variables, (0.0,) * poly.variables, truncation, panels,
                       nodes_per_panel, breakpoints)


def polynomial_integral(u, poly: PolynomialSpec, spec: Optional[ContourSpec] = None,
                        tol: float = 1e-10, threads: int = 1) -> EvalResult:
    """I_{P,L}(u) = integral over R^L of P(|z_1|, ..., |z_L|) exp(F_L(u, z))"""
    u = np.asarray(u, dtype=float)
    if u.size != poly.variables + 1:
        raise DimensionError(f"u needs {poly.variables + 1} entries for L={poly.variables}, got {u.size}")
    if spec is None:
        spec = polynomial_spec_for(u, poly, tol)

    def integrand(points):
        z = points.real
        return poly(np.abs(z)) * np.exp(exponent_f(u[None, :], z))

    return integrate(integrand, spec, threads=threads)


def verify_polynomial_bound(poly: PolynomialSpec, direction, scales: Sequence[float],
                            tol: float = 1e-8) -> EnvelopeFit:
    """Growth exponent of I_{P,L}(s u0) in s, compared with deg P + L"""
    direction = np.asarray(direction, dtype=float)
    scales = np.asarray(scales, dtype=float)
    if np.any(np.diff(scales) <= 0) or np.any(scales <= 0):
        raise ParameterError("Scales must be positive and increasing")
    values = np.array([polynomial_integral(s * direction, poly, tol=tol).value.real for s in scales])
    fit = stats.linregress(np.log(scales), np.log(values))
    bound = poly.degree + poly.variables + SLOPE_SLACK
    grid = f"L={poly.variables}, M={poly.degree}, u0={direction.tolist()}, s={scales.tolist()}"
    if np.ptp(direction) == 0:
        logger.warning("Degenerate ray %s: all positions coincide", direction.tolist())
        grid += " (degenerate ray)"
    samples = pd.DataFrame({'scale': scales, 'integral': values})
    return EnvelopeFit(claim="polynomial_growth", fitted_constant=float(np.exp(fit.intercept)),
                       fitted_rate=float(fit.slope), sample_grid=grid,
                       passed=bool(fit.slope <= bound), samples=samples)


GROWTH_SCALES = (2.0, 4.0, 8.0, 16.0)
GROWTH_CASES = (
    (PolynomialSpec.constant(1), (1.0, -1.0)),
    (PolynomialSpec.power_sum(1, 2), (1.0, -1.0)),
    (PolynomialSpec.power_sum(2, 1), (1.0, 0.0, -1.0)),
)


def growth_experiments(scales: Sequence[float] = GROWTH_SCALES, tol: float = 1e-6):
    """Growth fits for (L, M) = (1, 0), (1, 2) and (2, 1)"""
    return [verify_polynomial_bound(poly, direction, scales, tol) for poly, direction in GROWTH_CASES]


# -- envelope claims ----------------------------------------------------------

@dataclass(frozen=True)
class EnvelopeClaim:
    """One inequality: sampler returns columns lhs and envelope, rate its decay rate"""
    claim: str
    description: str
    grid: str
    rate: Callable[[KernelContext], float]
    sampler: Callable[..., pd.DataFrame]
    needs_evaluator: bool = False


def _rho(ctx: KernelContext) -> float:
    return 0.6 * ctx.params.a_s


def _sample_c_asymptotics(ctx: KernelContext) -> pd.DataFrame:
    p = ctx.params
    rho = _rho(ctx)
    rows = []
    for sign in (1, -1):
        envelope = ctx.gamma.asymptotic_envelope_c(ctx.b, rho, sign)
        re = sign * np.linspace(0.5, 5.0, 167) * p.a_l
        for im in (-0.25 * p.a_s, 0.0, 0.25 * p.a_s):
            z = re + 1j * im
            lhs = envelope.deviation(ctx.gamma.c(ctx.b, z), z)
            rows.append(pd.DataFrame({'re_z': re, 'im_z': im, 'lhs': lhs,
                                      'envelope': np.exp(-envelope.rate * np.abs(re))}))
    return pd.concat(rows, ignore_index=True)


def _sample_u_asymptotics(ctx: KernelContext) -> pd.DataFrame:
    p = ctx.params
    rate = p.alpha * _rho(ctx)
    phi = ctx.phi
    z = np.concatenate([-np.linspace(0.5, 5.0, 500), np.linspace(0.5, 5.0, 500)]) * p.a_l
    u = ctx.gamma.u(ctx.b, z)
    lhs = np.abs(u * phi ** np.where(z > 0, -2.0, 2.0) + 1.0)
    return pd.DataFrame({'re_z': z, 'lhs': lhs, 'envelope': np.exp(-rate * np.abs(z))})


def _sample_m_factor(ctx: KernelContext) -> pd.DataFrame:
    rate = ctx.params.alpha * _rho(ctx)
    rows = []
    for n in (2, 3):
        for t in np.linspace(0.25, 4.0, 16) * ctx.params.a:
            y = ray_rapidities(n, t)
            rows.append({'n': n, 't': t, 'lhs': abs(m_factor(ctx, y) - 1.0),
                         'envelope': math.exp(-rate * min_rapidity_gap(y))})
    return pd.DataFrame(rows)


def _sample_c_strip(ctx: KernelContext) -> pd.DataFrame:
    p = ctx.params
    gamma = ctx.coupling.gamma
    re = np.linspace(-6.0, 6.0, 201) * p.a_l
    rows = []
    for r in np.array([0.1, 0.3, 0.5, 0.7, 0.9]) * p.a_s:
        lhs = np.abs(ctx.gamma.c(ctx.b, re + 1j * r))
        rows.append(pd.DataFrame({'re_z': re, 'im_z': r, 'lhs': lhs, 'envelope': np.exp(-gamma * np.abs(re))}))
    return pd.concat(rows, ignore_index=True)


def _sample_c_inverse_sinh(ctx: KernelContext) -> pd.DataFrame:
    gamma = ctx.coupling.gamma
    z = np.linspace(-6.0, 6.0, 1000) * ctx.params.a_l
    return pd.DataFrame({'re_z': z, 'lhs': np.abs(ctx.gamma.c_inverse(ctx.b, z)),
                         'envelope': np.abs(np.sinh(gamma * z))})


def _sample_c_inverse_strip(ctx: KernelContext) -> pd.DataFrame:
    p = ctx.params
    gamma = ctx.coupling.gamma
    re = np.linspace(-6.0, 6.0, 200) * p.a_l
    rows = []
    for im in -np.array([0.0, 0.25, 0.5, 0.75, 1.0]) * p.a_s:
        lhs = np.abs(ctx.gamma.c_inverse(ctx.b, re + 1j * im))
        rows.append(pd.DataFrame({'re_z': re, 'im_z': im, 'lhs': lhs, 'envelope': np.exp(gamma * np.abs(re))}))
    return pd.concat(rows, ignore_index=True)


def _sample_u_reflected(ctx: KernelContext) -> pd.DataFrame:
    p = ctx.params
    re = np.linspace(-6.0, 6.0, 250) * p.a_l
    rows = []
    for im in -np.array([0.0, 0.25, 0.5, 0.75]) * p.a_s:
        lhs = np.abs(ctx.gamma.u(ctx.b, -(re + 1j * im)))
        rows.append(pd.DataFrame({'re_z': re, 'im_z': im, 'lhs': lhs, 'envelope': 1.0}))
    return pd.concat(rows, ignore_index=True)


def _remainder_rate(ctx: KernelContext) -> float:
    return ctx.params.alpha * ctx.params.a_s / 2.0


def _sample_remainder(ctx: KernelContext, evaluator: EigenEvaluator) -> pd.DataFrame:
    gamma = ctx.coupling.gamma
    rate = _remainder_rate(ctx)
    form = AsymptoticForm(ctx)
    rows = []
    for x in ([0.5, -0.5], [1.2, 0.3], [-0.8, 0.4]):
        x = np.asarray(x)
        for t in np.array([1.0, 1.5, 2.0, 2.5]) * ctx.params.a:
            y = ray_rapidities(2, t)
            value = evaluate_e(evaluator, x, y).value - form(x, y)
            poly = 1.0 + gamma * np.sum(np.abs(x))
            rows.append({'x1': x[0], 'x2': x[1], 't': t, 'lhs': abs(value),
                         'envelope': poly * math.exp(-rate * t)})
    return pd.DataFrame(rows)


def _sample_complex_envelope(ctx: KernelContext, evaluator: EigenEvaluator) -> pd.DataFrame:
    p = ctx.params
    gamma = ctx.coupling.gamma
    delta = p.a_s / 2.0
    rows = []
    for spread in np.linspace(0.0, p.a_s - delta, 3):
        v = np.array([-spread / 2.0, spread / 2.0])
        for re in ([0.5, -0.5], [1.5, 0.0], [-1.0, 0.7]):
            x = np.asarray(re) + 1j * v
            for t in np.array([0.5, 1.0, 2.0]) * p.a:
                y = ray_rapidities(2, t)
                value = evaluator.e(x, y, Representation.DIRECT).value
                lhs = abs(value) * math.exp(p.alpha * float(np.dot(y, v)))
                rows.append({'re_x1': re[0], 're_x2': re[1], 'im_spread': spread, 't': t, 'lhs': lhs,
                             'envelope': 1.0 + gamma * float(np.sum(np.abs(re)))})
    return pd.DataFrame(rows)


CLAIMS: Dict[str, EnvelopeClaim] = {
    claim.claim: claim for claim in (
        EnvelopeClaim("c_asymptotics", "|phi^-+1 exp(+-alpha b z/2) c(b;z) - 1| <= C exp(-alpha rho |Re z|)",
                      "Re z = +-[0.5, 5] a_l (167 each), Im z in {-a_s/4, 0, a_s/4}, rho = 0.6 a_s",
                      lambda ctx: ctx.params.alpha * _rho(ctx), _sample_c_asymptotics),
        EnvelopeClaim("u_asymptotics", "|u(b;z) phi^-+2 + 1| <= C exp(-alpha rho |z|)",
                      "z = +-[0.5, 5] a_l (500 each), rho = 0.6 a_s",
                      lambda ctx: ctx.params.alpha * _rho(ctx), _sample_u_asymptotics),
        EnvelopeClaim("m_factor_asymptotics", "|M_N(y) - 1| <= c exp(-alpha rho d_N(y))",
                      "N in {2, 3}, uniform rays with gaps [0.25, 4] a (16), rho = 0.6 a_s",
                      lambda ctx: ctx.params.alpha * _rho(ctx), _sample_m_factor),
        EnvelopeClaim("c_strip_majorant", "|c(b; p + ir)| <= c(r, b) exp(-gamma |p|)",
                      "p in [-6, 6] a_l (201), r in {0.1, 0.3, 0.5, 0.7, 0.9} a_s",
                      lambda ctx: ctx.coupling.gamma, _sample_c_strip),
        EnvelopeClaim("c_inverse_sinh_bound", "|1/c(b; z)| <= C |sinh(gamma z)| on the real line",
                      "z in [-6, 6] a_l (1000, zero excluded)",
                      lambda ctx: -ctx.coupling.gamma, _sample_c_inverse_sinh),
        EnvelopeClaim("c_inverse_strip_bound", "|1/c(b; z)| <= c exp(gamma |Re z|) for Im z in [-a_s, 0]",
                      "Re z in [-6, 6] a_l (200), Im z in -{0, 0.25, 0.5, 0.75, 1} a_s",
                      lambda ctx: -ctx.coupling.gamma, _sample_c_inverse_strip),
        EnvelopeClaim("u_reflected_bound", "|u(b; -z)| <= c for Im z in (-a_s, 0]",
                      "Re z in [-6, 6] a_l (250), Im z in -{0, 0.25, 0.5, 0.75} a_s",
                      lambda ctx: 0.0, _sample_u_reflected),
        EnvelopeClaim("remainder_decay", "|E_2 - E_as| <= C (1 + gamma sum |x_j|) exp(-alpha a_s d_2 / 2)",
                      "three real x, gaps {1, 1.5, 2, 2.5} a",
                      _remainder_rate, _sample_remainder, needs_evaluator=True),
        EnvelopeClaim("complex_envelope", "|E_2(x, y)| exp(alpha sum y_j v_j) <= C (1 + gamma sum |Re x_j|)",
                      "Im spread v_2 - v_1 in [0, a_s/2] (3), three Re x, gaps {0.5, 1, 2} a",
                      lambda ctx: 0.0, _sample_complex_envelope, needs_evaluator=True),
    )
}


def registered_claims():
    return sorted(CLAIMS)


def fit_envelope(claim: str, ctx: KernelContext, evaluator: Optional[EigenEvaluator] = None,
                 keep_samples: bool = False) -> EnvelopeFit:
    """Smallest constant on the claim's grid; passes iff it is finite"""
    if claim not in CLAIMS:
        raise UnknownClaimError(f"Unknown claim {claim!r}; registered: {', '.join(registered_claims())}")
    definition = CLAIMS[claim]
    if definition.needs_evaluator:
        evaluator = evaluator if evaluator is not None else EigenEvaluator(ctx)
        samples = definition.sampler(ctx, evaluator)
    else:
        samples = definition.sampler(ctx)
    envelope = samples['envelope'].to_numpy(dtype=float)
    lhs = samples['lhs'].to_numpy(dtype=float)
    usable = envelope > 0
    ratios = lhs[usable] / envelope[usable]
    samples['ratio'] = np.nan
    samples.loc[usable, 'ratio'] = ratios
    constant = float(np.max(ratios)) if ratios.size else math.inf
    passed = bool(np.isfinite(constant) and np.all(np.isfinite(lhs)))
    logger.info("Claim %s: fitted constant %.4g over %d samples", claim, constant, len(samples))
    return EnvelopeFit(claim=claim, fitted_constant=constant, fitted_rate=float(definition.rate(ctx)),
                       sample_grid=definition.grid, passed=passed,
                       samples=samples if keep_samples else None)


def raw_samples(fit: EnvelopeFit) -> pd.DataFrame:
    if fit.samples is None:
        raise ParameterError(f"Fit for {fit.claim} was made without keep_samples")
    return fit.samples
