"""
Factorized asymptotics of E_N and the decay of the remainder.

E_as is a finite sum over permutations, either weighted by products of
-u over inverted pairs or by ratios C_N(x_sigma)/C_N(x). The remainder
E_N - E_as is sampled along rapidity rays y(t) with gap t and its decay rate
is fitted by least squares on the window between the preasymptotic region
and the numerical floor.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from itertools import permutations
from typing import Callable, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import stats

from .data_models import AsymptoticMode, DecayFit, EvalResult, Representation
from .eigenfunctions import EigenEvaluator
from .errors import DegenerateFitError, DimensionError, PreconditionError, SingularityError
from .kernels import KernelContext
from .params import min_rapidity_gap, ray_rapidities
from .residue_scheme import ContourShiftScheme

logger = logging.getLogger(__name__)

PREASYMPTOTIC_RATIO = 0.1
FLOOR_MARGIN = 100.0
MIN_WINDOW = 3


class AsymptoticForm:
    """E_as(x, y) in either the u-product or the c-ratio form"""

    def __init__(self, context: KernelContext, mode: AsymptoticMode = AsymptoticMode.U_PRODUCT):
        self.context = context
        self.mode = AsymptoticMode(mode)

    def _check(self, x, y):
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        if x.size != y.size:
            raise DimensionError(f"x has {x.size} entries but y has {y.size}")
        if np.unique(x).size != x.size:
            raise PreconditionError(f"E_as needs pairwise distinct positions, got {x}")
        return x, y

    def _u_matrix(self, x: np.ndarray) -> np.ndarray:
        """entry [j, k] = -u(x_k - x_j) for j < k"""
        n = x.size
        matrix = np.ones((n, n), dtype=complex)
        for j in range(n):
            for k in range(j + 1, n):
                try:
                    matrix[j, k] = -self.context.gamma.u(self.context.b, x[k] - x[j])
                except SingularityError as exc:
                    raise exc.annotate(f"pair ({j + 1},{k + 1})") from exc
        return matrix

    def _log_c_matrix(self, x: np.ndarray) -> np.ndarray:
        diff = x[:, None] - x[None, :]
        off = ~np.eye(x.size, dtype=bool)
        logs = np.zeros((x.size, x.size), dtype=complex)
        logs[off] = self.context.gamma.log_c(self.context.b, diff[off])
        return logs

    def __call__(self, x, y) -> complex:
        x, y = self._check(x, y)
        n = x.size
        alpha = self.context.alpha
        upper = np.triu_indices(n, k=1)
        total = 0.0j
        if self.mode == AsymptoticMode.U_PRODUCT:
            u_matrix = self._u_matrix(x)
            for perm in permutations(range(n)):
                position = np.argsort(perm)
                inverted = position[upper[0]] > position[upper[1]]
                weight = np.prod(u_matrix[upper[0][inverted], upper[1][inverted]])
                total += weight * np.exp(1j * alpha * np.dot(x[list(perm)], y))
        else:
            logs = self._log_c_matrix(x)
            base = np.sum(logs[upper])
            for perm in permutations(range(n)):
                perm = np.asarray(perm)
                ratio = np.exp(np.sum(logs[perm[upper[0]], perm[upper[1]]]) - base)
                total += ratio * np.exp(1j * alpha * np.dot(x[perm], y))
        return complex(total)


def asymptotic_form(ctx: KernelContext, x, y, mode: AsymptoticMode = AsymptoticMode.U_PRODUCT) -> complex:
    return AsymptoticForm(ctx, mode)(x, y)


def choose_representation(ctx: KernelContext, x) -> Representation:
    """Shifted contour when it applies, the real-line recursion otherwise"""
    real = not np.any(np.imag(np.asarray(x, dtype=complex)))
    if real and ctx.coupling.in_s_l() and len(x) > 1:
        return Representation.RESIDUE
    return Representation.DIRECT


def evaluate_e(evaluator: EigenEvaluator, x, y, representation: Optional[Representation] = None,
               r: Optional[float] = None, threads: int = 1) -> EvalResult:
    """E_N through any of the three representations"""
    if representation is None:
        representation = choose_representation(evaluator.context, x)
    if representation == Representation.RESIDUE:
        return ContourShiftScheme(evaluator, r, threads).rhs(x, y)
    return evaluator.e(x, y, representation)


def remainder(evaluator: EigenEvaluator, x, y, representation: Optional[Representation] = None,
              r: Optional[float] = None) -> EvalResult:
    """E_N(x, y) - E_as(x, y), with the error estimate of E_N"""
    y = np.asarray(y, dtype=float)
    if y.size > 1 and min_rapidity_gap(y) <= 0:
        raise PreconditionError(f"The remainder needs decreasing rapidities, got {y}")
    exact = evaluate_e(evaluator, x, y, representation, r)
    approx = AsymptoticForm(evaluator.context)(x, y)
    return EvalResult(value=exact.value - approx, error_estimate=exact.error_estimate,
                      evaluations=exact.evaluations, cache_hits=exact.cache_hits,
                      cache_misses=exact.cache_misses)


def default_window(ctx: KernelContext, count: int = 15) -> np.ndarray:
    """Gaps from a/2 to 4a, where unit parameters leave the floor untouched"""
    return ctx.params.a * np.linspace(0.5, 4.0, count)


def scan_evaluator(evaluator: EigenEvaluator, x, y_far, representation: Optional[Representation] = None,
                   r: Optional[float] = None) -> EigenEvaluator:
    """The evaluator with its axis rule pinned for a whole rapidity scan"""
    if evaluator.spec is not None:
        return evaluator
    if representation is None:
        representation = choose_representation(evaluator.context, x)
    if representation == Representation.RESIDUE:
        spec = ContourShiftScheme(evaluator, r).spec_for(x, y_far)
    else:
        spec = evaluator.recommend(x, y_far)
    return evaluator.with_spec(spec)


def scan_ray(evaluator: EigenEvaluator, x, t_values: Sequence[float],
             ray: Callable[[int, float], np.ndarray] = ray_rapidities,
             representation: Optional[Representation] = None, r: Optional[float] = None,
             threads: int = 1) -> pd.DataFrame:
    """Remainder samples along y(t); one row per t

    Every sample shares one axis rule, chosen for the widest rapidities, so
    the kernel matrices and the kernel vectors at the fixed positions are
    built once and only the rapidity-dependent tables change along the ray.
    """
    x = np.asarray(x, dtype=complex)
    if len(t_values) == 0:
        raise DimensionError("A ray scan needs at least one t")
    form = AsymptoticForm(evaluator.context)
    evaluator = scan_evaluator(evaluator, x, ray(x.size, max(t_values)), representation, r)

    def sample(t):
        y = ray(x.size, t)
        rem = remainder(evaluator, x, y, representation, r)
        approx = form(x, y)
        return {
            't': float(t),
            'd_N': min_rapidity_gap(y),
            're_remainder': float(np.real(rem.value)),
            'im_remainder': float(np.imag(rem.value)),
            'abs_remainder': float(abs(rem.value)),
            'abs_E_as': float(abs(approx)),
            'error_estimate': float(rem.error_estimate),
        }

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(sample, t_values))
    else:
        rows = [sample(t) for t in t_values]
    logger.info("Scanned %d rapidity gaps", len(rows))
    return pd.DataFrame(rows)


def fit_window(frame: pd.DataFrame) -> pd.DataFrame:
    """Rows past the preasymptotic region and at least two decades above the floor"""
    floor = np.maximum(frame['error_estimate'], 10.0 * np.finfo(float).eps * frame['abs_E_as'])
    asymptotic = frame['abs_remainder'] < PREASYMPTOTIC_RATIO * frame['abs_E_as']
    resolved = frame['abs_remainder'] > FLOOR_MARGIN * floor
    if not resolved.any():
        raise DegenerateFitError("Every remainder sits at the numerical floor; use smaller gaps")
    window = frame[asymptotic & resolved]
    if len(window) < MIN_WINDOW:
        raise DegenerateFitError(
            f"Only {len(window)} samples between the preasymptotic region and the floor; "
            "sample more gaps inside that range"
        )
    return window


def fit_decay_frame(frame: pd.DataFrame, threshold: float = 0.0) -> DecayFit:
    window = fit_window(frame)
    separations = window['d_N'].to_numpy()
    logs = np.log(window['abs_remainder'].to_numpy())
    if np.ptp(separations) == 0:
        raise DegenerateFitError("The fit window holds a single rapidity gap")
    fit = stats.linregress(separations, logs)
    result = DecayFit(separations=separations, residual_logs=logs, fitted_rate=-fit.slope,
                      fitted_intercept=fit.intercept, r_squared=fit.rvalue ** 2, threshold=threshold)
    logger.info("Fitted decay rate %.4f (threshold %.4f, r^2 %.5f)",
                result.fitted_rate, threshold, result.r_squared)
    return result


def fit_decay(evaluator: EigenEvaluator, x, t_values: Optional[Sequence[float]] = None,
              ray: Callable[[int, float], np.ndarray] = ray_rapidities,
              representation: Optional[Representation] = None, threads: int = 1) -> DecayFit:
    """Decay rate of |E_N - E_as| against d_N(y(t)); compared with alpha a_s / 2"""
    ctx = evaluator.context
    if t_values is None:
        t_values = default_window(ctx)
    gaps = [min_rapidity_gap(ray(len(x), t)) for t in t_values]
    if np.any(np.diff(gaps) <= 0):
        raise PreconditionError("d_N(y(t)) must increase strictly along the sampled ray")
    frame = scan_ray(evaluator, x, t_values, ray, representation, threads=threads)
    return fit_decay_frame(frame, threshold=ctx.alpha * ctx.params.a_s / 2.0)
