"""
Contour-shift representation of E_N.

The z-contours of the direct representation are lifted to
C_b + ir = R + i(a - Re b/2 + r). Crossing the simple poles at
z_k = x_j + ia - ib/2 leaves residue channels indexed by increasing index
sets nu; the full set of residues collapses into the sum over E_{N-1} at the
reduced configurations x(nu). Each piece is returned with its own error
estimate so the report can show which channel dominates.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .data_models import ContourSpec, EvalResult, ResidueTermSpec
from .eigenfunctions import MODE_E, EigenEvaluator, contract
from .errors import ContourError, DimensionError, ParameterError, PreconditionError
from .kernels import (
    KernelContext, c_product, c_product_inverse, hat_y, log_m_factor, log_rho_factor,
    split_positions,
)
from .quadrature import halving_error, integrate

logger = logging.getLogger(__name__)

DEFAULT_SHIFT_FRACTION = 0.75
MIN_CLEARANCE = 1e-3


def default_shift(ctx: KernelContext) -> float:
    return DEFAULT_SHIFT_FRACTION * ctx.params.a_s


def u_factor(ctx: KernelContext, x, nu: Sequence[int]) -> complex:
    """prod over l of prod_{j < nu_l, j not in nu_1..nu_(l-1)} (-u(x_{nu_l} - x_j))"""
    x = np.asarray(x, dtype=complex)
    value = 1.0 + 0.0j
    for ell, pos in enumerate(nu):
        earlier = set(nu[:ell])
        for j in range(1, pos):
            if j not in earlier:
                value *= -ctx.gamma.u(ctx.b, x[pos - 1] - x[j - 1])
    return value


def pole_positions(ctx: KernelContext, x) -> np.ndarray:
    """Poles z_k = x_j + ia - ib/2 of the integrand, ordered by (k, j)"""
    x = np.asarray(x, dtype=complex)
    row = x + 1j * ctx.params.a - 0.5j * ctx.b
    return np.tile(row, max(x.size - 1, 0))


def pole_clearance(ctx: KernelContext, x, r: float) -> float:
    """Distance of C_b + ir to the crossed poles and to the next pole rows above them

    Raises ContourError below MIN_CLEARANCE.
    """
    p = ctx.params
    imag = np.imag(np.asarray(x, dtype=complex))
    heights = ctx.gamma.pole_zero_data().zeros(p.a + 2.0 * p.a_l + r).imag - p.a
    distance = np.abs(r - imag[:, None] - heights[None, :])
    clearance = float(np.min(distance))
    if clearance < MIN_CLEARANCE:
        j, h = np.unravel_index(np.argmin(distance), distance.shape)
        raise ContourError(
            f"Contour C_b + i*{r} passes within {clearance:.2e} of the pole row "
            f"Im z = Im x_{j + 1} + a - Re b/2 + {heights[h]:.6g}"
        )
    return clearance


class ContourShiftScheme:
    """Right-hand side of the shifted-contour identity for E_N at real x"""

    def __init__(self, evaluator: EigenEvaluator, r: Optional[float] = None, threads: int = 1):
        ctx = evaluator.context
        self.evaluator = evaluator
        self.r = default_shift(ctx) if r is None else float(r)
        self.threads = threads
        if not 0.0 < self.r < ctx.params.a_s:
            raise ParameterError(f"Shift r must lie in (0, a_s) = (0, {ctx.params.a_s}), got {self.r}")
        if not ctx.coupling.in_s_l():
            raise PreconditionError(
                f"The contour shift needs b in S_l (0 < Re b <= a_l = {ctx.params.a_l}), got {ctx.b}"
            )

    @property
    def context(self) -> KernelContext:
        return self.evaluator.context

    @property
    def kappa(self) -> float:
        """Height of the shifted contour"""
        return self.context.params.a - self.context.b.real / 2.0 + self.r

    def spec_for(self, x, y) -> ContourSpec:
        if self.evaluator.spec is not None:
            return self.evaluator.spec
        base = self.evaluator.recommend(x, y)
        p = self.context.params
        npp = base.nodes_per_panel
        scale = min(p.a_s, min(self.r, p.a_s - self.r))
        panels = max(base.panels, math.ceil(2.0 * base.truncation / scale))
        return ContourSpec(1, (0.0,), base.truncation, panels, npp)

    def _validate(self, x, y) -> Tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=float)
        if x.size != y.size:
            raise DimensionError(f"x has {x.size} entries but y has {y.size}")
        if x.size < 2:
            raise DimensionError("The contour shift needs N >= 2")
        if np.any(np.imag(x) != 0.0):
            raise PreconditionError("The contour-shift representation takes real x")
        if np.unique(x).size != x.size:
            raise PreconditionError(f"Positions must be pairwise distinct, got {x.real}")
        pole_clearance(self.context, x, self.r)
        return x, y

    def _log_bracket_prefactor(self, y: np.ndarray) -> complex:
        """ln(M_N / rho_N)"""
        return log_m_factor(self.context, y) - log_rho_factor(self.context, y)

    def _phase(self, x: np.ndarray, y: np.ndarray) -> complex:
        return complex(np.exp(1j * self.context.alpha * y[-1] * np.sum(x)))

    # -- bracket pieces ---------------------------------------------------

    def _main_value(self, x, y, spec: ContourSpec) -> Tuple[complex, float]:
        ctx = self.context
        yh = hat_y(y)
        inner = self.evaluator.inner_table(MODE_E, yh, spec)
        vectors = self.evaluator.point_vectors(x[None, :], spec, shift=self.kappa)
        total = complex(contract(inner, vectors)[0])
        magnitude = float(contract(np.abs(inner), np.abs(vectors)).real[0])
        n = x.size
        log_factor = (self._log_bracket_prefactor(y) - ctx.alpha * self.kappa * np.sum(yh)
                      + (n - 1) * np.log(self.evaluator.constant.script_g))
        factor = np.exp(log_factor) / math.factorial(n - 1) * c_product_inverse(ctx, x) * self._phase(x, y)
        return factor * total, 10.0 * np.finfo(float).eps * abs(factor) * magnitude

    def main_integral(self, x, y) -> EvalResult:
        """Shifted (N-1)-fold integral of K# E_{N-1} with its prefactors"""
        x, y = self._validate(x, y)
        spec = self.spec_for(x, y)
        value, floor = self._main_value(x, y, spec)
        coarse, _ = self._main_value(x, y, spec.halved())
        evaluations = spec.nodes_per_axis ** (x.size - 1) + spec.halved().nodes_per_axis ** (x.size - 1)
        return EvalResult(value=value, error_estimate=floor + halving_error(value, coarse),
                          evaluations=evaluations)

    def _i_hat_rows(self, x, y, nu: Sequence[int], z: np.ndarray, spec: ContourSpec) -> np.ndarray:
        ctx = self.context
        chosen, rest = split_positions(x, nu)
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        logs = np.sum(self.evaluator.log_kernel_factor(z[:, None, :] - rest[None, :, None]), axis=(1, 2))
        for k, l in combinations(range(z.shape[1]), 2):
            logs = logs + ctx.gamma.log_c_inverse(ctx.b, z[:, l] - z[:, k])
        anchors = chosen + 1j * ctx.params.a - 0.5j * ctx.b
        points = np.hstack([np.broadcast_to(anchors, (z.shape[0], anchors.size)), z])
        try:
            values, _ = self.evaluator.evaluate_points(MODE_E, points, hat_y(y), spec)
        except PreconditionError as exc:
            raise PreconditionError(f"E_(N-1) in residue channel nu={tuple(nu)}: {exc}") from exc
        with np.errstate(under="ignore"):
            return np.exp(logs) * c_product_inverse(ctx, rest) * values

    def i_hat(self, x, y, nu: Sequence[int], z_tail, spec: Optional[ContourSpec] = None) -> complex:
        """K#_{N-L}(x(nu), z) E_{N-1}((x_nu + ia - ib/2, z), y_hat) at one tail point"""
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=float)
        z_tail = np.asarray(z_tail, dtype=complex)
        term = ResidueTermSpec(x.size, tuple(nu), self.r)
        if z_tail.size != x.size - 1 - term.L:
            raise DimensionError(f"z_tail needs {x.size - 1 - term.L} entries, got {z_tail.size}")
        spec = spec if spec is not None else self.spec_for(x, y)
        return complex(self._i_hat_rows(x, y, term.nu, z_tail[None, :], spec)[0])

    def residue_term(self, x, y, nu: Sequence[int]) -> EvalResult:
        """One residue channel with its prefactors"""
        x, y = self._validate(x, y)
        term = ResidueTermSpec(x.size, tuple(nu), self.r)
        spec = self.spec_for(x, y)
        dims = x.size - 1 - term.L
        result = integrate(lambda z: self._i_hat_rows(x, y, term.nu, z, spec),
                           spec.with_dims(dims, self.kappa), threads=self.threads)
        log_factor = self._log_bracket_prefactor(y) + dims * np.log(self.evaluator.constant.script_g)
        factor = (np.exp(log_factor) / math.factorial(dims) * u_factor(self.context, x, term.nu)
                  * self._phase(x, y))
        return EvalResult(value=factor * result.value, error_estimate=abs(factor) * result.error_estimate,
                          evaluations=result.evaluations)

    def residue_sets(self, n: int) -> List[Tuple[int, ...]]:
        return [nu for size in range(1, n - 1) for nu in combinations(range(1, n + 1), size)]

    # -- collapsed residues ---------------------------------------------

    def reduced_e(self, x, yh) -> EvalResult:
        """E_{N-1}(x(nu), y_hat), itself through the shifted contour when N-1 >= 2"""
        x = np.asarray(x, dtype=complex)
        if x.size == 1:
            return EvalResult(value=complex(np.exp(1j * self.context.alpha * x[0] * yh[0])),
                              error_estimate=0.0, evaluations=0)
        return self.rhs(x, yh)

    def last_sum(self, x, y) -> EvalResult:
        """sum_nu C_N(x(nu), x_nu)/C_N(x) E_{N-1}(x(nu), y_hat), with M_N and the phase"""
        x, y = self._validate(x, y)
        ctx = self.context
        yh = hat_y(y)
        inverse = c_product_inverse(ctx, x)
        total, error, evaluations = 0.0j, 0.0, 0
        for nu in range(1, x.size + 1):
            chosen, rest = split_positions(x, [nu])
            ratio = c_product(ctx, np.concatenate([rest, chosen])) * inverse
            reduced = self.reduced_e(rest, yh)
            total += ratio * reduced.value
            error += abs(ratio) * reduced.error_estimate
            evaluations += reduced.evaluations
        factor = np.exp(log_m_factor(ctx, y)) * self._phase(x, y)
        return EvalResult(value=factor * total, error_estimate=abs(factor) * error, evaluations=evaluations)

    # -- assembly ----------------------------------------------------------

    def _bracket_parts(self, x, y) -> List[Tuple[str, Tuple[int, ...], EvalResult]]:
        parts = [("main", (), self.main_integral(x, y))]
        sets = self.residue_sets(len(x))
        if self.threads > 1 and len(sets) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                results = list(pool.map(lambda nu: self.residue_term(x, y, nu), sets))
        else:
            results = [self.residue_term(x, y, nu) for nu in sets]
        parts.extend(("residue", nu, res) for nu, res in zip(sets, results))
        return parts

    def bracket_term(self, x, y) -> EvalResult:
        """Everything except the last sum; the part that decays in the rapidity gap"""
        x, y = self._validate(x, y)
        return _sum_results([res for _, _, res in self._bracket_parts(x, y)])

    def terms(self, x, y) -> pd.DataFrame:
        """Every piece of the representation as one report row"""
        x, y = self._validate(x, y)
        parts = self._bracket_parts(x, y) + [("last_sum", (), self.last_sum(x, y))]
        rows = []
        for kind, nu, res in parts:
            rows.append({
                'term': kind,
                'L': len(nu),
                'nu': " ".join(str(v) for v in nu),
                'value_re': float(np.real(res.value)),
                'value_im': float(np.imag(res.value)),
                'abs_value': float(abs(res.value)),
                'error_estimate': float(res.error_estimate),
            })
        return pd.DataFrame(rows)

    def rhs(self, x, y) -> EvalResult:
        """E_N(x, y) assembled from the shifted contour, the residue channels and the last sum"""
        x, y = self._validate(x, y)
        logger.debug("Contour-shift assembly for N=%d, r=%.4g", x.size, self.r)
        bracket = self.bracket_term(x, y)
        return _sum_results([bracket, self.last_sum(x, y)])


def _sum_results(results: Sequence[EvalResult]) -> EvalResult:
    return EvalResult(value=complex(sum(r.value for r in results)),
                      error_estimate=float(sum(r.error_estimate for r in results)),
                      evaluations=int(sum(r.evaluations for r in results)))


def lemma_rhs(evaluator: EigenEvaluator, x, y, r: Optional[float] = None, threads: int = 1) -> EvalResult:
    return ContourShiftScheme(evaluator, r, threads).rhs(x, y)


def contour_shift_terms(evaluator: EigenEvaluator, x, y, r: Optional[float] = None,
                        threads: int = 1) -> pd.DataFrame:
    return ContourShiftScheme(evaluator, r, threads).terms(x, y)


def bracket_term(evaluator: EigenEvaluator, x, y, r: Optional[float] = None) -> EvalResult:
    return ContourShiftScheme(evaluator, r).bracket_term(x, y)


def last_sum(evaluator: EigenEvaluator, x, y, r: Optional[float] = None) -> EvalResult:
    return ContourShiftScheme(evaluator, r).last_sum(x, y)
