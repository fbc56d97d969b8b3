"""
Recursive evaluation of the joint eigenfunctions J_N and E_N.

All levels share one Gauss-Legendre axis rule. The level-L function is
tabulated on the full tensor grid of that rule, so the level-(L+1) integral
at any target point reduces to contracting the tabulated inner factor with
one kernel vector per integration axis:

    sum_m  prod_k [ prod_j g(w_{m_k} - x_j) ]  H(m)

where g(t) = c(b; t - ia + ib/2) and H holds the inner function times its
weight (W for J, 1/C(-w) for E) and the quadrature weights.
"""

import hashlib
import logging
import math
from dataclasses import dataclass
from itertools import combinations_with_replacement, permutations
from typing import Optional, Sequence, Tuple

import numpy as np

from .data_models import ContourSpec, EvalResult, Representation
from .errors import DimensionError, ParameterError, PreconditionError
from .kernels import KernelContext, c_product_inverse, hat_y
from .params import centered_coords, in_holomorphy_domain
from .quadrature import axis_rule, check_accuracy, halving_error, recommend_spec
from services.kernel_cache import TabulationCache, get_tabulation_cache

logger = logging.getLogger(__name__)

MODE_E = "E"
MODE_J = "J"
BATCH = 4096
POINT_BLOCK = 512


@dataclass(frozen=True)
class GConstant:
    """The residue constant G(ib - ia)/sqrt(a+ a-)"""
    script_g: complex

    @classmethod
    def from_context(cls, ctx: KernelContext) -> "GConstant":
        value = ctx.script_g
        if not np.isfinite(value):
            raise PreconditionError(f"G(ib-ia) is not finite for b={ctx.b}")
        return cls(value)


def translation_phase(alpha: float, eta: complex, y: Sequence[float]) -> complex:
    """exp(i alpha eta sum y), the phase picked up under x -> x + eta"""
    return complex(np.exp(1j * alpha * eta * np.sum(y)))


def contract(table: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """sum_m table[m_1..m_K] prod_k vectors[b, m_k] for each row b"""
    rows, n = vectors.shape
    if table.ndim == 0:
        return np.full(rows, complex(table))
    out = vectors @ table.reshape(n, -1)
    for _ in range(table.ndim - 1):
        out = np.einsum("bn,bnr->br", vectors, out.reshape(rows, n, -1))
    return out[:, 0]


def pair_grid(matrix: np.ndarray, level: int) -> np.ndarray:
    """prod_{i<j} matrix[p_i, p_j] on the tensor grid of `level` axes"""
    n = matrix.shape[0]
    result = np.ones((n,) * level, dtype=complex)
    for i in range(level):
        for j in range(i + 1, level):
            shape = [1] * level
            shape[i] = n
            shape[j] = n
            result = result * matrix.reshape(shape)
    return result


def sum_grid(nodes: np.ndarray, level: int) -> np.ndarray:
    """w_{p_1} + ... + w_{p_L} on the tensor grid"""
    total = np.zeros((nodes.size,) * level, dtype=complex)
    for i in range(level):
        shape = [1] * level
        shape[i] = nodes.size
        total = total + nodes.reshape(shape)
    return total


def outer_weights(weights: np.ndarray, level: int) -> np.ndarray:
    result = np.ones((weights.size,) * level)
    for i in range(level):
        shape = [1] * level
        shape[i] = weights.size
        result = result * weights.reshape(shape)
    return result


def _digest(array: np.ndarray) -> str:
    return hashlib.sha1(array.tobytes()).hexdigest() + str(array.shape)


class EigenEvaluator:
    """Evaluates J_N and E_N through the real-line recursion with tabulated inner levels"""

    def __init__(self, context: KernelContext, spec: Optional[ContourSpec] = None,
                 tolerance: float = 1e-8, cache: Optional[TabulationCache] = None,
                 max_level: int = 4, nodes_per_panel: int = 16):
        if tolerance <= 0:
            raise ParameterError(f"Tolerance must be positive, got {tolerance}")
        if spec is not None:
            spec = spec.with_dims(1, 0.0)
        self.context = context
        self.spec = spec
        self.tolerance = tolerance
        self.cache = cache if cache is not None else get_tabulation_cache()
        self.max_level = max_level
        self.nodes_per_panel = nodes_per_panel
        self.constant = GConstant.from_context(context)

    # -- rule selection ----------------------------------------------------

    def recommend(self, x: Sequence[complex], y: Sequence[float]) -> ContourSpec:
        """Axis rule suited to a configuration (inner levels get tol/10)"""
        ctx = self.context
        p = ctx.params
        _, centered = centered_coords(x)
        clearance = p.a - ctx.b.real / 2.0 - float(np.max(np.abs(np.imag(centered)), initial=0.0))
        y = np.asarray(y, dtype=float)
        oscillation = p.alpha * (float(np.ptp(y)) if y.size > 1 else abs(float(y[0])))
        spread = float(np.max(np.abs(np.real(x)), initial=0.0))
        # panels no wider than the distance to the nearest kernel pole
        scale = min(p.a_s, max(clearance, 1e-3), max(ctx.b.real, p.a_s / 2.0))
        return recommend_spec(decay_rate=1.5 * ctx.coupling.gamma, oscillation_rate=oscillation,
                              tol=self.tolerance / 10.0, dims=1, spread=spread,
                              nodes_per_panel=self.nodes_per_panel,
                              min_density=self.nodes_per_panel / scale)

    def with_spec(self, spec: ContourSpec) -> "EigenEvaluator":
        """Same context, tolerance and cache with the axis rule pinned"""
        return EigenEvaluator(self.context, spec=spec, tolerance=self.tolerance, cache=self.cache,
                              max_level=self.max_level, nodes_per_panel=self.nodes_per_panel)

    def _spec_for(self, x, y, spec: Optional[ContourSpec]) -> ContourSpec:
        if spec is not None:
            return spec.with_dims(1, 0.0)
        if self.spec is not None:
            return self.spec
        return self.recommend(x, y)

    def _key(self, *parts) -> str:
        ctx = self.context
        p = ctx.params
        head = f"{p.a_plus!r}|{p.a_minus!r}|{ctx.b!r}"
        return "|".join([head] + [str(part) for part in parts])

    # -- cached building blocks -------------------------------------------

    def log_kernel_factor(self, t: np.ndarray) -> np.ndarray:
        """ln g(t) with g(t) = c(b; t - ia + ib/2)"""
        ctx = self.context
        return ctx.gamma.log_c(ctx.b, np.asarray(t, dtype=complex) - 1j * ctx.params.a + 0.5j * ctx.b)

    def kernel_matrix(self, spec: ContourSpec) -> np.ndarray:
        """g(w_m - w_p) on the axis nodes; g is even on the real line"""
        def build():
            nodes, _ = axis_rule(spec)
            n = nodes.size
            rows, cols = np.triu_indices(n)
            with np.errstate(under="ignore"):
                upper = np.exp(self.log_kernel_factor(nodes[rows] - nodes[cols]))
            matrix = np.empty((n, n), dtype=complex)
            matrix[rows, cols] = upper
            matrix[cols, rows] = upper
            logger.info("Built kernel matrix with %d nodes per axis", n)
            return matrix
        return self.cache.get_or_compute(self._key("gmat", spec.grid_id), build)

    def inverse_c_matrix(self, spec: ContourSpec) -> np.ndarray:
        """1/c(b; w_p - w_q) on the axis nodes; vanishes on the diagonal"""
        def build():
            nodes, _ = axis_rule(spec)
            diff = nodes[:, None] - nodes[None, :]
            return np.asarray(self.context.gamma.c_inverse(self.context.b, diff), dtype=complex)
        return self.cache.get_or_compute(self._key("cinv", spec.grid_id), build)

    def kernel_vectors(self, points: np.ndarray, spec: ContourSpec, shift: float = 0.0) -> np.ndarray:
        """prod_j g(w_m + i shift - x_j) for each row x of points; shape (M, n)"""
        nodes, _ = axis_rule(spec)
        points = np.atleast_2d(np.asarray(points, dtype=complex))
        diff = (nodes[None, :, None] + 1j * shift) - points[:, None, :]
        logs = self.log_kernel_factor(diff)
        with np.errstate(under="ignore"):
            return np.exp(np.sum(logs, axis=-1))

    def point_vectors(self, points: np.ndarray, spec: ContourSpec, shift: float = 0.0) -> np.ndarray:
        """kernel_vectors, cached by the position rows; rapidity scans revisit the same rows"""
        points = np.ascontiguousarray(np.atleast_2d(np.asarray(points, dtype=complex)))
        key = self._key("kvec", spec.grid_id, repr(float(shift)), _digest(points))
        return self.cache.get_or_compute(key, lambda: self.kernel_vectors(points, spec, shift))

    def row_c_inverse(self, points: np.ndarray) -> np.ndarray:
        """1/C_N at every row of points"""
        points = np.ascontiguousarray(np.atleast_2d(np.asarray(points, dtype=complex)))
        return self.cache.get_or_compute(
            self._key("crow", _digest(points)),
            lambda: np.array([c_product_inverse(self.context, row) for row in points]))

    # -- tabulation ----------------------------------------------------------

    def _prefactor(self, mode: str, yvec: np.ndarray) -> complex:
        level = yvec.size
        if mode == MODE_J:
            return 1.0 / math.factorial(level - 1)
        ctx = self.context
        rapidity = np.prod(ctx.gamma.c_inverse(ctx.coupling.dual, hat_y(yvec)))
        return ((ctx.phi * self.constant.script_g) ** (level - 1) / math.factorial(level - 1)
                * complex(rapidity))

    def _table(self, mode: str, yvec: Sequence[float], spec: ContourSpec) -> np.ndarray:
        yvec = np.asarray(yvec, dtype=float)
        key = self._key("table", mode, spec.grid_id, repr(tuple(yvec.tolist())))
        return self.cache.get_or_compute(key, lambda: self._build_table(mode, yvec, spec))

    def _build_table(self, mode: str, yvec: np.ndarray, spec: ContourSpec) -> np.ndarray:
        level = yvec.size
        nodes, _ = axis_rule(spec)
        alpha = self.context.alpha
        if level == 1:
            return np.exp(1j * alpha * nodes * yvec[0])
        inner = self.inner_table(mode, hat_y(yvec), spec)
        gmat = self.kernel_matrix(spec)
        if level == 2:
            summed = gmat.T @ (inner[:, None] * gmat)
        else:
            summed = self._symmetric_contraction(inner, gmat, level)
        table = summed * np.exp(1j * alpha * yvec[-1] * sum_grid(nodes, level))
        if mode == MODE_E:
            table = table * pair_grid(self.inverse_c_matrix(spec), level)
        logger.info("Tabulated %s_%d on %d nodes", mode, level, table.size)
        return self._prefactor(mode, yvec) * table

    @staticmethod
    def _symmetric_contraction(inner: np.ndarray, gmat: np.ndarray, level: int) -> np.ndarray:
        n = gmat.shape[0]
        combos = np.array(list(combinations_with_replacement(range(n), level)))
        result = np.empty((n,) * level, dtype=complex)
        for start in range(0, len(combos), BATCH):
            block = combos[start:start + BATCH]
            vectors = np.ones((len(block), n), dtype=complex)
            for i in range(level):
                vectors = vectors * gmat[:, block[:, i]].T
            values = contract(inner, vectors)
            for perm in set(permutations(range(level))):
                result[tuple(block[:, list(perm)].T)] = values
        return result

    def inner_table(self, mode: str, yvec: Sequence[float], spec: ContourSpec) -> np.ndarray:
        """Inner function times its measure and the quadrature weights"""
        yvec = np.asarray(yvec, dtype=float)
        level = yvec.size
        key = self._key("inner", mode, spec.grid_id, repr(tuple(yvec.tolist())))

        def build():
            _, weights = axis_rule(spec)
            table = self._table(mode, yvec, spec)
            if level > 1:
                cinv = self.inverse_c_matrix(spec)
                measure = cinv * cinv.T if mode == MODE_J else cinv.T
                table = table * pair_grid(measure, level)
            return table * outer_weights(weights, level)

        return self.cache.get_or_compute(key, build)

    def tabulate_e(self, level: int, yvec: Sequence[float], spec: ContourSpec) -> np.ndarray:
        """E_level(z, yvec) at every node of the tensor grid"""
        self._check_level(level)
        if len(yvec) != level:
            raise DimensionError(f"E_{level} needs {level} rapidities, got {len(yvec)}")
        return self._table(MODE_E, yvec, spec)

    def tabulate_j(self, level: int, yvec: Sequence[float], spec: ContourSpec) -> np.ndarray:
        self._check_level(level)
        return self._table(MODE_J, yvec, spec)

    # -- pointwise evaluation --------------------------------------------

    def _check_level(self, level: int) -> None:
        if level < 1:
            raise ParameterError(f"Level must be at least 1, got {level}")
        if level > self.max_level:
            raise ParameterError(f"Level {level} exceeds the recursion limit {self.max_level}")

    def _check_contour(self, points: np.ndarray) -> None:
        limit = self.context.params.a - self.context.b.real / 2.0
        if np.any(np.abs(np.imag(points)) >= limit):
            raise PreconditionError(
                f"Real-line contour needs |Im x_j| < a - Re b/2 = {limit}; centre x first"
            )

    def _contract_points(self, mode: str, points: np.ndarray, y: np.ndarray,
                         spec: ContourSpec, shift: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
        """Sum over the inner grid for every row of points; also the absolute sum"""
        inner = self.inner_table(mode, hat_y(y), spec)
        vectors = self.point_vectors(points, spec, shift)
        values = contract(inner, vectors)
        magnitude = contract(np.abs(inner), np.abs(vectors)).real
        return values, magnitude

    def evaluate_points(self, mode: str, points, y: Sequence[float], spec: ContourSpec,
                        center: bool = True) -> Tuple[np.ndarray, np.ndarray]:
        """J or E at many positions sharing the rapidities y

        Complex rows are centred first and the translation phase restored.
        Returns the values and a roundoff floor per row.
        """
        points = np.atleast_2d(np.asarray(points, dtype=complex))
        y = np.asarray(y, dtype=float)
        level = y.size
        self._check_level(level)
        if points.shape[1] != level:
            raise DimensionError(f"Positions have {points.shape[1]} entries, rapidities {level}")
        alpha = self.context.alpha
        if level == 1:
            values = np.exp(1j * alpha * points[:, 0] * y[0])
            return values, np.zeros(values.size)

        shifts = points.mean(axis=1, keepdims=True) if center else np.zeros((points.shape[0], 1))
        local = points - shifts
        self._check_contour(local)
        sums = np.empty(local.shape[0], dtype=complex)
        magnitude = np.empty(local.shape[0])
        for start in range(0, local.shape[0], POINT_BLOCK):
            block = slice(start, start + POINT_BLOCK)
            sums[block], magnitude[block] = self._contract_points(mode, local[block], y, spec)
        phase = np.exp(1j * alpha * shifts[:, 0] * np.sum(y)) * np.exp(
            1j * alpha * y[-1] * np.sum(local, axis=1))
        if mode == MODE_E:
            inverse = self.row_c_inverse(local)
        else:
            inverse = np.ones(points.shape[0])
        factor = self._prefactor(mode, y) * phase * inverse
        floor = 10.0 * np.finfo(float).eps * np.abs(factor) * magnitude
        return factor * sums, floor

    def _result(self, mode: str, x, y, spec: Optional[ContourSpec], center: bool) -> EvalResult:
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=float)
        if x.size != y.size:
            raise DimensionError(f"x has {x.size} entries but y has {y.size}")
        self._check_level(x.size)
        if not in_holomorphy_domain(self.context.params, self.context.b, x):
            raise PreconditionError(f"x={x} lies outside the holomorphy domain D_N")
        spec = self._spec_for(x, y, spec)
        before = dict(self.cache.stats())
        fine, floor = self.evaluate_points(mode, x[None, :], y, spec, center)
        value = complex(fine[0])
        error = float(floor[0])
        evaluations = spec.nodes_per_axis ** max(x.size - 1, 0)
        if x.size > 1:
            coarse_spec = spec.halved()
            coarse, _ = self.evaluate_points(mode, x[None, :], y, coarse_spec, center)
            error += halving_error(value, complex(coarse[0]))
            evaluations += coarse_spec.nodes_per_axis ** (x.size - 1)
        after = self.cache.stats()
        check_accuracy(value, error, self.tolerance, f"{mode}_{x.size}")
        return EvalResult(value=value, error_estimate=error, evaluations=evaluations,
                          cache_hits=after['hits'] - before['hits'],
                          cache_misses=after['misses'] - before['misses'])

    def j(self, x, y, spec: Optional[ContourSpec] = None) -> EvalResult:
        """J_N on the real-line contour without recentring x"""
        return self._result(MODE_J, x, y, spec, center=False)

    def j_centered(self, x, y, spec: Optional[ContourSpec] = None) -> EvalResult:
        """J_N as exp(i N alpha X Y) times the integral over centred positions"""
        return self._result(MODE_J, x, y, spec, center=True)

    def e(self, x, y, representation: Representation = Representation.DIRECT,
          spec: Optional[ContourSpec] = None) -> EvalResult:
        """E_N, directly from the E-recursion or from J_N and the c-prefactors"""
        x = np.asarray(x, dtype=complex)
        center = bool(np.any(np.imag(x) != 0.0))
        if representation == Representation.DIRECT:
            return self._result(MODE_E, x, y, spec, center=center)
        if representation != Representation.VIA_J:
            raise ParameterError(f"EigenEvaluator cannot use representation {representation.value}")
        result = self._result(MODE_J, x, y, spec, center=center)
        factor = self.via_j_factor(x, y)
        return EvalResult(value=factor * result.value, error_estimate=abs(factor) * result.error_estimate,
                          evaluations=result.evaluations, cache_hits=result.cache_hits,
                          cache_misses=result.cache_misses)

    def via_j_factor(self, x, y) -> complex:
        """(phi G')^(N(N-1)/2) / (C_N(b; x) C_N(2a-b; y))"""
        ctx = self.context
        n = len(x)
        return ((ctx.phi * self.constant.script_g) ** (n * (n - 1) // 2)
                * c_product_inverse(ctx, x) * c_product_inverse(ctx, y, ctx.coupling.dual))
