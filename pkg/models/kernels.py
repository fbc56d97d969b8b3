"""
Multivariate kernel algebra built from c-functions.

Provides the pair products C_N and their inverses, the weight W_N, the
kernels S#_N and K#_N, the rapidity factors M_N and rho_N and the
difference map y -> y_hat. Products over more than three particles are
accumulated as sums of logarithms and exponentiated once.
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence, Tuple

import numpy as np

from .data_models import Coupling, Params
from .errors import DimensionError, SingularityError
from .hyperbolic_gamma import GammaEngine

logger = logging.getLogger(__name__)

LOG_SPACE_THRESHOLD = 3


@dataclass(frozen=True)
class KernelContext:
    """Gamma engine plus coupling; carries all b-dependence of the kernels"""
    gamma: GammaEngine
    coupling: Coupling

    def __post_init__(self):
        if self.coupling.params != self.gamma.params:
            raise ValueError("Coupling and gamma engine use different (a+, a-)")

    @property
    def params(self) -> Params:
        return self.gamma.params

    @property
    def b(self) -> complex:
        return self.coupling.b

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def phi(self) -> complex:
        return self.gamma.phi(self.b)

    @property
    def script_g(self) -> complex:
        return self.gamma.script_g(self.b)


def make_context(a_plus: float, a_minus: float, b: complex, **engine_options) -> KernelContext:
    """Build a context from raw numbers"""
    params = Params(a_plus, a_minus)
    return KernelContext(GammaEngine(params, **engine_options), Coupling(params, b))


def accumulate(log_factors: Sequence[complex], count: int) -> complex:
    """Multiply factors given by their logarithms; log space beyond three particles"""
    logs = np.asarray(log_factors, dtype=complex)
    if logs.size == 0:
        return 1.0 + 0.0j
    with np.errstate(under="ignore"):
        if count > LOG_SPACE_THRESHOLD:
            return complex(np.exp(np.sum(logs)))
        return complex(np.prod(np.exp(logs)))


def _vector(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=complex))


def hat_y(y: Sequence[float]) -> np.ndarray:
    """(y_1 - y_N, ..., y_{N-1} - y_N)"""
    y = np.asarray(y)
    if y.size < 1:
        raise DimensionError("hat_y needs a non-empty rapidity vector")
    return y[:-1] - y[-1]


def _pair_logs(ctx: KernelContext, x: np.ndarray, b: complex, inverse: bool):
    logs = []
    for j, k in combinations(range(x.size), 2):
        try:
            if inverse:
                logs.append(ctx.gamma.log_c_inverse(b, x[j] - x[k]))
            else:
                logs.append(ctx.gamma.log_c(b, x[j] - x[k]))
        except SingularityError as exc:
            raise exc.annotate(f"pair ({j + 1},{k + 1})") from exc
    return logs


def c_product(ctx: KernelContext, x, b: Optional[complex] = None) -> complex:
    """C_N(b; x) = prod_{j<k} c(b; x_j - x_k); C_1 = 1"""
    x = _vector(x)
    b = ctx.b if b is None else complex(b)
    return accumulate(_pair_logs(ctx, x, b, inverse=False), x.size)


def c_product_inverse(ctx: KernelContext, x, b: Optional[complex] = None) -> complex:
    """1/C_N(b; x), exactly zero-free at coinciding positions"""
    x = _vector(x)
    b = ctx.b if b is None else complex(b)
    return accumulate(_pair_logs(ctx, x, b, inverse=True), x.size)


def c_product_zero_distance(ctx: KernelContext, x) -> float:
    """Distance of the pair differences to the zero set x_j - x_k = ib + i(m a+ + n a-)"""
    x = _vector(x)
    if x.size < 2:
        return float("inf")
    j, k = np.triu_indices(x.size, k=1)
    shifted = x[j] - x[k] - 1j * ctx.b + 1j * ctx.params.a
    return float(np.min(ctx.gamma.nearest_zero_distance(shifted)))


def weight_function(ctx: KernelContext, z) -> complex:
    """W_N(z) = 1/(C_N(z) C_N(-z))"""
    z = _vector(z)
    logs = _pair_logs(ctx, z, ctx.b, inverse=True) + _pair_logs(ctx, -z, ctx.b, inverse=True)
    return accumulate(logs, z.size)


def _kernel_arguments(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    if z.size != x.size - 1:
        raise DimensionError(f"Kernel needs len(z) = len(x) - 1, got {z.size} and {x.size}")
    return z[None, :] - x[:, None]


def kernel_s(ctx: KernelContext, x, z, form: str = "c") -> complex:
    """S#_N(x, z) as a double product over j <= N, k <= N-1

    form "c" uses c(b; z_k - x_j - ia + ib/2); form "gamma" uses the
    G-ratio G(z_k - x_j - ib/2)/G(z_k - x_j + ib/2).
    """
    x, z = _vector(x), _vector(z)
    diff = _kernel_arguments(x, z)
    b, a = ctx.b, ctx.params.a
    try:
        if form == "c":
            logs = ctx.gamma.log_c(b, diff - 1j * a + 0.5j * b)
        elif form == "gamma":
            logs = ctx.gamma.log_gamma(diff - 0.5j * b) - ctx.gamma.log_gamma(diff + 0.5j * b)
        else:
            raise ValueError(f"Unknown kernel form {form!r}")
    except SingularityError as exc:
        raise exc.annotate("kernel S#") from exc
    return accumulate(np.ravel(logs), x.size)


def kernel_k(ctx: KernelContext, x, z) -> complex:
    """K#_N(x, z) = S#_N(x, z) / (C_N(b; x) C_{N-1}(b; -z))"""
    x, z = _vector(x), _vector(z)
    diff = _kernel_arguments(x, z)
    b, a = ctx.b, ctx.params.a
    logs = list(np.ravel(ctx.gamma.log_c(b, diff - 1j * a + 0.5j * b)))
    try:
        logs += _pair_logs(ctx, x, b, inverse=True)
    except SingularityError as exc:
        raise exc.annotate("C_N(x)") from exc
    try:
        logs += _pair_logs(ctx, -z, b, inverse=True)
    except SingularityError as exc:
        raise exc.annotate("C_{N-1}(-z)") from exc
    return accumulate(logs, x.size)


def log_rho_factor(ctx: KernelContext, y) -> complex:
    p = ctx.params
    return complex(-p.alpha * (p.a - ctx.b / 2.0) * np.sum(hat_y(y)))


def rho_factor(ctx: KernelContext, y) -> complex:
    """rho_N(y) = exp(-alpha (a - b/2) sum_n (y_n - y_N))"""
    return complex(np.exp(log_rho_factor(ctx, y)))


def log_m_factor(ctx: KernelContext, y) -> complex:
    y = np.asarray(y, dtype=float)
    yh = hat_y(y)
    if yh.size == 0:
        return 0.0j
    try:
        inverse = np.sum(ctx.gamma.log_c_inverse(ctx.coupling.dual, yh))
    except SingularityError as exc:
        raise exc.annotate("c(2a-b; y_n - y_N)") from exc
    return complex((y.size - 1) * np.log(ctx.phi) + log_rho_factor(ctx, y) + inverse)


def m_factor(ctx: KernelContext, y) -> complex:
    """M_N(y) = phi(b)^(N-1) rho_N(y) / prod_n c(2a-b; y_n - y_N)"""
    return complex(np.exp(log_m_factor(ctx, y)))


def u_product(ctx: KernelContext, x) -> complex:
    """prod_{j<k} u(b; x_j - x_k)"""
    x = _vector(x)
    value = 1.0 + 0.0j
    for j, k in combinations(range(x.size), 2):
        value *= ctx.gamma.u(ctx.b, x[j] - x[k])
    return value


def split_positions(x, nu: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    """(x_nu, x(nu)) for 1-based increasing indices nu"""
    x = _vector(x)
    chosen = [v - 1 for v in nu]
    rest = [j for j in range(x.size) if j not in chosen]
    return x[chosen], x[rest]


def c_factorization(ctx: KernelContext, x, nu: Sequence[int]) -> complex:
    """Right-hand side of the C_N factorization along the index set nu"""
    x = _vector(x)
    nu = list(nu)
    chosen, rest = split_positions(x, nu)
    logs = _pair_logs(ctx, chosen, ctx.b, inverse=False) + _pair_logs(ctx, rest, ctx.b, inverse=False)
    for ell, pos in enumerate(nu):
        earlier, later = set(nu[:ell]), set(nu[ell + 1:])
        for j in range(1, x.size + 1):
            if j < pos and j not in earlier:
                logs.append(ctx.gamma.log_c(ctx.b, x[j - 1] - x[pos - 1]))
            elif j > pos and j not in later:
                logs.append(ctx.gamma.log_c(ctx.b, x[pos - 1] - x[j - 1]))
    return accumulate(logs, x.size)


def inversion_factor(ctx: KernelContext, x, perm: Sequence[int]) -> complex:
    """prod of -u(x_j - x_k) over j < k inverted by perm, where (perm x)_i = x_perm[i] (0-based)"""
    x = _vector(x)
    position = np.argsort(np.asarray(perm))
    value = 1.0 + 0.0j
    for j, k in combinations(range(x.size), 2):
        if position[j] > position[k]:
            value *= -ctx.gamma.u(ctx.b, x[j] - x[k])
    return value
