"""
Hyperbolic gamma function G(a+, a-; z) and the scalar functions built on it.

In the band |Im z| <= a - strip_tolerance the logarithm is computed from
the standard integral representation

    ln G(z) = i * int_0^inf dy/y [ sin(2yz) / (2 sinh(a+ y) sinh(a- y)) - z/(a+ a- y) ]

split at y0 = 1/(|z| + a_l): the piece on [0, y0] uses the cancellation-free
power series of the bracket, the subtraction term is integrated exactly
beyond y0, and the two exponentials of sin(2yz) are integrated along rays
leaving y0 at +-45 degrees, on which they decay without oscillating.
Outside the band the first-order difference equation in the short period

    G(w) = 2 cosh(pi (w - i a_s/2) / a_l) * G(w - i a_s)

is applied in log space until the argument re-enters the band.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .data_models import Params
from .errors import ContinuationError, InputError, ParameterError, SingularityError
from .quadrature import panel_rule

logger = logging.getLogger(__name__)

SERIES_TERMS = 24
RAY_ANGLE = math.pi / 4.0


def log_two_cosh(u: np.ndarray) -> np.ndarray:
    """ln(2 cosh u) without overflow; -inf real part at exact zeros"""
    u = np.asarray(u, dtype=complex)
    sign = np.where(u.real >= 0.0, 1.0, -1.0)
    su = sign * u
    with np.errstate(divide="ignore", invalid="ignore"):
        return su + np.log1p(np.exp(-2.0 * su))


def _lattice_heights(params: Params, max_height: float) -> np.ndarray:
    """Sorted values a + m a+ + n a- not exceeding max_height"""
    heights = []
    m = 0
    while params.a + m * params.a_plus <= max_height:
        n = 0
        while params.a + m * params.a_plus + n * params.a_minus <= max_height:
            heights.append(params.a + m * params.a_plus + n * params.a_minus)
            n += 1
        m += 1
    return np.unique(np.asarray(heights, dtype=float))


@dataclass(frozen=True)
class PoleZeroData:
    """Zero and pole lattices of G and its residue at -ia"""
    params: Params

    @property
    def residue_at_minus_ia(self) -> complex:
        return math.sqrt(self.params.a_plus * self.params.a_minus) / (2j * math.pi)

    def zeros(self, max_height: float) -> np.ndarray:
        return 1j * _lattice_heights(self.params, max_height)

    def poles(self, max_height: float) -> np.ndarray:
        return -1j * _lattice_heights(self.params, max_height)


@dataclass(frozen=True)
class CEnvelope:
    """Model phi(b)^(-s) exp(s alpha b z / 2) approximating c(b; z) for s Re z -> +inf"""
    alpha: float
    b: complex
    phi: complex
    rho: float
    sign: int

    @property
    def rate(self) -> float:
        return self.alpha * self.rho

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self.phi ** (-self.sign) * np.exp(self.sign * self.alpha * self.b * z / 2.0)

    def deviation(self, c_values, z) -> np.ndarray:
        """|model(z) c(b; z) - 1|"""
        return np.abs(self(z) * np.asarray(c_values) - 1.0)


class GammaEngine:
    """Evaluates G and the derived c, u and phi functions for fixed (a+, a-)"""

    def __init__(self, params: Params, strip_tolerance: Optional[float] = None,
                 tail_cutoff: float = 38.0, node_budget: int = 12,
                 exclusion_radius: Optional[float] = None, max_steps: int = 64,
                 chunk_size: int = 2048):
        """Initialize the engine

        Args:
            params: The period couple
            strip_tolerance: Distance from the strip edge |Im z| = a below which the
                integral is used directly; defaults to a_l/2 so the band is |Im z| <= a_s/2
            tail_cutoff: Ray integrals are truncated where the integrand has decayed by e^-tail_cutoff
            node_budget: Gauss-Legendre nodes per ray panel
            exclusion_radius: Distance to the pole lattice treated as singular
            max_steps: Cap on difference-equation steps
            chunk_size: Arguments processed per vectorized block
        """
        self.params = params
        self.strip_tolerance = params.a_l / 2.0 if strip_tolerance is None else float(strip_tolerance)
        if not 0.0 < self.strip_tolerance <= params.a_l / 2.0:
            raise ParameterError(
                f"strip_tolerance must lie in (0, a_l/2 = {params.a_l / 2.0}], got {self.strip_tolerance}"
            )
        if tail_cutoff <= 0 or node_budget < 4:
            raise ParameterError("tail_cutoff must be positive and node_budget at least 4")
        self.tail_cutoff = float(tail_cutoff)
        self.node_budget = int(node_budget)
        self.exclusion_radius = 1e-8 * params.a_s if exclusion_radius is None else float(exclusion_radius)
        self.max_steps = int(max_steps)
        self.chunk_size = int(chunk_size)
        self.band = params.a - self.strip_tolerance

        self._segment_nodes, self._segment_weights = panel_rule((0.0, 1.0), 2 * self.node_budget)
        edges = [0.0, 0.125, 0.25, 0.5, 1.0, 2.0]
        while edges[-1] < self.tail_cutoff:
            edges.append(min(edges[-1] + 2.0, self.tail_cutoff))
        self._ray_nodes, self._ray_weights = panel_rule(tuple(edges), self.node_budget)
        self._series = self._series_coefficients()

    def _series_coefficients(self) -> np.ndarray:
        """Coefficients (c1_k, c2_k) of y^(2k-2) (c1_k z^(2k+1) + c2_k z), k >= 1"""
        p = self.params
        d = p.a_plus - p.a_minus
        coefficients = np.empty((SERIES_TERMS, 2))
        for idx, k in enumerate(range(1, SERIES_TERMS + 1)):
            coefficients[idx, 0] = (p.a_plus * p.a_minus * (-1) ** k * 2.0 ** (2 * k + 1)
                                    / math.factorial(2 * k + 1))
            coefficients[idx, 1] = -((2 * p.a) ** (2 * k + 2) - d ** (2 * k + 2)) / math.factorial(2 * k + 2)
        return coefficients

    def pole_zero_data(self) -> PoleZeroData:
        return PoleZeroData(self.params)

    # -- core evaluation -------------------------------------------------

    def _log_gamma_band(self, z: np.ndarray) -> np.ndarray:
        """ln G on |Im z| <= band for a 1-D array"""
        p = self.params
        aa = p.a_plus * p.a_minus
        x = z.real
        v = z.imag
        sign = np.where(x >= 0.0, 1.0, -1.0)
        y0 = 1.0 / (np.abs(z) + p.a_l)

        # [0, y0]: series of the bracket divided by y^4
        y = y0[:, None] * self._segment_nodes[None, :]
        y2 = y * y
        z2 = z * z
        terms = np.empty((z.size, SERIES_TERMS), dtype=complex)
        power = z * z2
        for idx in range(SERIES_TERMS):
            terms[:, idx] = self._series[idx, 0] * power + self._series[idx, 1] * z
            power = power * z2
        acc = np.repeat(terms[:, -1:], y.shape[1], axis=1)
        for idx in range(SERIES_TERMS - 2, -1, -1):
            acc = acc * y2 + terms[:, idx:idx + 1]
        sinh_product = np.sinh(p.a_plus * y) * np.sinh(p.a_minus * y)
        segment = acc * y2 / (2.0 * aa * sinh_product)
        head = y0 * (segment @ self._segment_weights)

        # (y0, inf): exp(+-2iyz) along rays on which each decays
        cos_t, sin_t = math.cos(RAY_ANGLE), math.sin(RAY_ANGLE)
        rays = []
        for s in (1.0, -1.0):
            rate = 2.0 * (sin_t * np.abs(x) + cos_t * (p.a + s * v))
            direction = np.exp(1j * s * sign * RAY_ANGLE)
            yy = y0[:, None] + (self._ray_nodes[None, :] / rate[:, None]) * direction[:, None]
            integrand = np.exp(2j * s * yy * z[:, None]) / (
                2.0 * yy * np.sinh(p.a_plus * yy) * np.sinh(p.a_minus * yy))
            rays.append(direction / rate * (integrand @ self._ray_weights))

        return 1j * head - 1j * z / (aa * y0) + 0.5 * (rays[0] - rays[1])

    def _check_poles(self, z: np.ndarray) -> None:
        far = np.abs(z.real) > self.exclusion_radius
        if np.all(far):
            return
        close = z[~far]
        heights = _lattice_heights(self.params, float(np.max(-close.imag, initial=0.0)) + self.params.a_l)
        if heights.size == 0:
            return
        offsets = np.abs(close[:, None] + 1j * heights[None, :])
        nearest = heights[np.argmin(offsets, axis=1)]
        distance = np.min(offsets, axis=1)
        hit = distance <= self.exclusion_radius
        if np.any(hit):
            k = int(np.argmax(hit))
            raise SingularityError(
                f"G evaluated within {self.exclusion_radius:.1e} of its pole at {-1j * nearest[k]}",
                location=complex(close[k]), nearest=complex(-1j * nearest[k]), factor="G")

    def log_gamma(self, z):
        """Logarithm of G (any branch); vectorized over arrays"""
        z_arr = np.asarray(z, dtype=complex)
        flat = z_arr.ravel()
        if not np.all(np.isfinite(flat)):
            raise InputError("G requires finite arguments")
        self._check_poles(flat)

        p = self.params
        v = flat.imag
        down = np.where(v > self.band, np.ceil((v - self.band) / p.a_s - 1e-12), 0).astype(int)
        up = np.where(v < -self.band, np.ceil((-self.band - v) / p.a_s - 1e-12), 0).astype(int)
        steps = int(max(down.max(initial=0), up.max(initial=0)))
        if steps > self.max_steps:
            raise ContinuationError(f"Continuation needs {steps} strips, more than the cap {self.max_steps}")

        w = flat.copy()
        prefactor = np.zeros(flat.size, dtype=complex)
        for j in range(int(down.max(initial=0))):
            mask = down > j
            prefactor[mask] += log_two_cosh(np.pi * (w[mask] - 0.5j * p.a_s) / p.a_l)
            w[mask] -= 1j * p.a_s
        for j in range(int(up.max(initial=0))):
            mask = up > j
            prefactor[mask] -= log_two_cosh(np.pi * (w[mask] + 0.5j * p.a_s) / p.a_l)
            w[mask] += 1j * p.a_s

        result = np.empty(flat.size, dtype=complex)
        for start in range(0, flat.size, self.chunk_size):
            stop = start + self.chunk_size
            result[start:stop] = self._log_gamma_band(w[start:stop])
        result += prefactor
        return result.reshape(z_arr.shape) if z_arr.ndim else complex(result[0])

    def gamma(self, z):
        """G(a+, a-; z)"""
        with np.errstate(under="ignore"):
            return np.exp(self.log_gamma(z))

    # -- zeros and residues ----------------------------------------------

    def nearest_zero_distance(self, z) -> np.ndarray:
        """Distance of z to the zero lattice ia + i m a+ + i n a-"""
        z = np.asarray(z, dtype=complex)
        heights = _lattice_heights(self.params, float(np.max(z.imag, initial=0.0)) + self.params.a_l)
        if heights.size == 0:
            return np.full(z.shape, np.inf)
        return np.min(np.abs(z[..., None] - 1j * heights), axis=-1)

    def _check_zero(self, z, factor: str) -> None:
        distance = self.nearest_zero_distance(z)
        hit = distance <= self.exclusion_radius
        if np.any(hit):
            location = complex(np.asarray(z, dtype=complex)[hit].ravel()[0])
            raise SingularityError(f"{factor} vanishes at {location}", location=location, factor=factor)

    def residue_limit(self, eps: Tuple[float, float] = (1e-3, 1e-4)) -> complex:
        """Two-point Richardson extrapolation of (-z - ia) G(z) as z -> -ia"""
        e1, e2 = eps
        ia = 1j * self.params.a
        f1 = -e1 * self.gamma(-ia + e1)
        f2 = -e2 * self.gamma(-ia + e2)
        return complex((e1 * f2 - e2 * f1) / (e1 - e2))

    # -- derived scalar functions ----------------------------------------

    def phi(self, b: complex) -> complex:
        """phi(b) = exp(i alpha b (b - 2a) / 4)"""
        p = self.params
        return complex(np.exp(1j * p.alpha * b * (b - 2.0 * p.a) / 4.0))

    def script_g(self, b: complex) -> complex:
        """G(ib - ia) / sqrt(a+ a-)"""
        p = self.params
        return complex(self.gamma(1j * b - 1j * p.a)) / math.sqrt(p.a_plus * p.a_minus)

    def log_c(self, b: complex, z, check: bool = True):
        """ln c(b; z) = ln G(z + ia - ib) - ln G(z + ia)"""
        ia = 1j * self.params.a
        z = np.asarray(z, dtype=complex)
        if check:
            self._check_zero(z + ia, "denominator G(z+ia) of c")
        try:
            numerator = self.log_gamma(z + ia - 1j * b)
        except SingularityError as exc:
            raise exc.annotate("numerator G(z+ia-ib) of c") from exc
        return numerator - self.log_gamma(z + ia)

    def c(self, b: complex, z):
        """Generalized Harish-Chandra function G(z+ia-ib)/G(z+ia)"""
        return np.exp(self.log_c(b, z))

    def log_c_inverse(self, b: complex, z):
        """ln(1/c(b; z)); finite where c has a pole of its denominator's zero"""
        ia = 1j * self.params.a
        z = np.asarray(z, dtype=complex)
        self._check_zero(z + ia - 1j * b, "numerator G(z+ia-ib) of c")
        try:
            numerator = self.log_gamma(z + ia)
        except SingularityError as exc:
            raise exc.annotate("denominator G(z+ia) of c") from exc
        return numerator - self.log_gamma(z + ia - 1j * b)

    def c_inverse(self, b: complex, z):
        with np.errstate(under="ignore"):
            return np.exp(self.log_c_inverse(b, z))

    def u(self, b: complex, z):
        """Scattering function -c(b; z)/c(b; -z)"""
        z = np.asarray(z, dtype=complex)
        low = -min(b.real, 2.0 * self.params.a - b.real)
        imag = z.imag
        if np.any((imag <= low) | (imag >= self.params.a_s)):
            bad = complex(z[(imag <= low) | (imag >= self.params.a_s)].ravel()[0])
            raise SingularityError(
                f"u evaluated at {bad}, outside its regularity band {low} < Im z < {self.params.a_s}",
                location=bad, factor="u")
        # the zero of G(ia) cancels between c(z) and c(-z) at z = 0
        value = -np.exp(self.log_c(b, z, check=False) - self.log_c(b, -z, check=False))
        return value if value.ndim else complex(value)

    def asymptotic_envelope_c(self, b: complex, rho: float, sign: int = 1) -> Callable:
        """Model of c(b; z) for sign * Re z -> +inf with decay rate alpha * rho"""
        p = self.params
        if not p.a_s / 2.0 <= rho < p.a_s:
            raise ParameterError(f"rho must lie in [a_s/2, a_s) = [{p.a_s / 2.0}, {p.a_s}), got {rho}")
        if sign not in (1, -1):
            raise ParameterError(f"sign must be +1 or -1, got {sign}")
        return CEnvelope(alpha=p.alpha, b=complex(b), phi=self.phi(b), rho=float(rho), sign=sign)
