"""
Scalar helpers and domain membership predicates.

The predicates use strict inequalities without slack; callers that want a
margin pass shrunken strips themselves.
"""

from typing import Sequence, Tuple

import numpy as np

from .data_models import Params, Coupling
from .errors import DimensionError, PreconditionError


def min_rapidity_gap(y: Sequence[float]) -> float:
    """Smallest y_j - y_k over j < k (order matters, may be negative)"""
    y = np.asarray(y, dtype=float)
    if y.size < 2:
        raise DimensionError(f"The rapidity gap needs at least two entries, got {y.size}")
    j, k = np.triu_indices(y.size, k=1)
    return float(np.min(y[j] - y[k]))


def centered_coords(x: Sequence[complex]) -> Tuple[complex, np.ndarray]:
    """Split x into its mean X and the centred residuals x - X"""
    x = np.asarray(x, dtype=complex)
    if x.size < 1:
        raise DimensionError("centered_coords needs a non-empty vector")
    center = complex(np.mean(x))
    return center, x - center


def _coupling(params: Params, b: complex, restricted: bool = False) -> Coupling:
    coupling = Coupling(params, b)
    if restricted and not coupling.in_s_l():
        raise PreconditionError(
            f"Coupling b={coupling.b} lies outside the strip S_l: 0 < Re b <= a_l = {params.a_l}"
        )
    return coupling


def _max_imag_spread(x: np.ndarray) -> float:
    if x.size < 2:
        return 0.0
    imag = np.imag(x)
    return float(np.max(imag) - np.min(imag))


def in_holomorphy_domain(params: Params, b: complex, x: Sequence[complex]) -> bool:
    """D_N: max |Im(x_j - x_k)| < 2a - Re b"""
    coupling = _coupling(params, b)
    x = np.asarray(x, dtype=complex)
    return _max_imag_spread(x) < 2.0 * params.a - coupling.b.real


def in_restricted_domain(params: Params, b: complex, x: Sequence[complex]) -> bool:
    """D_N^l: max |Im(x_j - x_k)| < a_s, for b in S_l"""
    _coupling(params, b, restricted=True)
    x = np.asarray(x, dtype=complex)
    return _max_imag_spread(x) < params.a_s


def in_centered_domain(params: Params, b: complex, x: Sequence[complex]) -> bool:
    """D_N^r: every centred coordinate has |Im| < a - Re b/2"""
    coupling = _coupling(params, b)
    _, centered = centered_coords(x)
    return bool(np.all(np.abs(np.imag(centered)) < params.a - coupling.b.real / 2.0))


def in_joint_domain(params: Params, b: complex, x: Sequence[complex],
                    y: Sequence[complex]) -> bool:
    """Centred domain in x together with max |Im(y_j - y_k)| < Re b"""
    coupling = _coupling(params, b)
    y = np.asarray(y, dtype=complex)
    return in_centered_domain(params, b, x) and _max_imag_spread(y) < coupling.b.real


def in_pole_free_domain(params: Params, b: complex, x: Sequence[complex]) -> bool:
    """D_N^l together with Im(x_j - x_{j+1}) < beta and Im(x_1 - x_N) > -a_s"""
    coupling = _coupling(params, b, restricted=True)
    if not in_restricted_domain(params, b, x):
        return False
    imag = np.imag(np.asarray(x, dtype=complex))
    if imag.size < 2:
        return True
    consecutive = np.all(imag[:-1] - imag[1:] < coupling.beta)
    return bool(consecutive and imag[0] - imag[-1] > -params.a_s)


def ray_rapidities(n: int, t: float) -> np.ndarray:
    """Uniformly spaced rapidities t*(N-1, N-3, ..., -(N-1))/2 with gap t"""
    return t * (n - 1 - 2 * np.arange(n)) / 2.0
