"""
Contour-aware tensor-product Gauss-Legendre quadrature.

Every integral in the lab runs through this module: the one-dimensional
panel rules are shared with the gamma engine, the eigenfunction recursion
contracts tabulated kernels against the same axis rules, and `integrate`
handles generic L-variate integrands over shifted real lines.
"""

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.special import roots_legendre

from .data_models import ContourSpec, EvalResult
from .errors import AccuracyWarning, ParameterError, QuadratureError

logger = logging.getLogger(__name__)

CHUNK_SIZE = 1 << 16


@lru_cache(maxsize=64)
def legendre_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]"""
    nodes, weights = roots_legendre(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=256)
def panel_rule(edges: Tuple[float, ...], n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite rule with n nodes on each interval between consecutive edges"""
    ref_nodes, ref_weights = legendre_rule(n)
    left = np.asarray(edges[:-1])[:, None]
    right = np.asarray(edges[1:])[:, None]
    half = 0.5 * (right - left)
    nodes = (left + half * (ref_nodes[None, :] + 1.0)).ravel()
    weights = (half * ref_weights[None, :]).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def axis_rule(spec: ContourSpec, axis: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Complex nodes on R + i*offset of one axis, with real weights"""
    nodes, weights = panel_rule(tuple(spec.panel_edges()), spec.nodes_per_panel)
    return nodes + 1j * spec.offsets[axis], weights


def _grid_chunk(rules, start: int, stop: int) -> Tuple[np.ndarray, np.ndarray]:
    shape = tuple(len(r[0]) for r in rules)
    flat = np.arange(start, stop)
    indices = np.unravel_index(flat, shape)
    points = np.stack([rules[k][0][idx] for k, idx in enumerate(indices)], axis=-1)
    weights = np.ones(flat.size)
    for k, idx in enumerate(indices):
        weights = weights * rules[k][1][idx]
    return points, weights


def _evaluate(f: Callable[[np.ndarray], np.ndarray], spec: ContourSpec,
              threads: int) -> Tuple[complex, float]:
    rules = [axis_rule(spec, k) for k in range(spec.dims)]
    total = spec.total_nodes
    bounds = [(s, min(s + CHUNK_SIZE, total)) for s in range(0, total, CHUNK_SIZE)]

    def run(bound):
        points, weights = _grid_chunk(rules, *bound)
        values = np.asarray(f(points), dtype=complex)
        bad = ~np.isfinite(values)
        if np.any(bad):
            node = points[np.argmax(bad)]
            raise QuadratureError(f"Non-finite integrand value at node {node}", node=node)
        weighted = weights * values
        return np.sum(weighted), np.sum(np.abs(weighted))

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(run, bounds))
    else:
        partials = [run(b) for b in bounds]

    value = complex(np.sum(np.array([p[0] for p in partials])))
    magnitude = float(np.sum([p[1] for p in partials]))
    return value, magnitude


def integrate(f: Callable[[np.ndarray], np.ndarray], spec: ContourSpec,
              tol: Optional[float] = None, threads: int = 1,
              estimate_error: bool = True) -> EvalResult:
    """Integrate a vectorized L-variate integrand over the tensor grid

    Args:
        f: Maps an array of shape (M, L) of complex points to M complex values
        spec: Contour and panel layout
        tol: Tolerance on the error estimate (relative to max(1, |value|))
        threads: Worker threads for node evaluation; the reduction order is fixed
        estimate_error: Compare against the rule with half the nodes per panel

    Returns:
        EvalResult with the fine-rule value
    """
    value, magnitude = _evaluate(f, spec, threads)
    evaluations = spec.total_nodes
    error = 10.0 * np.finfo(float).eps * magnitude
    if estimate_error:
        coarse = spec.halved()
        coarse_value, _ = _evaluate(f, coarse, threads)
        evaluations += coarse.total_nodes
        error += halving_error(value, coarse_value)
    check_accuracy(value, error, tol, "integrate")
    return EvalResult(value=value, error_estimate=float(error), evaluations=evaluations)


def halving_error(fine: complex, coarse: complex) -> float:
    """Error of a Gauss rule estimated as |value(n) - value(n/2)|"""
    return float(abs(fine - coarse))


def check_accuracy(value: complex, error: float, tol: Optional[float], label: str) -> bool:
    """Warn (never raise) when an error estimate exceeds the tolerance"""
    if tol is None:
        return True
    if error > tol * max(1.0, abs(value)):
        message = f"{label}: error estimate {error:.3e} exceeds tolerance {tol:.1e}"
        logger.warning(message)
        warnings.warn(message, AccuracyWarning, stacklevel=3)
        return False
    return True


def recommend_spec(decay_rate: float, oscillation_rate: float, tol: float, dims: int,
                   spread: float = 0.0, offsets: Optional[Sequence[float]] = None,
                   nodes_per_panel: int = 16, min_density: float = 2.0) -> ContourSpec:
    """Choose truncation and panel count from decay and oscillation rates

    The truncation is ln(1/tol)/decay_rate plus the configuration spread and
    the node density resolves at least four nodes per oscillation period.
    """
    if tol <= 0:
        raise ParameterError(f"Tolerance must be positive, got {tol}")
    if decay_rate <= 0:
        raise ParameterError(f"Decay rate must be positive, got {decay_rate}")
    truncation = math.log(1.0 / tol) / decay_rate + spread
    density = max(4.0 * abs(oscillation_rate) / (2.0 * math.pi), min_density)
    panels = max(1, math.ceil(2.0 * truncation * density / nodes_per_panel))
    offsets = tuple(offsets) if offsets is not None else (0.0,) * dims
    spec = ContourSpec(dims, offsets, truncation, panels, nodes_per_panel)
    logger.info("Recommended rule: T=%.3f, %d panels x %d nodes, %d nodes total",
                truncation, panels, nodes_per_panel, spec.total_nodes)
    return spec
