"""
Subcommands of the command-line entry point.
Each module exposes add_parser(subparsers) and run(config, args) -> exit code.
"""

import argparse

import numpy as np

from models.data_models import Configuration, RunConfig
from models.eigenfunctions import EigenEvaluator
from models.errors import DimensionError
from models.kernels import KernelContext, make_context
from services.config_manager import ConfigManager
from services.validation_service import ValidationError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PRECONDITION = 2
EXIT_ACCURACY = 3


def add_model_arguments(parser: argparse.ArgumentParser) -> None:
    """Flags shared by every command that evaluates something"""
    group = parser.add_argument_group("model")
    group.add_argument('--aplus', type=float, help="period a+")
    group.add_argument('--aminus', type=float, help="period a-")
    group.add_argument('--b', help="coupling, e.g. 0.5 or 0.5+0.1j")
    group.add_argument('--n', type=int, help="particle number N")
    group.add_argument('--x', nargs='+', help="positions (complex allowed)")
    group.add_argument('--y', nargs='+', type=float, help="rapidities")
    group.add_argument('--tol', type=float, help="target accuracy")


def build_context(config: RunConfig) -> KernelContext:
    return make_context(config.a_plus, config.a_minus, config.b)


def build_evaluator(config: RunConfig, ctx: KernelContext = None) -> EigenEvaluator:
    ctx = ctx if ctx is not None else build_context(config)
    return EigenEvaluator(ctx, spec=ConfigManager.quadrature_spec(config), tolerance=config.tolerance)


def require_vectors(config: RunConfig, command: str):
    if not config.x:
        raise ValidationError(f"x: required for {command}")
    if not config.y:
        raise ValidationError(f"y: required for {command}")
    try:
        return Configuration(config.x, config.y).as_arrays()
    except DimensionError as e:
        raise ValidationError(f"y: {e}") from e


def default_positions(n: int) -> np.ndarray:
    """Distinct real positions centred near the origin"""
    return np.linspace(0.3, -0.3, n) if n > 1 else np.array([0.3])


def accuracy_ok(result, config: RunConfig) -> bool:
    """Same criterion as the engines' accuracy check, without a second warning"""
    return result.error_estimate <= config.tolerance * max(1.0, abs(result.value))
