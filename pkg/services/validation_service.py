"""
Validation service for run configurations.
Checks every field against the parameter and domain predicates before any
computation starts.
"""

import math
from typing import List, Tuple

import numpy as np

from models.data_models import Coupling, Params, Representation, RunConfig
from models.errors import PreconditionError
from models.params import in_holomorphy_domain

SUITES = ("gamma", "kernels", "symmetry", "lemma", "asymptotics", "bounds", "all")
FUNCTIONS = ("E", "J", "J_alt")


class ValidationError(Exception):
    """Malformed configuration; the message names the offending field"""
    pass


class RunConfigValidator:
    """Field-level validation of RunConfig"""

    @staticmethod
    def validate_params(config: RunConfig) -> List[str]:
        errors = []
        for name in ('a_plus', 'a_minus'):
            value = getattr(config, name)
            if not (math.isfinite(value) and value > 0):
                errors.append(f"{name}: must be a positive finite number, got {value}")
        return errors

    @staticmethod
    def validate_configuration(config: RunConfig) -> List[str]:
        errors = []
        if config.n < 1:
            errors.append(f"n: must be at least 1, got {config.n}")
            return errors
        if config.x and len(config.x) != config.n:
            errors.append(f"x: expected {config.n} entries, got {len(config.x)}")
        if config.y and len(config.y) != config.n:
            errors.append(f"y: expected {config.n} entries, got {len(config.y)}")
        if any(not np.isfinite(v) for v in config.x):
            errors.append("x: entries must be finite")
        if any(not np.isfinite(v) for v in config.y):
            errors.append("y: entries must be finite")
        return errors

    @staticmethod
    def validate_quadrature(config: RunConfig) -> List[str]:
        errors = []
        if not (config.tolerance > 0 and config.tolerance < 1):
            errors.append(f"tolerance: must lie in (0, 1), got {config.tolerance}")
        if config.threads < 1:
            errors.append(f"threads: must be at least 1, got {config.threads}")
        quad = config.quadrature
        for key in ('panels', 'nodes_per_panel'):
            if key in quad and int(quad[key]) < 1:
                errors.append(f"quadrature.{key}: must be positive, got {quad[key]}")
        if 'truncation' in quad and not float(quad['truncation']) > 0:
            errors.append(f"quadrature.truncation: must be positive, got {quad['truncation']}")
        unknown = set(quad) - {'truncation', 'panels', 'nodes_per_panel', 'breakpoints'}
        if unknown:
            errors.append(f"quadrature: unknown keys {', '.join(sorted(unknown))}")
        return errors

    @staticmethod
    def validate_options(config: RunConfig) -> List[str]:
        errors = []
        if config.suite not in SUITES:
            errors.append(f"suite: must be one of {', '.join(SUITES)}, got {config.suite!r}")
        if config.function not in FUNCTIONS:
            errors.append(f"function: must be one of {', '.join(FUNCTIONS)}, got {config.function!r}")
        try:
            Representation(config.representation)
        except ValueError:
            choices = ', '.join(r.value for r in Representation)
            errors.append(f"representation: must be one of {choices}, got {config.representation!r}")
        if config.t_values and np.any(np.diff(config.t_values) <= 0):
            errors.append("t_values: must be strictly increasing")
        return errors

    @staticmethod
    def check_preconditions(config: RunConfig) -> None:
        """Raise PreconditionError when b or x leave their strips"""
        coupling = Coupling(Params(config.a_plus, config.a_minus), config.b)
        if config.x and not in_holomorphy_domain(coupling.params, coupling.b, config.x):
            raise PreconditionError(f"x={config.x} lies outside the holomorphy domain D_N")

    @staticmethod
    def validate_all(config: RunConfig) -> Tuple[bool, List[str]]:
        """Validate all fields and return (is_valid, error_messages)"""
        all_errors = []

        all_errors.extend(RunConfigValidator.validate_params(config))
        all_errors.extend(RunConfigValidator.validate_configuration(config))
        all_errors.extend(RunConfigValidator.validate_quadrature(config))
        all_errors.extend(RunConfigValidator.validate_options(config))

        return len(all_errors) == 0, all_errors
