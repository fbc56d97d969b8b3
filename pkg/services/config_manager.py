"""
ConfigManager - Builds a validated RunConfig from a JSON file and command-line flags.
Flags win over file values; the merged result is checked before any computation.
"""

import json
import logging
from typing import Any, Dict, Optional

from models.data_models import (
    RunConfig, contour_spec_from_dict, parse_complex, run_config_from_dict, run_config_to_dict,
)
from .validation_service import RunConfigValidator, ValidationError

logger = logging.getLogger(__name__)

# command-line destination -> RunConfig field
FLAG_FIELDS = {
    'aplus': 'a_plus',
    'aminus': 'a_minus',
    'n': 'n',
    'x': 'x',
    'y': 'y',
    'tol': 'tolerance',
    'seed': 'seed',
    'suite': 'suite',
    'representation': 'representation',
    'function': 'function',
    'shift': 'shift',
    't': 't_values',
    'claim': 'claim',
    'threads': 'threads',
    'output': 'output',
    'csv': 'csv',
}


class ConfigManager:
    """Manages loading, merging and validating run configurations"""

    @staticmethod
    def load_config_file(path: str) -> Dict[str, Any]:
        """Read a JSON config file into a plain dictionary"""
        try:
            with open(path, 'r', encoding='utf-8') as handle:
                data = json.load(handle)
        except FileNotFoundError as e:
            raise ValidationError(f"config: file {path!r} not found") from e
        except json.JSONDecodeError as e:
            raise ValidationError(f"config: {path!r} is not valid JSON ({e.msg} at line {e.lineno})") from e
        if not isinstance(data, dict):
            raise ValidationError(f"config: {path!r} must hold a JSON object")
        if 'b' in data:
            b = parse_complex(data.pop('b'))
            data.setdefault('b_re', b.real)
            data.setdefault('b_im', b.imag)
        return data

    @staticmethod
    def _overrides(args) -> Dict[str, Any]:
        overrides = {}
        for dest, name in FLAG_FIELDS.items():
            value = getattr(args, dest, None)
            if value is not None:
                overrides[name] = value
        b = getattr(args, 'b', None)
        if b is not None:
            try:
                b = parse_complex(b)
            except ValueError as e:
                raise ValidationError(f"b: cannot parse {b!r} as a complex number") from e
            overrides['b_re'] = b.real
            overrides['b_im'] = b.imag
        return overrides

    @staticmethod
    def build_run_config(args, defaults: Optional[Dict[str, Any]] = None) -> RunConfig:
        """Merge defaults, the config file and flag overrides into a validated RunConfig"""
        data = dict(defaults or {})
        path = getattr(args, 'config', None)
        if path:
            data.update(ConfigManager.load_config_file(path))
        data.update(ConfigManager._overrides(args))
        if 'n' not in data and data.get('x'):
            data['n'] = len(data['x'])
        try:
            config = run_config_from_dict(data)
        except KeyError as e:
            raise ValidationError(f"config: {e.args[0]}") from e
        except (TypeError, ValueError) as e:
            raise ValidationError(f"config: malformed value ({e})") from e

        is_valid, errors = RunConfigValidator.validate_all(config)
        if not is_valid:
            raise ValidationError("; ".join(errors))
        logger.debug("Run config: %s", run_config_to_dict(config))
        return config

    @staticmethod
    def quadrature_spec(config: RunConfig):
        """Explicit axis rule when the config overrides the recommendation"""
        quad = config.quadrature
        if not {'truncation', 'panels', 'nodes_per_panel'} <= set(quad):
            if quad:
                logger.warning("Partial quadrature override ignored; need truncation, panels and nodes_per_panel")
            return None
        return contour_spec_from_dict(quad)

    @staticmethod
    def save_config(config: RunConfig, path: str) -> None:
        with open(path, 'w', encoding='utf-8') as handle:
            json.dump(run_config_to_dict(config), handle, indent=2)
