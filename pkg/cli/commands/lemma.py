"""
lemma - term-by-term report of the shifted-contour representation of E_N
"""

import logging

import numpy as np

from models.data_models import RunConfig
from models.params import ray_rapidities
from models.residue_scheme import ContourShiftScheme, pole_clearance
from services.formatting_service import emit_report, write_csv
from services.validation_service import ValidationError
from . import (
    EXIT_ACCURACY, EXIT_OK, add_model_arguments, build_context, build_evaluator,
    default_positions,
)

logger = logging.getLogger(__name__)


def add_parser(subparsers):
    parser = subparsers.add_parser('lemma', help="contour-shift terms for one configuration")
    add_model_arguments(parser)
    parser.add_argument('--shift', type=float, help="contour shift r in (0, a_s)")
    parser.add_argument('--compare', action='store_true',
                        help="also evaluate E_N on the real line and report the relative gap")
    parser.set_defaults(handler=run)
    return parser


def run(config: RunConfig, args) -> int:
    ctx = build_context(config)
    evaluator = build_evaluator(config, ctx)
    n = len(config.x) if config.x else config.n
    if n < 2:
        raise ValidationError("n: the contour-shift representation needs N >= 2")
    x = np.asarray(config.x, dtype=complex) if config.x else default_positions(n)
    y = np.asarray(config.y, dtype=float) if config.y else ray_rapidities(n, ctx.params.a)

    scheme = ContourShiftScheme(evaluator, r=config.shift, threads=config.threads)
    frame = scheme.terms(x, y)
    if config.csv:
        write_csv(frame, config.csv)
    value = complex(frame['value_re'].sum(), frame['value_im'].sum())
    error = float(frame['error_estimate'].sum())

    report = {
        'n': n,
        'r': scheme.r,
        'kappa': scheme.kappa,
        'pole_clearance': pole_clearance(ctx, x.real, scheme.r),
        'value_re': value.real,
        'value_im': value.imag,
        'error_estimate': error,
        'terms': len(frame),
    }
    if getattr(args, 'compare', False):
        direct = evaluator.e(x, y)
        report['direct_re'] = direct.value.real
        report['direct_im'] = direct.value.imag
        report['relative_gap'] = abs(value - direct.value) / max(abs(direct.value), np.finfo(float).tiny)
    emit_report(report, config.output)

    if error > config.tolerance * max(1.0, abs(value)):
        logger.error("Assembled error estimate %.3e misses tolerance %.1e", error, config.tolerance)
        return EXIT_ACCURACY
    return EXIT_OK
