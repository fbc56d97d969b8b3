"""
eval - one value of E_N, J_N or the centred J_N with its error estimate
"""

import logging

from models.asymptotics import evaluate_e
from models.data_models import Representation, RunConfig
from services.formatting_service import emit_report, fmt_complex, fmt_error
from services.validation_service import FUNCTIONS, RunConfigValidator
from . import EXIT_ACCURACY, EXIT_OK, add_model_arguments, accuracy_ok, build_evaluator, require_vectors

logger = logging.getLogger(__name__)


def add_parser(subparsers):
    parser = subparsers.add_parser('eval', help="evaluate E_N, J_N or J_alt at one configuration")
    add_model_arguments(parser)
    parser.add_argument('--function', choices=FUNCTIONS, help="E (default), J or J_alt")
    parser.add_argument('--representation', choices=[r.value for r in Representation],
                        help="route for E: direct, via_j or residue")
    parser.add_argument('--shift', type=float, help="contour shift r for the residue route")
    parser.set_defaults(handler=run)
    return parser


def run(config: RunConfig, args) -> int:
    x, y = require_vectors(config, 'eval')
    RunConfigValidator.check_preconditions(config)
    evaluator = build_evaluator(config)
    spec = evaluator.spec

    if config.function == 'J':
        result = evaluator.j(x, y, spec)
    elif config.function == 'J_alt':
        result = evaluator.j_centered(x, y, spec)
    else:
        representation = Representation(config.representation)
        if representation == Representation.RESIDUE:
            result = evaluate_e(evaluator, x, y, representation, r=config.shift, threads=config.threads)
        else:
            result = evaluator.e(x, y, representation, spec)

    logger.info("%s = %s +- %s", config.function, fmt_complex(result.value), fmt_error(result.error_estimate))
    report = result.to_dict()
    emit_report(report, config.output)
    if not accuracy_ok(result, config):
        logger.error("Error estimate %.3e misses tolerance %.1e", result.error_estimate, config.tolerance)
        return EXIT_ACCURACY
    return EXIT_OK
