"""
bounds - fit one envelope claim, or run the polynomial growth experiments
"""

import logging

import pandas as pd

from models.bounds_lab import fit_envelope, growth_experiments, raw_samples, registered_claims
from models.data_models import RunConfig
from services.formatting_service import emit_report, write_csv
from . import EXIT_ACCURACY, EXIT_OK, add_model_arguments, build_context, build_evaluator

logger = logging.getLogger(__name__)

GROWTH_CLAIM = "polynomial_growth"


def add_parser(subparsers):
    parser = subparsers.add_parser('bounds', help="envelope constants and integral growth rates")
    add_model_arguments(parser)
    parser.add_argument('--claim', choices=registered_claims() + [GROWTH_CLAIM],
                        help="claim to fit (all envelope claims when omitted)")
    parser.set_defaults(handler=run)
    return parser


def _growth_report(config: RunConfig):
    fits = growth_experiments()
    if config.csv:
        frames = []
        for fit in fits:
            frame = fit.samples.copy()
            frame.insert(0, 'grid', fit.sample_grid)
            frames.append(frame)
        write_csv(pd.concat(frames, ignore_index=True), config.csv)
    return [fit.to_dict() for fit in fits]


def run(config: RunConfig, args) -> int:
    if config.claim == GROWTH_CLAIM:
        fits = _growth_report(config)
    else:
        ctx = build_context(config)
        evaluator = build_evaluator(config, ctx)
        claims = [config.claim] if config.claim else registered_claims()
        keep = bool(config.csv) and len(claims) == 1
        results = [fit_envelope(claim, ctx, evaluator, keep_samples=keep) for claim in claims]
        if keep:
            write_csv(raw_samples(results[0]), config.csv)
        elif config.csv:
            logger.warning("Raw samples are written for a single --claim only")
        fits = [fit.to_dict() for fit in results]

    passed = all(fit['pass'] for fit in fits)
    emit_report({'fits': fits, 'pass': passed}, config.output)
    return EXIT_OK if passed else EXIT_ACCURACY
