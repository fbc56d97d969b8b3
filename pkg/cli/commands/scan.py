"""
scan - remainder |E_N - E_as| along a ray of rapidities and its fitted decay rate
"""

import logging

import numpy as np

from models.asymptotics import default_window, fit_decay_frame, scan_ray
from models.data_models import Representation, RunConfig
from models.errors import PreconditionError
from models.params import min_rapidity_gap, ray_rapidities
from services.formatting_service import emit_report, write_csv
from . import EXIT_OK, add_model_arguments, build_context, build_evaluator, default_positions

logger = logging.getLogger(__name__)


def add_parser(subparsers):
    parser = subparsers.add_parser('scan', help="scan the asymptotic remainder along y(t)")
    add_model_arguments(parser)
    parser.add_argument('--t', nargs='+', type=float, help="ray parameters (strictly increasing)")
    parser.add_argument('--representation', choices=[r.value for r in Representation],
                        help="force a route for E_N (automatic when omitted)")
    parser.set_defaults(handler=run)
    return parser


def run(config: RunConfig, args) -> int:
    ctx = build_context(config)
    evaluator = build_evaluator(config, ctx)
    x = np.asarray(config.x, dtype=complex) if config.x else default_positions(config.n)
    t_values = np.asarray(config.t_values) if config.t_values else default_window(ctx)
    gaps = [min_rapidity_gap(ray_rapidities(x.size, t)) for t in t_values]
    if x.size > 1 and np.any(np.diff(gaps) <= 0):
        raise PreconditionError("d_N(y(t)) must increase strictly along the sampled ray")
    # the command line flag, not the config default, decides whether the route is forced
    representation = Representation(args.representation) if getattr(args, 'representation', None) else None

    frame = scan_ray(evaluator, x, t_values, representation=representation, threads=config.threads)
    if config.csv:
        write_csv(frame, config.csv)
    threshold = ctx.alpha * ctx.params.a_s / 2.0
    fit = fit_decay_frame(frame, threshold=threshold)

    report = {
        'n': int(x.size),
        'x': x,
        'samples': len(frame),
        **fit.summary(),
    }
    emit_report(report, config.output)
    return EXIT_OK
