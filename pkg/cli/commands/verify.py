"""
verify - seeded verification suites with a JSON report per check
"""

import pandas as pd

from models.data_models import RunConfig
from services.formatting_service import emit_report, write_csv
from services.validation_service import SUITES
from services.verification_suites import run_suite
from . import EXIT_ACCURACY, EXIT_OK


def add_parser(subparsers):
    parser = subparsers.add_parser('verify', help="run a verification suite")
    parser.add_argument('--suite', choices=SUITES, help="suite name (default all)")
    parser.add_argument('--seed', type=int, help="seed for the randomized samples")
    parser.add_argument('--aplus', type=float)
    parser.add_argument('--aminus', type=float)
    parser.add_argument('--b', help="coupling used by the parameter-driven suites")
    parser.set_defaults(handler=run)
    return parser


def run(config: RunConfig, args) -> int:
    report = run_suite(config.suite, config)
    emit_report(report, config.output)
    if config.csv:
        write_csv(pd.DataFrame(report['checks']), config.csv)
    return EXIT_OK if report['pass'] else EXIT_ACCURACY
