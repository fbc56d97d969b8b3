"""
rcm-lab command-line entry point.

    python app.py eval --n 2 --x 0.3 -0.2 --y 1.0 -1.0 --b 0.5
    python app.py verify --suite gamma --seed 7
    python app.py scan --n 2 --b 0.5 --csv scan.csv

Exit codes: 0 ok, 1 usage or malformed config, 2 precondition, 3 accuracy.
"""

import argparse
import logging
import sys

from cli.commands import EXIT_ACCURACY, EXIT_PRECONDITION, EXIT_USAGE
from cli.commands import bounds, evaluate, lemma, scan, verify
from models.errors import (
    ContinuationError, ContourError, DegenerateFitError, DimensionError, InputError, ParameterError,
    PreconditionError, QuadratureError, SingularityError, UnknownClaimError,
)
from services.config_manager import ConfigManager
from services.validation_service import ValidationError

logger = logging.getLogger("rcm_lab")

COMMANDS = (evaluate, verify, scan, lemma, bounds)


class CliParser(argparse.ArgumentParser):
    """Usage errors become ValidationError so they share exit code 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog="rcm-lab", description="Hyperbolic relativistic Calogero-Moser eigenfunction lab")
    parser.add_argument('--config', help="JSON config file; flags override its fields")
    parser.add_argument('--threads', type=int, help="worker threads for quadrature (default 1)")
    parser.add_argument('--output', help="write the JSON report here instead of stdout")
    parser.add_argument('--csv', help="write the tabular report here")
    parser.add_argument('-v', '--verbose', action='count', default=0, help="-v info, -vv debug")
    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True
    for command in COMMANDS:
        command.add_parser(subparsers)
    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ValidationError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE

    configure_logging(args.verbose)
    try:
        config = ConfigManager.build_run_config(args)
        return args.handler(config, args)
    except (ValidationError, UnknownClaimError, DimensionError, InputError) as e:
        logger.error("Invalid input: %s", e)
        return EXIT_USAGE
    except (PreconditionError, ParameterError, SingularityError, ContourError, ContinuationError) as e:
        logger.error("Precondition failed: %s", e)
        return EXIT_PRECONDITION
    except DegenerateFitError as e:
        logger.error("Fit failed: %s", e)
        return EXIT_ACCURACY
    except QuadratureError as e:
        logger.error("Quadrature failed: %s", e)
        return EXIT_ACCURACY


if __name__ == "__main__":
    sys.exit(main())
