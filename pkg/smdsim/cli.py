"""Command line entry point of smdsim.

Subcommands `smd`, `zo`, `online`, `traffic` and `bench` run the
experiments of smdsim.experiments. Exit status is 0 on success, 1 when a
run aborted or a requested check failed and 2 for an invalid
configuration.

"""

import argparse
import logging
import sys

from .config import ERR_FIELD, ExperimentConfig, GAMES, TRAFFIC_ACTIONS
from .errors import ConfigurationError, DomainError, InputError, \
    ProtocolError, RunAborted
from .experiments import RUNNERS

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def _int_list(text):
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            "expected a comma separated list of integers, got '{}'"
            .format(text))


def _configure_logging(level):
    if not logging.getLogger().handlers:
        logging.basicConfig(
            level=getattr(logging, level),
            format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def _add_common(parser):
    parser.add_argument("--config", default=None,
                        help="JSON config file, overridden by flags")
    parser.add_argument("--log-level", default="INFO", choices=LOG_LEVELS)
    parser.add_argument("--output-dir")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--seeds", type=int, help="number of seeds")
    parser.add_argument("--stride", type=int, help="trace decimation")
    parser.add_argument("--workers", type=int,
                        help="threads for parallel trajectories")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="smdsim",
        description="Stochastic mirror descent, gradient-free and online "
                    "experiments and traffic equilibria.",
        argument_default=argparse.SUPPRESS)

    commands = parser.add_subparsers(dest="command")
    commands.required = True

    smd = commands.add_parser("smd", argument_default=argparse.SUPPRESS,
                              help="stochastic mirror descent")
    _add_common(smd)
    smd.add_argument("--problem")
    smd.add_argument("--n", type=int)
    smd.add_argument("--N", type=_int_list, help="iteration grid, e.g. "
                                                  "100,1000")
    smd.add_argument("--noise")
    smd.add_argument("--alpha", type=float)
    smd.add_argument("--delta", type=float)
    smd.add_argument("--mu", type=float)
    smd.add_argument("--parallel", action="store_true")
    smd.add_argument("--sigma", type=float)
    smd.add_argument("--eps", type=float)
    smd.add_argument("--replications", type=int)

    zo = commands.add_parser("zo", argument_default=argparse.SUPPRESS,
                             help="gradient-free mirror descent")
    _add_common(zo)
    zo.add_argument("--feedback")
    zo.add_argument("--problem")
    zo.add_argument("--dims", type=_int_list)
    zo.add_argument("--eps", type=float)
    zo.add_argument("--delta", type=float)
    zo.add_argument("--noise-level", type=float)
    zo.add_argument("--inner-tau2", "--paper-literal", dest="inner_tau2",
                    action="store_true",
                    help="second double-smoothing probe at x + tau2 e1")
    zo.add_argument("--pairs", type=int)
    zo.add_argument("--max-calls", type=int)
    zo.add_argument("--directions")

    online = commands.add_parser("online", argument_default=argparse.SUPPRESS,
                                 help="exp-weights against a loss stream")
    _add_common(online)
    online.add_argument("game", nargs="?", help=", ".join(GAMES))
    online.add_argument("--policy")
    online.add_argument("--N", type=int)
    online.add_argument("--mode")

    traffic = commands.add_parser("traffic",
                                  argument_default=argparse.SUPPRESS,
                                  help="traffic equilibria")
    _add_common(traffic)
    traffic.add_argument("action", nargs="?",
                         help=", ".join(TRAFFIC_ACTIONS))
    traffic.add_argument("--network",
                         help="shipped instance name or JSON file")
    traffic.add_argument("--gamma", type=float)
    traffic.add_argument("--N", type=_int_list)
    traffic.add_argument("--tol", type=float)
    traffic.add_argument("--max-iters", type=int)
    traffic.add_argument("--method")
    traffic.add_argument("--lam", type=float)
    traffic.add_argument("--horizon", type=int)
    traffic.add_argument("--agents", type=int)
    traffic.add_argument("--mode")

    bench = commands.add_parser("bench", argument_default=argparse.SUPPRESS,
                                help="run the acceptance suite")
    _add_common(bench)
    bench.add_argument("--quick", action="store_true")

    return parser


def _invalid(error, field):
    message = str(error)
    if not message.startswith("invalid-config"):
        message = ERR_FIELD.format(field or "config", message)
    print(message, file=sys.stderr)
    return EXIT_INVALID


def main(argv=None):
    """CLI entry point."""

    args = vars(_build_parser().parse_args(argv))
    command = args.pop("command")
    path = args.pop("config", None)

    _configure_logging(args.pop("log_level", "INFO"))

    try:
        config = ExperimentConfig.from_sources(command, path, args)
        outcome = RUNNERS[command](config)
    except ConfigurationError as error:
        return _invalid(error, error.field)
    except InputError as error:
        return _invalid(error, "input")
    except (RunAborted, ProtocolError, DomainError) as error:
        logger.error("%s aborted: %s", command, error)
        return EXIT_FAILED

    if not outcome.passed:
        logger.error("%s: check failed, see %s", command, config.output_dir)
        return EXIT_FAILED

    logger.info("%s: done, output in %s", command, config.output_dir)
    return EXIT_OK
