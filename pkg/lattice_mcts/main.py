"""Command-line entry point."""
import argparse
import logging
import sys
from typing import List, Optional

from lattice_mcts.cli import figure, run
from lattice_mcts.config import settings
from lattice_mcts.errors import ConfigError, UsageError

logger = logging.getLogger("lattice_mcts")

EXIT_CONFIG = 2
EXIT_IO = 3


def configure_logging(level: str) -> None:
    """Single stderr handler for the package logger."""
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    logger.handlers[:] = [handler]
    logger.setLevel(level.upper())
    logger.propagate = False


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lattice-mcts",
        description="MCTS and baseline searchers for a single target on a periodic lattice",
        allow_abbrev=False,
    )
    parser.add_argument("--log-level", default=settings.log_level, help="(default: %(default)s)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Subcommands
    run.register(subparsers)
    figure.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse already printed usage; bad flags are config errors
        return EXIT_CONFIG if e.code else 0

    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except (ConfigError, UsageError) as e:
        logger.error("%s", e)
        return EXIT_CONFIG
    except OSError as e:
        logger.error("I/O error: %s", e)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
