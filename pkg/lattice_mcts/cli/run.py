"""`run` subcommand: one strategy against one target distribution."""
import argparse
import logging
import sys

from lattice_mcts.cli.options import add_common_arguments, flatten, gather, resolve
from lattice_mcts.services.harness import run_cell
from lattice_mcts.services.output import (
    provenance_lines,
    sibling,
    write_json,
    write_records_csv,
    write_rows_csv,
)

logger = logging.getLogger(__name__)

EXIT_CAPPED = 4


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "run",
        help="run one experiment cell",
        description="Run one strategy against one target distribution. grid.size and target.kind are required.",
        allow_abbrev=False,
    )
    add_common_arguments(parser)
    parser.add_argument("--strict", action="store_true", help="exit 4 if any trial hits its step cap")
    parser.set_defaults(handler=cmd_run)


def cmd_run(args: argparse.Namespace) -> int:
    """
    Execute one cell and write its records, summary row and JSON mirror.

    Without an output path the record table and the summary table go to stdout.
    """
    run = resolve(gather(args))
    flat = flatten(run)
    header = provenance_lines(flat)
    records, row = run_cell(
        "run", run.build_strategy(), run.target, run.grid, run.trials, run.base_seed, run.workers
    )

    if run.output is None:
        write_records_csv(sys.stdout, records, header)
        write_rows_csv(sys.stdout, [row], [])
    else:
        write_records_csv(run.output, records, header)
        write_rows_csv(sibling(run.output, ".summary.csv"), [row], header)
        write_json(sibling(run.output, ".json"), flat, [row], records)
        logger.info("Wrote %d records to %s", len(records), run.output)

    if getattr(args, "strict", False) and row.capped_count:
        logger.error("%d of %d trials hit their step cap", row.capped_count, row.trials)
        return EXIT_CAPPED
    return 0
