"""`figure` and `histogram` subcommands: experiment presets with figure defaults."""
import argparse
import logging
import math
import sys
from typing import Dict, List, Optional

import numpy as np

from lattice_mcts.cli.options import add_common_arguments, flatten, gather, resolve
from lattice_mcts.config import settings
from lattice_mcts.engine.policy import VisitGrid, baseline_search
from lattice_mcts.engine.target import histogram, sample_target
from lattice_mcts.errors import CapExhaustedError, UsageError
from lattice_mcts.models.schemas import (
    ExperimentRow,
    GridConfig,
    PolicyKind,
    RunConfig,
    TargetDistribution,
)
from lattice_mcts.services.experiments import (
    DEFAULT_GRID_SIZES,
    DEFAULT_LOOP_BUDGETS,
    DEFAULT_SIGMAS,
    DEFAULT_TIME_BUDGETS_MS,
    centre_delta,
    compared_strategies,
    experiment_budget_sweep,
    experiment_compare,
    experiment_gaussian_sweep,
    experiment_nsarw_convergence,
)
from lattice_mcts.services.harness import trial_seed, trial_streams
from lattice_mcts.services.output import (
    provenance_lines,
    sibling,
    write_json,
    write_matrix_csv,
    write_rows_csv,
)

logger = logging.getLogger(__name__)

FIGURES = [
    "gauss-sweep",
    "delta-compare",
    "budget-loops",
    "budget-time",
    "uniform-compare",
    "nsarw-convergence",
    "target-histogram",
    "nsarw-visits",
]

# Figure defaults; anything here can still be overridden by --config or flags
PRESET = {
    "grid.size": settings.figure_grid,
    "grid.vision": 1,
    "run.trials": settings.figure_trials,
    "mcts.loops": settings.figure_loops,
}

HISTOGRAM_SIGMA = 5.0
EXIT_CAPPED = 4


def _add_figure_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--scale",
        type=float,
        default=1.0,
        help="multiply trials (at least 2) and histogram draws, for desk runs (default: 1.0)",
    )
    parser.add_argument(
        "--sigma",
        type=float,
        action="append",
        help="histogram sigma (inf for uniform); repeat to choose the gauss-sweep widths",
    )
    parser.add_argument("--budget", type=float, action="append", help="budget-loops / budget-time values; repeatable")
    parser.add_argument("--size", type=int, action="append", help="nsarw-convergence grid sizes; repeatable")
    parser.add_argument("--strict", action="store_true", help="exit 4 if any trial hits its step cap")
    add_common_arguments(parser, PRESET)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "figure",
        help="reproduce one experiment figure",
        description="Run an experiment preset (N=40, 1000 trials, r_v=1, c=sqrt(2), 1000 loops per decision).",
        allow_abbrev=False,
    )
    parser.add_argument("figure", choices=FIGURES)
    _add_figure_arguments(parser)
    parser.set_defaults(handler=cmd_figure)

    alias = subparsers.add_parser(
        "histogram",
        help="alias of `figure target-histogram`",
        description="Histogram of sampled target cells.",
        allow_abbrev=False,
    )
    _add_figure_arguments(alias)
    alias.set_defaults(handler=cmd_figure, figure="target-histogram")


def _scaled(count: int, scale: float, floor: int) -> int:
    return max(floor, int(round(count * scale)))


def _default_target(name: str, cfg: GridConfig, sigmas: Optional[List[float]]) -> TargetDistribution:
    n = cfg.side_length
    if name == "target-histogram":
        return TargetDistribution.for_sigma(sigmas[-1] if sigmas else HISTOGRAM_SIGMA, n)
    if name in ("delta-compare", "budget-loops", "budget-time"):
        return centre_delta(cfg)
    return TargetDistribution.uniform(n)


def _resolve(args: argparse.Namespace) -> RunConfig:
    raw = gather(args, PRESET)
    target_given = any(k.startswith("target.") for k in raw)
    if not target_given:
        raw["target.kind"] = ("uniform", None)
    run = resolve(raw, require=())
    updates: Dict[str, object] = {"trials": _scaled(run.trials, args.scale, 2)}
    if args.figure == "target-histogram" and args.sigma:
        updates["target"] = _default_target(args.figure, run.grid, args.sigma)
    elif not target_given:
        updates["target"] = _default_target(args.figure, run.grid, args.sigma)
    return run.model_copy(update=updates)


def _rows(name: str, run: RunConfig, args: argparse.Namespace) -> List[ExperimentRow]:
    cfg = run.grid
    strategies = compared_strategies(run.mcts, run.policy)
    if name == "gauss-sweep":
        sigmas = args.sigma or list(DEFAULT_SIGMAS)
        return experiment_gaussian_sweep(cfg, sigmas, strategies, run.trials, run.base_seed, run.workers)
    if name in ("delta-compare", "uniform-compare"):
        return experiment_compare(name, cfg, run.target, strategies, run.trials, run.base_seed, run.workers)
    if name in ("budget-loops", "budget-time"):
        mode = "loops" if name == "budget-loops" else "time"
        budgets = args.budget or list(DEFAULT_LOOP_BUDGETS if mode == "loops" else DEFAULT_TIME_BUDGETS_MS)
        policies = [run.policy.model_copy(update={"kind": k}) for k in (PolicyKind.RW, PolicyKind.LEVY)]
        return experiment_budget_sweep(
            cfg,
            budgets,
            run.trials,
            run.base_seed,
            mode=mode,
            dist=run.target,
            policies=policies,
            base=run.mcts,
            workers=run.workers,
        )
    sizes = args.size or list(DEFAULT_GRID_SIZES)
    return experiment_nsarw_convergence(
        sizes,
        run.trials,
        run.base_seed,
        base=run.mcts,
        vision_radius=cfg.vision_radius,
        workers=run.workers,
        policy=run.policy,
    )


def _matrix(name: str, run: RunConfig, args: argparse.Namespace) -> np.ndarray:
    target_rng, search_rng = trial_streams(trial_seed(run.base_seed, 0))
    if name == "target-histogram":
        draws = _scaled(settings.histogram_draws, args.scale, 1)
        return histogram(run.target, draws, target_rng)

    # One NSARW realization from the start until it detects a target drawn from the prior
    visits = VisitGrid(run.grid.side_length)
    target = sample_target(run.target, target_rng)
    policy = run.policy.model_copy(update={"kind": PolicyKind.NSARW})
    try:
        steps = baseline_search(policy, target, run.grid, search_rng, visits=visits)
        logger.info("NSARW found (%d, %d) after %d steps", target.x, target.y, steps)
    except CapExhaustedError as e:
        logger.warning("NSARW did not find (%d, %d) within %d steps", target.x, target.y, e.steps)
    return visits.counts


def cmd_figure(args: argparse.Namespace) -> int:
    """Run the named preset and write its CSV (and JSON mirror for experiment rows)."""
    if not (args.scale > 0 and math.isfinite(args.scale)):
        raise UsageError("--scale must be a positive number")
    name = args.figure
    run = _resolve(args)
    flat = flatten(run)
    header = provenance_lines(flat)
    out = run.output if run.output is not None else sys.stdout

    if name in ("target-histogram", "nsarw-visits"):
        write_matrix_csv(out, _matrix(name, run, args), header)
        return 0

    rows = _rows(name, run, args)
    write_rows_csv(out, rows, header)
    if run.output is not None:
        write_json(sibling(run.output, ".json"), flat, rows)
        logger.info("Wrote %d rows to %s", len(rows), run.output)

    capped = sum(r.capped_count for r in rows)
    if args.strict and capped:
        logger.error("%d trials hit their step cap", capped)
        return EXIT_CAPPED
    return 0
