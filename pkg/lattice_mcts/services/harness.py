"""Seeded multi-trial execution and aggregation."""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from lattice_mcts.config import settings
from lattice_mcts.engine.lattice import optimal_steps
from lattice_mcts.engine.mcts import search_game
from lattice_mcts.engine.policy import baseline_search
from lattice_mcts.engine.target import sample_target
from lattice_mcts.errors import CapExhaustedError, UsageError
from lattice_mcts.models.schemas import (
    BaselineStrategy,
    ExperimentRow,
    GridConfig,
    MctsStrategy,
    SummaryStats,
    TargetDistribution,
    TrialRecord,
)
from lattice_mcts.util.timing import timer

logger = logging.getLogger(__name__)

AnyStrategy = Union[MctsStrategy, BaselineStrategy]

Z_95 = 1.96


def trial_seed(base_seed: int, trial: int) -> int:
    """64-bit seed of trial `trial`, derived from (base_seed, trial) only."""
    state = np.random.SeedSequence([base_seed, trial]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def trial_streams(seed: int) -> Tuple[np.random.Generator, np.random.Generator]:
    """Independent (target, search) random streams of one trial."""
    target_seq, search_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(target_seq), np.random.default_rng(search_seq)


def play_trial(
    strategy: AnyStrategy,
    dist: TargetDistribution,
    cfg: GridConfig,
    trial: int,
    base_seed: int,
) -> TrialRecord:
    """
    Play trial `trial` of a batch.

    The real target comes from the trial's target stream, so every strategy run
    with the same base_seed faces the same target sequence.
    """
    seed = trial_seed(base_seed, trial)
    target_rng, search_rng = trial_streams(seed)
    target = sample_target(dist, target_rng)

    if isinstance(strategy, MctsStrategy):
        record = search_game(dist, cfg, strategy.config, search_rng, target=target)
        return record.model_copy(update={"trial": trial, "seed": seed, "strategy": strategy.name})

    capped = False
    with timer(f"{strategy.name} trial {trial}") as elapsed:
        try:
            steps = baseline_search(strategy.policy, target, cfg, search_rng)
        except CapExhaustedError as e:
            steps = e.steps
            capped = True
    return TrialRecord(
        trial=trial,
        strategy=strategy.name,
        seed=seed,
        target=target,
        steps_taken=steps,
        optimal_steps=optimal_steps(target, cfg),
        wall_ms=elapsed.ms,
        capped=capped,
    )


def _play(task: Tuple[AnyStrategy, TargetDistribution, GridConfig, int, int]) -> TrialRecord:
    return play_trial(*task)


def run_trials(
    strategy: AnyStrategy,
    dist: TargetDistribution,
    cfg: GridConfig,
    trials: int,
    base_seed: int,
    workers: Optional[int] = None,
) -> List[TrialRecord]:
    """
    Run a batch of independent trials.

    Args:
        strategy: MCTS or baseline strategy
        dist: Target distribution
        cfg: Grid configuration
        trials: Number of trials, at least 1
        base_seed: Batch seed; trial i is seeded from (base_seed, i)
        workers: Worker processes; defaults to settings.workers

    Returns:
        Records in trial order. Capped trials are flagged, never dropped.
    """
    if trials < 1:
        raise UsageError("trials must be at least 1")
    workers = workers or settings.workers
    tasks = [(strategy, dist, cfg, i, base_seed) for i in range(trials)]
    if workers <= 1 or trials == 1:
        records = [_play(task) for task in tasks]
    else:
        chunksize = max(1, trials // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_play, tasks, chunksize=chunksize))
    capped = sum(r.capped for r in records)
    if capped:
        logger.warning("%s: %d of %d trials capped", strategy.name, capped, trials)
    return records


def summarize(records: Sequence[TrialRecord]) -> SummaryStats:
    """
    Aggregate records into both ASOO readings with a normal-approximation CI.

    Raises:
        UsageError: If fewer than two records are given
    """
    n = len(records)
    if n < 2:
        raise UsageError("summarize needs at least two records")
    steps = np.array([r.steps_taken for r in records], dtype=np.float64)
    optimal = np.array([r.optimal_steps for r in records], dtype=np.float64)
    excess = steps - optimal
    ratio = steps / np.maximum(optimal, 1.0)
    std = float(excess.std(ddof=1))
    q1, median, q3 = np.percentile(excess, [25, 50, 75])
    mean_steps = float(steps.mean())
    mean_optimal = float(optimal.mean())
    return SummaryStats(
        n=n,
        mean_steps=mean_steps,
        mean_optimal=mean_optimal,
        mean_excess=mean_steps - mean_optimal,
        mean_ratio=float(ratio.mean()),
        std=std,
        ci95_half_width=Z_95 * std / math.sqrt(n),
        q1=float(q1),
        median=float(median),
        q3=float(q3),
        capped_count=sum(r.capped for r in records),
    )


def make_row(
    experiment: str,
    strategy: AnyStrategy,
    cfg: GridConfig,
    dist: TargetDistribution,
    summary: SummaryStats,
    base_seed: int,
    gap: Optional[float] = None,
) -> ExperimentRow:
    loops = time_ms = None
    if isinstance(strategy, MctsStrategy):
        loops = strategy.config.loops
        time_ms = strategy.config.time_budget_ms
    return ExperimentRow(
        experiment=experiment,
        strategy=strategy.name,
        N=cfg.side_length,
        sigma=dist.sigma_label,
        loops=loops,
        time_ms=time_ms,
        trials=summary.n,
        mean_excess=summary.mean_excess,
        mean_ratio=summary.mean_ratio,
        std=summary.std,
        ci95=summary.ci95_half_width,
        q1=summary.q1,
        median=summary.median,
        q3=summary.q3,
        capped_count=summary.capped_count,
        base_seed=base_seed,
        mean_steps=summary.mean_steps,
        gap=gap,
    )


def run_cell(
    experiment: str,
    strategy: AnyStrategy,
    dist: TargetDistribution,
    cfg: GridConfig,
    trials: int,
    base_seed: int,
    workers: Optional[int] = None,
) -> Tuple[List[TrialRecord], ExperimentRow]:
    """Run and summarize one (experiment, strategy, distribution) cell."""
    with timer(f"{experiment} {strategy.name}") as elapsed:
        records = run_trials(strategy, dist, cfg, trials, base_seed, workers)
        row = make_row(experiment, strategy, cfg, dist, summarize(records), base_seed)
    logger.info(
        "%s %s N=%d sigma=%s: mean_excess=%.2f ci95=%.2f (%.1fs)",
        experiment,
        strategy.name,
        cfg.side_length,
        row.sigma,
        row.mean_excess,
        row.ci95,
        elapsed.seconds,
    )
    return records, row
