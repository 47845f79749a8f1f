"""
Pilot runs behind the statistical thresholds of tests/test_acceptance.py.

`compare` runs the delta and uniform comparisons at the given size and prints
each strategy's mean excess, its CI half-width and the paired one-sided p-value
against MCTS-RW. `acceptance` prints the statistic each slow acceptance test
asserts on, at the same sizes and seeds, so a threshold change can be checked
against measured values first.
"""
import math
import sys

import numpy as np

from lattice_mcts.engine.mcts import StatTable, select_move
from lattice_mcts.main import configure_logging
from lattice_mcts.models.schemas import (
    BaselineStrategy,
    Direction,
    GridConfig,
    MctsConfig,
    MctsStrategy,
    PolicyKind,
    Position,
    RolloutPolicy,
    TargetDistribution,
)
from lattice_mcts.services.experiments import (
    centre_delta,
    compared_strategies,
    experiment_budget_sweep,
    experiment_gaussian_sweep,
    experiment_nsarw_convergence,
)
from lattice_mcts.services.harness import run_cell, run_trials
from lattice_mcts.util.stats import paired_less, spearman

GAME_LOOPS = 100


def compare(n: int, trials: int, loops: int, workers: int) -> None:
    cfg = GridConfig(side_length=n, vision_radius=1)
    strategies = compared_strategies(MctsConfig(loops=loops))
    for name, dist in (("delta", centre_delta(cfg)), ("uniform", TargetDistribution.uniform(n))):
        print(f"\n=== {name}, N={n}, trials={trials}, loops={loops} ===")
        results = [run_cell(name, s, dist, cfg, trials, base_seed=0, workers=workers) for s in strategies]
        reference = [r.excess for r in results[0][0]]
        for records, row in results:
            p = paired_less(reference, [r.excess for r in records]) if records is not results[0][0] else float("nan")
            print(f"  {row.strategy:8s} excess {row.mean_excess:9.2f} +- {row.ci95:7.2f}  p(MCTS-RW < this) {p:.2e}")


def first_decision_rates() -> None:
    cfg = GridConfig(side_length=11)
    dist = TargetDistribution.delta(Position(x=4, y=3), 11)
    optimal = {Direction.RIGHT, Direction.UP}
    for loops in (100, 1000, 10_000):
        rng = np.random.default_rng(loops)
        moves = [select_move(cfg.start, StatTable(11), dist, cfg, MctsConfig(loops=loops), rng) for _ in range(200)]
        print(f"  first decision, loops={loops}: optimal rate {sum(m in optimal for m in moves) / 200:.3f}")


def acceptance(workers: int) -> None:
    print("=== first decisions, N=11, distance 5 ===")
    first_decision_rates()

    print("=== MCTS-RW / NSARW gap, uniform targets ===")
    rows = experiment_nsarw_convergence([11, 21, 41], 300, base_seed=3, base=MctsConfig(loops=GAME_LOOPS), workers=workers)
    for row in rows:
        if row.gap is not None:
            print(f"  N={row.N}: gap {row.gap:.3f}")

    print("=== N=40 uniform, paired against MCTS-RW ===")
    cfg = GridConfig(side_length=40, vision_radius=1)
    dist = TargetDistribution.uniform(40)
    mcts = run_trials(MctsStrategy(config=MctsConfig(loops=GAME_LOOPS)), dist, cfg, 300, 6, workers)
    for kind in (PolicyKind.RW, PolicyKind.LEVY):
        baseline = run_trials(BaselineStrategy(policy=RolloutPolicy(kind=kind)), dist, cfg, 300, 6, workers)
        p = paired_less([r.steps_taken for r in mcts], [r.steps_taken for r in baseline])
        print(f"  vs {kind.value}: p {p:.2e}")

    print("=== sigma sweep, N=40 ===")
    sigmas = [0.0, 2.0, 5.0, 10.0, math.inf]
    rows = experiment_gaussian_sweep(
        cfg, sigmas, [MctsStrategy(config=MctsConfig(loops=GAME_LOOPS))], 300, base_seed=7, workers=workers
    )
    for row in rows:
        print(f"  sigma={row.sigma}: excess {row.mean_excess:.2f} +- {row.ci95:.2f}")
    print(f"  spearman {spearman(range(len(sigmas)), [r.mean_excess for r in rows]):.3f}")

    print("=== loop budget, N=20 delta ===")
    cfg = GridConfig(side_length=20, vision_radius=1)
    rows = experiment_budget_sweep(
        cfg, [10, 100, 1000], 300, base_seed=4, dist=centre_delta(cfg), policies=[RolloutPolicy()], workers=workers
    )
    for row in rows:
        print(f"  loops={row.loops}: excess {row.mean_excess:.2f}")


if __name__ == "__main__":
    if len(sys.argv) < 2 or sys.argv[1] not in ("compare", "acceptance"):
        print("Usage: python scripts/pilot_thresholds.py compare <N> <trials> [loops] [workers]")
        print("       python scripts/pilot_thresholds.py acceptance [workers]")
        sys.exit(1)

    configure_logging("INFO")
    args = [int(a) for a in sys.argv[2:]]
    if sys.argv[1] == "acceptance":
        acceptance(args[0] if args else 1)
    else:
        if len(args) < 2:
            print("compare needs <N> <trials>")
            sys.exit(1)
        n, trials = args[0], args[1]
        loops = args[2] if len(args) > 2 else 1000
        workers = args[3] if len(args) > 3 else 1
        compare(n, trials, loops, workers)
