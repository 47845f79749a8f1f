"""
Full-scale statistical acceptance runs. Select with `pytest -m slow`.

Game-level runs go through the worker pool; set LATTICE_MCTS_WORKERS to use
more than one process. Measured values for the thresholds below are printed by
`python scripts/pilot_thresholds.py acceptance`.
"""
import math

import numpy as np
import pytest

from lattice_mcts.engine.lattice import step
from lattice_mcts.engine.mcts import StatTable, select_move
from lattice_mcts.engine.policy import levy_length, levy_pmf, rollout
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
    experiment_budget_sweep,
    experiment_gaussian_sweep,
    experiment_nsarw_convergence,
)
from lattice_mcts.services.harness import run_cell, run_trials
from lattice_mcts.util.oracles import hitting_times
from lattice_mcts.util.stats import (
    chi_square_uniform,
    paired_less,
    power_law_mle,
    spearman,
    total_variation,
    welch_less,
)

pytestmark = pytest.mark.slow

# Per-decision loop budget of the game-level runs on N >= 40
GAME_LOOPS = 100

RW = RolloutPolicy(kind=PolicyKind.RW)
LEVY = RolloutPolicy(kind=PolicyKind.LEVY)
NSARW = RolloutPolicy(kind=PolicyKind.NSARW)


def _left_of(d: Direction) -> Direction:
    return Direction((-d.dy, d.dx))


@pytest.mark.parametrize("target", [(0, 1), (1, 1), (1, 2), (2, 2)])
def test_random_walk_hitting_time_per_distance(target):
    """Test RW rollouts on N=5 against the exact solve at 10^5 walks per start distance (2%)."""
    cfg = GridConfig(side_length=5)
    goal = Position(x=target[0] + 1, y=target[1] + 1)
    rng = np.random.default_rng(2718)
    steps = [rollout(cfg.start, goal, RW, cfg, rng).steps for _ in range(100_000)]
    assert np.mean(steps) == pytest.approx(hitting_times(5, target)[0, 0], rel=0.02)


def test_levy_lengths_full_scale():
    """Test 10^6 jump lengths at mu=2, l_max=40: total variation <= 0.005 and MLE exponent in [1.85, 2.15]."""
    rng = np.random.default_rng(1_000_003)
    lengths = np.array([levy_length(2.0, 40, rng) for _ in range(1_000_000)])
    empirical = np.bincount(lengths, minlength=41)[1:] / lengths.size
    assert total_variation(empirical, levy_pmf(2.0, 40)) <= 0.005
    assert 1.85 <= power_law_mle(lengths, 40) <= 2.15


def test_closer_neighbour_scores_higher():
    """Test that at distance 5 on N=11 the neighbour that closes in has the higher average reward."""
    cfg = GridConfig(side_length=11)
    target = Position(x=4, y=3)
    dist = TargetDistribution.delta(target, 11)
    stats = StatTable(11)
    select_move(cfg.start, stats, dist, cfg, MctsConfig(loops=10_000), np.random.default_rng(5))
    closer = stats.average_reward(Position(x=2, y=1))
    farther = stats.average_reward(Position(x=11, y=1))
    assert closer > farther


def test_first_decision_heads_for_a_known_target():
    """
    Test the optimal-direction rate of 200 fresh first decisions at distance 5 on N=11.

    The rate must be at least 0.80 at 10^3 loops and 0.95 at 10^4, and must not
    drop as the budget grows. Pilot: 1.000 at both 10^2 and 10^3 loops.
    """
    cfg = GridConfig(side_length=11)
    dist = TargetDistribution.delta(Position(x=4, y=3), 11)
    optimal = {Direction.RIGHT, Direction.UP}
    rates = {}
    for loops in (100, 1000, 10_000):
        rng = np.random.default_rng(loops)
        mcfg = MctsConfig(loops=loops)
        moves = [select_move(cfg.start, StatTable(11), dist, cfg, mcfg, rng) for _ in range(200)]
        rates[loops] = sum(m in optimal for m in moves) / len(moves)
    assert rates[1000] >= 0.80
    assert rates[10_000] >= 0.95
    assert rates[100] <= rates[1000] <= rates[10_000]


def test_fresh_decisions_do_not_favour_a_turn():
    """Test on N=81 with 400 loops and fresh statistics that straight, left and right are equally likely."""
    cfg = GridConfig(side_length=81)
    dist = TargetDistribution.uniform(81)
    mcfg = MctsConfig(loops=400)
    rng = np.random.default_rng(81)
    pos = cfg.start
    came = select_move(pos, StatTable(81), dist, cfg, mcfg, rng)
    pos = step(pos, came, cfg)
    relative = {"straight": 0, "left": 0, "right": 0}
    for _ in range(1000):
        move = select_move(pos, StatTable(81), dist, cfg, mcfg, rng)
        if move is came:
            relative["straight"] += 1
        elif move is _left_of(came):
            relative["left"] += 1
        elif move is _left_of(came).opposite:
            relative["right"] += 1
        pos = step(pos, move, cfg)
        came = move
    assert sum(relative.values()) > 600
    assert chi_square_uniform(list(relative.values())) > 0.01


def test_mcts_gap_to_nsarw_shrinks_with_grid_size():
    """Test that the relative MCTS-RW / NSARW gap on uniform targets does not grow over N = 11, 21, 41."""
    rows = experiment_nsarw_convergence([11, 21, 41], 300, base_seed=3, base=MctsConfig(loops=GAME_LOOPS))
    gaps = [r.gap for r in rows if r.gap is not None]
    assert len(gaps) == 3
    assert gaps[0] >= gaps[1] >= gaps[2]


def test_mcts_beats_random_walk_and_levy_flight():
    """Test MCTS-RW against the RW and LFS searchers on 300 paired uniform targets, N=40, r_v=1."""
    cfg = GridConfig(side_length=40, vision_radius=1)
    dist = TargetDistribution.uniform(40)
    mcts = run_trials(MctsStrategy(config=MctsConfig(loops=GAME_LOOPS)), dist, cfg, 300, base_seed=6)
    mcts_steps = [r.steps_taken for r in mcts]
    for policy in (RW, LEVY):
        baseline = run_trials(BaselineStrategy(policy=policy), dist, cfg, 300, base_seed=6)
        assert [r.target for r in baseline] == [r.target for r in mcts]
        assert paired_less(mcts_steps, [r.steps_taken for r in baseline]) < 0.01


def test_nsarw_beats_random_walk():
    """Test that the NSARW searcher needs fewer steps than the RW searcher on N=40 uniform targets."""
    cfg = GridConfig(side_length=40, vision_radius=1)
    dist = TargetDistribution.uniform(40)
    nsarw = run_trials(BaselineStrategy(policy=NSARW), dist, cfg, 300, base_seed=8)
    rw = run_trials(BaselineStrategy(policy=RW), dist, cfg, 300, base_seed=9)
    assert welch_less([r.steps_taken for r in nsarw], [r.steps_taken for r in rw]) < 0.01


def test_excess_grows_with_sigma():
    """
    Test the sigma sweep for MCTS-RW on N=40.

    Mean excess rank-correlates with sigma (at least 0.9) and the uniform end's
    interval overlaps the NSARW searcher's interval.
    """
    cfg = GridConfig(side_length=40, vision_radius=1)
    sigmas = [0.0, 2.0, 5.0, 10.0, math.inf]
    mcts = MctsStrategy(config=MctsConfig(loops=GAME_LOOPS))
    rows = experiment_gaussian_sweep(cfg, sigmas, [mcts], 300, base_seed=7)
    excess = [r.mean_excess for r in rows]
    ranks = list(range(len(sigmas)))
    assert spearman(ranks, excess) >= 0.9

    _, nsarw = run_cell("gauss-sweep", BaselineStrategy(policy=NSARW), TargetDistribution.uniform(40), cfg, 300, 7)
    uniform = rows[-1]
    assert uniform.mean_excess - uniform.ci95 <= nsarw.mean_excess + nsarw.ci95
    assert nsarw.mean_excess - nsarw.ci95 <= uniform.mean_excess + uniform.ci95


def test_excess_falls_with_loop_budget():
    """Test that on a known target (N=20) mean excess strictly falls over 10, 100 and 1000 loops."""
    cfg = GridConfig(side_length=20, vision_radius=1)
    rows = experiment_budget_sweep(
        cfg,
        [10, 100, 1000],
        300,
        base_seed=4,
        mode="loops",
        dist=centre_delta(cfg),
        policies=[RW],
    )
    excess = [r.mean_excess for r in rows]
    assert excess[0] > excess[1] > excess[2]
