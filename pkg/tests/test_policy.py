"""Tests for the walkers used as rollouts and baselines."""
import numpy as np
import pytest

from lattice_mcts.config import settings
from lattice_mcts.engine.lattice import neighbours, torus_l1
from lattice_mcts.engine.policy import (
    VisitGrid,
    baseline_search,
    levy_length,
    levy_pmf,
    nsarw_choose,
    rollout,
    trajectory,
)
from lattice_mcts.errors import CapExhaustedError
from lattice_mcts.models.schemas import DIRECTIONS, Direction, GridConfig, PolicyKind, Position, RolloutPolicy
from lattice_mcts.util.oracles import hitting_times
from lattice_mcts.util.stats import chi_square_uniform, power_law_mle, total_variation

RW = RolloutPolicy(kind=PolicyKind.RW)
LEVY = RolloutPolicy(kind=PolicyKind.LEVY)
NSARW = RolloutPolicy(kind=PolicyKind.NSARW)


def test_levy_pmf_normalization():
    """Test the truncated l^-2 mass on 1..4."""
    h = 1 + 1 / 4 + 1 / 9 + 1 / 16
    expected = np.array([1, 1 / 4, 1 / 9, 1 / 16]) / h
    np.testing.assert_allclose(levy_pmf(2.0, 4), expected)
    assert levy_pmf(2.0, 4).sum() == pytest.approx(1.0)
    assert not levy_pmf(2.0, 4).flags.writeable


def test_levy_lengths_follow_power_law():
    """Test sampled jump lengths by total variation and by the exponent MLE."""
    rng = np.random.default_rng(21)
    lengths = np.array([levy_length(2.0, 40, rng) for _ in range(20_000)])
    assert lengths.min() >= 1 and lengths.max() <= 40
    empirical = np.bincount(lengths, minlength=41)[1:] / lengths.size
    assert total_variation(empirical, levy_pmf(2.0, 40)) < 0.025
    assert power_law_mle(lengths, 40) == pytest.approx(2.0, abs=0.05)


def test_nsarw_choose_least_visited(grid5):
    """Test that NSARW only picks among the least-visited neighbours, uniformly."""
    visits = VisitGrid(5)
    here = Position(x=3, y=3)
    visits.record(here)
    visits.record(Position(x=3, y=4))  # up
    visits.record(Position(x=4, y=3))  # right
    rng = np.random.default_rng(4)
    picks = [nsarw_choose(here, visits, grid5, rng) for _ in range(4000)]
    assert set(picks) == {Direction.DOWN, Direction.LEFT}
    assert picks.count(Direction.DOWN) / len(picks) == pytest.approx(0.5, abs=0.04)


@pytest.mark.parametrize("count", [0, 3])
def test_nsarw_choose_four_way_tie_is_uniform(grid5, count):
    """Test uniform tie-breaking by chi-square when all four neighbours share one visit count."""
    visits = VisitGrid(5)
    here = Position(x=3, y=3)
    for _, p in neighbours(here, grid5):
        for _ in range(count):
            visits.record(p)
    rng = np.random.default_rng(40 + count)
    picks = [nsarw_choose(here, visits, grid5, rng) for _ in range(4000)]
    counts = [picks.count(d) for d in DIRECTIONS]
    assert min(counts) > 0
    assert chi_square_uniform(counts) > 0.01


@pytest.mark.parametrize("policy", [RW, LEVY, NSARW], ids=["rw", "levy", "nsarw"])
def test_trajectory_moves_one_cell_at_a_time(policy):
    """Test that every walker, Levy jumps included, only makes unit moves."""
    cfg = GridConfig(side_length=9)
    path = trajectory(cfg.start, policy, cfg, np.random.default_rng(8), 500)
    assert path[0] == cfg.start
    assert len(path) == 501
    assert all(torus_l1(a, b, 9) == 1 for a, b in zip(path, path[1:]))


@pytest.mark.parametrize("policy", [RW, LEVY, NSARW], ids=["rw", "levy", "nsarw"])
def test_trajectory_is_seeded(policy):
    """Test that equal seeds give equal walks."""
    cfg = GridConfig(side_length=9)
    a = trajectory(cfg.start, policy, cfg, np.random.default_rng(99), 200)
    b = trajectory(cfg.start, policy, cfg, np.random.default_rng(99), 200)
    assert a == b


def test_rollout_from_target_cell(grid5):
    """Test that a walk starting on the target takes no steps."""
    result = rollout(Position(x=2, y=2), Position(x=2, y=2), RW, grid5, np.random.default_rng(0))
    assert result.steps == 0
    assert result.found


def test_rollout_cap():
    """Test that a rollout stops unsuccessfully at its cap."""
    cfg = GridConfig(side_length=9)
    policy = RolloutPolicy(kind=PolicyKind.RW, rollout_cap=1)
    result = rollout(cfg.start, Position(x=5, y=5), policy, cfg, np.random.default_rng(0))
    assert result.steps == 1
    assert not result.found


@pytest.mark.parametrize("policy", [RW, LEVY, NSARW], ids=["rw", "levy", "nsarw"])
def test_rollout_never_beats_shortest_path(policy):
    """Test that found rollouts take at least the torus distance."""
    cfg = GridConfig(side_length=7)
    rng = np.random.default_rng(13)
    target = Position(x=4, y=5)
    for _ in range(50):
        result = rollout(cfg.start, target, policy, cfg, rng)
        assert result.found
        assert result.steps >= torus_l1(cfg.start, target, 7)


def test_levy_jump_cost_toggle():
    """Test that counting jumps instead of cells never costs more on the same seed."""
    cfg = GridConfig(side_length=15)
    target = Position(x=8, y=8)
    for seed in range(20):
        cells = rollout(cfg.start, target, LEVY, cfg, np.random.default_rng(seed))
        jumps = rollout(
            cfg.start,
            target,
            LEVY.model_copy(update={"levy_unit_cost": False}),
            cfg,
            np.random.default_rng(seed),
        )
        assert cells.found and jumps.found
        assert jumps.steps <= cells.steps


def test_levy_endpoint_detection_still_finds_target():
    """Test Levy searches that only look at jump endpoints."""
    cfg = GridConfig(side_length=9)
    policy = LEVY.model_copy(update={"levy_midjump_detect": False})
    rng = np.random.default_rng(17)
    for _ in range(30):
        result = rollout(cfg.start, Position(x=5, y=5), policy, cfg, rng)
        assert result.found
        assert result.steps >= 8


def test_baseline_cap_raises(monkeypatch):
    """Test that a baseline that exhausts its cap raises with the step count."""
    monkeypatch.setattr(settings, "baseline_cap", 3)
    cfg = GridConfig(side_length=9)
    with pytest.raises(CapExhaustedError) as exc:
        baseline_search(RW, Position(x=5, y=5), cfg, np.random.default_rng(0))
    assert exc.value.steps == 3


def test_nsarw_visit_grid_counts_every_cell_entered():
    """Test that the NSARW visit grid holds the start plus one count per step."""
    cfg = GridConfig(side_length=8)
    visits = VisitGrid(8)
    steps = baseline_search(NSARW, Position(x=5, y=6), cfg, np.random.default_rng(2), visits=visits)
    assert visits.total == steps + 1
    assert visits.counts.sum() == steps + 1
    assert visits.count(cfg.start) >= 1


def test_nsarw_prefers_new_cells():
    """Test that NSARW covers every cell of a 6 x 6 torus within 400 steps."""
    cfg = GridConfig(side_length=6)
    path = trajectory(cfg.start, NSARW, cfg, np.random.default_rng(1), 400)
    assert len(set(path)) == 36


@pytest.mark.parametrize("target", [(0, 1), (1, 1), (2, 2)])
def test_random_walk_matches_hitting_time_oracle(target):
    """Test mean RW rollout length on N=5 against the exact hitting-time solve (2 x 10^4 walks, 3%)."""
    n = 5
    cfg = GridConfig(side_length=n)
    exact = hitting_times(n, target)[0, 0]
    goal = Position(x=target[0] + 1, y=target[1] + 1)
    rng = np.random.default_rng(31)
    steps = [rollout(cfg.start, goal, RW, cfg, rng).steps for _ in range(20_000)]
    assert np.mean(steps) == pytest.approx(exact, rel=0.03)


def test_hitting_times_grow_with_distance():
    """Test that the exact expected hitting time is ordered by distance on N=5."""
    h = hitting_times(5, (0, 0))
    by_distance = {}
    for x in range(5):
        for y in range(5):
            d = min(x, 5 - x) + min(y, 5 - y)
            by_distance.setdefault(d, []).append(h[x, y])
    means = [np.mean(by_distance[d]) for d in sorted(by_distance)]
    assert means[0] == 0.0
    assert all(a < b for a, b in zip(means, means[1:]))
