"""
UCT search over the lattice state graph.

Statistics are keyed by cell rather than by tree path, so a cell reached along
different routes (including the previous root after a real move) shares one
entry.
"""
import logging
import math
import time
from typing import List, Optional, Tuple

import numpy as np

from lattice_mcts.config import settings
from lattice_mcts.engine.lattice import (
    _neighbours,
    _torus_l1,
    detected,
    from_xy,
    optimal_steps,
    step,
    to_xy,
)
from lattice_mcts.engine.policy import _walk
from lattice_mcts.engine.target import _sample_xy, sample_target
from lattice_mcts.models.schemas import (
    DIRECTIONS,
    CreditMode,
    Direction,
    Estimator,
    FinalMove,
    GridConfig,
    LoopOutcome,
    MctsConfig,
    Position,
    TargetDistribution,
    TrialRecord,
)
from lattice_mcts.util.timing import timer

logger = logging.getLogger(__name__)

# Every neighbour of a fresh root must be tried once before a move is chosen
MIN_LOOPS = 4


class StatTable:
    """Visit counts, cumulative rewards and cumulative step counts per cell."""

    def __init__(self, side_length: int):
        self.side_length = side_length
        self.visits = np.zeros((side_length, side_length), dtype=np.int64)
        self.rewards = np.zeros((side_length, side_length), dtype=np.float64)
        self.steps = np.zeros((side_length, side_length), dtype=np.float64)
        self.loops = 0

    def clear(self) -> None:
        self.visits.fill(0)
        self.rewards.fill(0.0)
        self.steps.fill(0.0)
        self.loops = 0

    def n(self, pos: Position) -> int:
        x, y = to_xy(pos)
        return int(self.visits[x, y])

    def w(self, pos: Position) -> float:
        x, y = to_xy(pos)
        return float(self.rewards[x, y])

    def _average(self, x: int, y: int, estimator: Estimator, scale: float) -> float:
        n = self.visits[x, y]
        if estimator is Estimator.INVERSE_MEAN_STEPS:
            return scale * float(n) / float(self.steps[x, y])
        return float(self.rewards[x, y]) / float(n)

    def average_reward(
        self,
        pos: Position,
        estimator: Estimator = Estimator.MEAN_REWARD,
        scale: float = 1.0,
    ) -> float:
        """Average reward of a visited cell under the chosen estimator."""
        x, y = to_xy(pos)
        return self._average(x, y, estimator, scale)


def uct_value(child_n: int, child_w: float, parent_n: int, c: float) -> float:
    """
    UCT score of a child cell.

    Args:
        child_n: Child visit count
        child_w: Child cumulative reward
        parent_n: Parent visit count, at least 1
        c: Exploration coefficient

    Returns:
        +inf for an unvisited child, else mean reward plus the exploration bonus
    """
    if child_n == 0:
        return math.inf
    return child_w / child_n + c * math.sqrt(math.log(parent_n) / child_n)


def loop_reward(tau: int, cap: int, found: bool, scale: float = 1.0) -> float:
    """Per-loop reward 1/max(tau, 1); a capped rollout earns 1/cap."""
    if not found:
        return scale / cap
    return scale / max(tau, 1)


def _tie_break(options: List[int], rng: np.random.Generator) -> int:
    if len(options) == 1:
        return options[0]
    return options[int(rng.integers(len(options)))]


def _run_loop(
    root: Tuple[int, int],
    stats: StatTable,
    dist: TargetDistribution,
    cfg: GridConfig,
    mcfg: MctsConfig,
    rng: np.random.Generator,
) -> Tuple[Tuple[int, int], int, int, bool]:
    n = cfg.side_length
    r_v = cfg.vision_radius
    policy = mcfg.policy
    cap = policy.cap_for(n)
    c = mcfg.exploration_c
    scale = mcfg.reward_scale
    estimator = mcfg.estimator
    visits = stats.visits

    tx, ty = _sample_xy(dist, rng)
    x, y = root
    path = [root]
    hit = _torus_l1(x, y, tx, ty, n) <= r_v

    # Selection, then expansion of one unvisited neighbour
    depth = 0
    depth_cap = mcfg.depth_cap_for(n)
    while not hit:
        nbrs = _neighbours(x, y, n)
        counts = [int(visits[a, b]) for a, b in nbrs]
        unvisited = [i for i, k in enumerate(counts) if k == 0]
        if unvisited:
            x, y = nbrs[_tie_break(unvisited, rng)]
            path.append((x, y))
            hit = _torus_l1(x, y, tx, ty, n) <= r_v
            break
        if depth >= depth_cap:
            break
        log_parent = math.log(max(int(visits[x, y]), 1))
        values = [
            stats._average(a, b, estimator, scale) + c * math.sqrt(log_parent / k)
            for (a, b), k in zip(nbrs, counts)
        ]
        best = max(values)
        x, y = nbrs[_tie_break([i for i, v in enumerate(values) if v == best], rng)]
        path.append((x, y))
        depth += 1
        hit = _torus_l1(x, y, tx, ty, n) <= r_v

    if hit:
        rollout_steps, found = 0, True
    else:
        rollout_steps, found = _walk(x, y, (tx, ty), policy, n, r_v, rng, cap)

    # Backpropagation, once per distinct cell at its first occurrence
    moves = len(path) - 1
    seen = set()
    for i, (a, b) in enumerate(path):
        if (a, b) in seen:
            continue
        seen.add((a, b))
        if mcfg.credit_mode is CreditMode.REMAINING_STEPS:
            tau = moves - i + rollout_steps
        else:
            tau = moves + rollout_steps
        visits[a, b] += 1
        stats.rewards[a, b] += loop_reward(tau, cap, found, scale)
        stats.steps[a, b] += max(tau, 1) if found else cap
    stats.loops += 1
    return (tx, ty), len(path), rollout_steps, found


def run_loop(
    root: Position,
    stats: StatTable,
    dist: TargetDistribution,
    cfg: GridConfig,
    mcfg: MctsConfig,
    rng: np.random.Generator,
) -> LoopOutcome:
    """
    Play one selection / expansion / rollout / backpropagation loop.

    A practice target is drawn from `dist` for every loop.
    """
    practice, path_length, rollout_steps, found = _run_loop(to_xy(root), stats, dist, cfg, mcfg, rng)
    return LoopOutcome(
        practice_target=from_xy(*practice),
        path_length=path_length,
        rollout_steps=rollout_steps,
        found=found,
    )


def select_move(
    root: Position,
    stats: StatTable,
    dist: TargetDistribution,
    cfg: GridConfig,
    mcfg: MctsConfig,
    rng: np.random.Generator,
) -> Direction:
    """
    Spend the decision budget on loops from root and return the chosen move.

    The loop budget is clamped to at least MIN_LOOPS; a wall-clock budget also
    always plays MIN_LOOPS loops.
    """
    n = cfg.side_length
    xy = to_xy(root)
    stats.loops = 0
    if mcfg.loops is not None:
        for _ in range(max(mcfg.loops, MIN_LOOPS)):
            _run_loop(xy, stats, dist, cfg, mcfg, rng)
    else:
        deadline = time.perf_counter() + mcfg.time_budget_ms / 1000.0
        played = 0
        while played < MIN_LOOPS or time.perf_counter() < deadline:
            _run_loop(xy, stats, dist, cfg, mcfg, rng)
            played += 1

    nbrs = _neighbours(*xy, n)
    visited = [i for i, (a, b) in enumerate(nbrs) if stats.visits[a, b] > 0]
    if not visited:
        # Every loop detected the practice target at the root
        return DIRECTIONS[int(rng.integers(4))]
    if mcfg.final_move is FinalMove.MAX_VISITS:
        scores = {i: float(stats.visits[nbrs[i]]) for i in visited}
    else:
        scores = {
            i: stats._average(*nbrs[i], mcfg.estimator, mcfg.reward_scale) for i in visited
        }
    best = max(scores.values())
    return DIRECTIONS[_tie_break([i for i in visited if scores[i] == best], rng)]


def search_game(
    dist: TargetDistribution,
    cfg: GridConfig,
    mcfg: MctsConfig,
    rng: np.random.Generator,
    target: Optional[Position] = None,
    record_path: bool = False,
) -> TrialRecord:
    """
    Play one game: move by MCTS decisions until the real target is detected.

    Args:
        dist: Prior used for both the real target (when not given) and practice targets
        cfg: Grid configuration
        mcfg: Search parameters
        rng: Random stream for the search
        target: Real target; sampled from dist with rng when omitted
        record_path: Keep every real position in the record

    Returns:
        TrialRecord with capped=True if the game cap of game_cap_factor * N^2 steps ran out
    """
    n = cfg.side_length
    if target is None:
        target = sample_target(dist, rng)
    cap = settings.game_cap_factor * n * n
    stats = StatTable(n)
    pos = cfg.start
    path = [pos] if record_path else None
    steps = 0
    capped = False

    with timer(f"{mcfg.label} game") as elapsed:
        while not detected(pos, target, cfg):
            if steps >= cap:
                capped = True
                logger.warning("%s game hit its %d-step cap", mcfg.label, cap)
                break
            if not mcfg.reuse_stats:
                stats.clear()
            pos = step(pos, select_move(pos, stats, dist, cfg, mcfg, rng), cfg)
            steps += 1
            if path is not None:
                path.append(pos)

    return TrialRecord(
        strategy=mcfg.label,
        target=target,
        steps_taken=steps,
        optimal_steps=optimal_steps(target, cfg),
        wall_ms=elapsed.ms,
        capped=capped,
        path=path,
    )
