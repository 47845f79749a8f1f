"""
Walkers used as MCTS rollout policies and as baseline searchers.

Random walks and Levy flights are generated in numpy chunks whose size doubles
up to a ceiling, so short rollouts stay cheap and long ones amortize the call
overhead. The chunk schedule is fixed, so a seed fully determines a trajectory.
"""
import logging
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from lattice_mcts.config import settings
from lattice_mcts.engine.lattice import _neighbours, _torus_l1, _torus_l1_array, from_xy, to_xy
from lattice_mcts.errors import CapExhaustedError
from lattice_mcts.models.schemas import (
    DIRECTIONS,
    Direction,
    GridConfig,
    PolicyKind,
    Position,
    RolloutPolicy,
    RolloutResult,
)

logger = logging.getLogger(__name__)

# Unit moves in DIRECTIONS order
_DX = np.array([d.dx for d in DIRECTIONS], dtype=np.int64)
_DY = np.array([d.dy for d in DIRECTIONS], dtype=np.int64)

_FIRST_CHUNK = 32
_MAX_CHUNK = 1 << 14
_UNIFORM_BUFFER = 256

Trace = Optional[List[Tuple[int, int]]]


class VisitGrid:
    """Per-cell visit counts over the lattice."""

    def __init__(self, side_length: int):
        self.side_length = side_length
        self.counts = np.zeros((side_length, side_length), dtype=np.int64)
        self.total = 0

    def _record(self, x: int, y: int) -> None:
        self.counts[x, y] += 1
        self.total += 1

    def record(self, pos: Position) -> None:
        self._record(*to_xy(pos))

    def count(self, pos: Position) -> int:
        x, y = to_xy(pos)
        return int(self.counts[x, y])

    def _neighbour_counts(self, x: int, y: int) -> List[int]:
        c = self.counts
        return [int(c[nx, ny]) for nx, ny in _neighbours(x, y, self.side_length)]


@lru_cache(maxsize=64)
def _levy_tables(mu: float, l_max: int) -> Tuple[np.ndarray, np.ndarray]:
    lengths = np.arange(1, l_max + 1, dtype=np.float64)
    pmf = lengths ** (-mu)
    pmf /= pmf.sum()
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    pmf.setflags(write=False)
    cdf.setflags(write=False)
    return pmf, cdf


def levy_pmf(mu: float, l_max: int) -> np.ndarray:
    """Normalized P(l) proportional to l^-mu on 1..l_max (index 0 is l = 1)."""
    return _levy_tables(float(mu), int(l_max))[0]


def levy_length(mu: float, l_max: int, rng: np.random.Generator) -> int:
    """Jump length from the truncated discrete power law, by inverse CDF."""
    cdf = _levy_tables(float(mu), int(l_max))[1]
    return int(np.searchsorted(cdf, rng.random(), side="right")) + 1


def _pick_least_visited(counts: List[int], u: float) -> int:
    low = min(counts)
    options = [i for i, c in enumerate(counts) if c == low]
    return options[int(u * len(options))]


def nsarw_choose(
    pos: Position,
    visits: VisitGrid,
    cfg: GridConfig,
    rng: np.random.Generator,
) -> Direction:
    """Uniform choice among the neighbours with the fewest recorded visits."""
    counts = visits._neighbour_counts(*to_xy(pos))
    return DIRECTIONS[_pick_least_visited(counts, rng.random())]


def _extend(trace: Trace, xs: np.ndarray, ys: np.ndarray) -> None:
    if trace is not None:
        trace.extend(zip(xs.tolist(), ys.tolist()))


def _random_walk(x, y, target, n, r_v, rng, cap, trace) -> Tuple[int, bool]:
    steps = 0
    chunk = _FIRST_CHUNK
    while steps < cap:
        k = min(chunk, cap - steps)
        dirs = rng.integers(0, 4, size=k)
        xs = (x + np.cumsum(_DX[dirs])) % n
        ys = (y + np.cumsum(_DY[dirs])) % n
        if target is not None:
            hits = np.flatnonzero(_torus_l1_array(xs, ys, target[0], target[1], n) <= r_v)
            if hits.size:
                i = int(hits[0])
                _extend(trace, xs[: i + 1], ys[: i + 1])
                return steps + i + 1, True
        _extend(trace, xs, ys)
        x, y = int(xs[-1]), int(ys[-1])
        steps += k
        chunk = min(2 * chunk, _MAX_CHUNK)
    return cap, False


def _levy_flight(x, y, target, n, r_v, rng, cap, trace, policy: RolloutPolicy) -> Tuple[int, bool]:
    cdf = _levy_tables(float(policy.mu), policy.lmax_for(n))[1]
    unit_cost = policy.levy_unit_cost
    cost = 0
    jumps = _FIRST_CHUNK // 4
    while cost < cap:
        dirs = rng.integers(0, 4, size=jumps)
        lengths = np.searchsorted(cdf, rng.random(jumps), side="right") + 1
        unit = np.repeat(dirs, lengths)
        xs = (x + np.cumsum(_DX[unit])) % n
        ys = (y + np.cumsum(_DY[unit])) % n
        ends = np.cumsum(lengths) - 1
        if target is not None:
            close = _torus_l1_array(xs, ys, target[0], target[1], n) <= r_v
            u = j = -1
            if policy.levy_midjump_detect:
                hits = np.flatnonzero(close)
                if hits.size:
                    u = int(hits[0])
                    j = int(np.searchsorted(ends, u, side="left"))
            else:
                hits = np.flatnonzero(close[ends])
                if hits.size:
                    j = int(hits[0])
                    u = int(ends[j])
            if u >= 0:
                total = cost + (u + 1 if unit_cost else j + 1)
                if total <= cap:
                    _extend(trace, xs[: u + 1], ys[: u + 1])
                    return total, True
        chunk_cost = len(unit) if unit_cost else jumps
        if cost + chunk_cost >= cap:
            # Walk stops mid-chunk at the cap
            left = cap - cost
            stop = left if unit_cost else int(ends[left - 1]) + 1
            _extend(trace, xs[:stop], ys[:stop])
            return cap, False
        _extend(trace, xs, ys)
        x, y = int(xs[-1]), int(ys[-1])
        cost += chunk_cost
        jumps = min(2 * jumps, _MAX_CHUNK)
    return cap, False


def _nsarw(x, y, target, n, r_v, rng, cap, trace, visits: Optional[VisitGrid]) -> Tuple[int, bool]:
    if visits is None:
        visits = VisitGrid(n)
    visits._record(x, y)
    buffer = rng.random(_UNIFORM_BUFFER)
    used = 0
    for steps in range(1, cap + 1):
        if used == _UNIFORM_BUFFER:
            buffer = rng.random(_UNIFORM_BUFFER)
            used = 0
        choice = _pick_least_visited(visits._neighbour_counts(x, y), buffer[used])
        used += 1
        x, y = _neighbours(x, y, n)[choice]
        visits._record(x, y)
        if trace is not None:
            trace.append((x, y))
        if target is not None and _torus_l1(x, y, target[0], target[1], n) <= r_v:
            return steps, True
    return cap, False


def _walk(
    x: int,
    y: int,
    target: Optional[Tuple[int, int]],
    policy: RolloutPolicy,
    n: int,
    r_v: int,
    rng: np.random.Generator,
    cap: int,
    trace: Trace = None,
    visits: Optional[VisitGrid] = None,
) -> Tuple[int, bool]:
    """Run a walker on 0-based coordinates until detection or `cap` steps."""
    if target is not None and _torus_l1(x, y, target[0], target[1], n) <= r_v:
        if visits is not None:
            visits._record(x, y)
        return 0, True
    if policy.kind is PolicyKind.RW:
        return _random_walk(x, y, target, n, r_v, rng, cap, trace)
    if policy.kind is PolicyKind.LEVY:
        return _levy_flight(x, y, target, n, r_v, rng, cap, trace, policy)
    return _nsarw(x, y, target, n, r_v, rng, cap, trace, visits)


def rollout(
    start: Position,
    target: Position,
    policy: RolloutPolicy,
    cfg: GridConfig,
    rng: np.random.Generator,
) -> RolloutResult:
    """
    Simulate the policy from start until it detects the target.

    Args:
        start: First cell of the walk
        target: Target cell
        policy: Walker specification; its rollout cap bounds the walk
        cfg: Grid configuration
        rng: Random stream

    Returns:
        Unit steps taken and whether the target was detected
    """
    n = cfg.side_length
    steps, found = _walk(
        *to_xy(start), to_xy(target), policy, n, cfg.vision_radius, rng, policy.cap_for(n)
    )
    return RolloutResult(steps=steps, found=found)


def baseline_search(
    policy: RolloutPolicy,
    target: Position,
    cfg: GridConfig,
    rng: np.random.Generator,
    visits: Optional[VisitGrid] = None,
) -> int:
    """
    Run the policy as a standalone searcher from the configured start.

    Args:
        policy: Walker specification
        target: Target cell
        cfg: Grid configuration
        rng: Random stream
        visits: Optional grid that receives the NSARW visit counts

    Returns:
        Unit steps until detection

    Raises:
        CapExhaustedError: If settings.baseline_cap steps pass without detection
    """
    n = cfg.side_length
    cap = settings.baseline_cap
    steps, found = _walk(
        *to_xy(cfg.start), to_xy(target), policy, n, cfg.vision_radius, rng, cap, visits=visits
    )
    if not found:
        logger.warning("%s baseline hit its %d-step cap", policy.label, cap)
        raise CapExhaustedError(cap)
    return steps


def trajectory(
    start: Position,
    policy: RolloutPolicy,
    cfg: GridConfig,
    rng: np.random.Generator,
    moves: int,
) -> List[Position]:
    """Cells visited by `moves` unit steps of the walker, start included, with no target."""
    trace: List[Tuple[int, int]] = [to_xy(start)]
    _walk(*to_xy(start), None, policy, cfg.side_length, cfg.vision_radius, rng, moves, trace=trace)
    return [from_xy(x, y) for x, y in trace]
