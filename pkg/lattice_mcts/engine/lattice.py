"""
Torus geometry: periodic moves, the l1 torus metric and the detection predicate.

Public functions take 1-based Positions. The engines work on 0-based integer
coordinates through the underscore helpers, which avoid model construction in
hot loops.
"""
from typing import List, Tuple

import numpy as np

from lattice_mcts.models.schemas import DIRECTIONS, Direction, GridConfig, Position


def _wrap(v: int, n: int) -> int:
    return v % n


def _torus_l1(ax: int, ay: int, bx: int, by: int, n: int) -> int:
    dx = abs(ax - bx) % n
    dy = abs(ay - by) % n
    return min(dx, n - dx) + min(dy, n - dy)


def _torus_l1_array(xs: np.ndarray, ys: np.ndarray, bx: int, by: int, n: int) -> np.ndarray:
    dx = np.abs(xs - bx) % n
    dy = np.abs(ys - by) % n
    return np.minimum(dx, n - dx) + np.minimum(dy, n - dy)


def _neighbours(x: int, y: int, n: int) -> List[Tuple[int, int]]:
    """0-based neighbours in DIRECTIONS order (up, down, right, left)."""
    return [
        (x, (y + 1) % n),
        (x, (y - 1) % n),
        ((x + 1) % n, y),
        ((x - 1) % n, y),
    ]


def step(pos: Position, direction: Direction, cfg: GridConfig) -> Position:
    """
    Move one cell with periodic wrap.

    Args:
        pos: Current cell
        direction: Unit move
        cfg: Grid configuration

    Returns:
        The neighbouring cell, always inside [1, N]^2
    """
    n = cfg.side_length
    return Position(
        x=_wrap(pos.x - 1 + direction.dx, n) + 1,
        y=_wrap(pos.y - 1 + direction.dy, n) + 1,
    )


def torus_l1(a: Position, b: Position, n: int) -> int:
    """Minimum number of unit moves between a and b on the N x N torus."""
    return _torus_l1(a.x, a.y, b.x, b.y, n)


def detected(searcher: Position, target: Position, cfg: GridConfig) -> bool:
    """True iff the target lies within the vision radius of the searcher."""
    return torus_l1(searcher, target, cfg.side_length) <= cfg.vision_radius


def optimal_steps(target: Position, cfg: GridConfig) -> int:
    """Shortest path length from the configured start to the target."""
    return torus_l1(cfg.start, target, cfg.side_length)


def neighbours(pos: Position, cfg: GridConfig) -> List[Tuple[Direction, Position]]:
    return [(d, step(pos, d, cfg)) for d in DIRECTIONS]


def direction_between(a: Position, b: Position, cfg: GridConfig) -> Direction:
    """Direction of the unit move from a to the adjacent cell b."""
    for d in DIRECTIONS:
        if step(a, d, cfg) == b:
            return d
    raise ValueError(f"{b} is not adjacent to {a}")


def to_xy(pos: Position) -> Tuple[int, int]:
    return pos.x - 1, pos.y - 1


def from_xy(x: int, y: int) -> Position:
    return Position(x=int(x) + 1, y=int(y) + 1)
