"""
Exact reference values for the torus random walk.

Used to check the simulators: BFS path lengths for the metric, and the
absorbing-chain solve for expected hitting times.
"""
from collections import deque
from typing import Tuple

import numpy as np
from scipy.linalg import solve

from lattice_mcts.engine.lattice import _neighbours, _torus_l1


def bfs_distances(n: int, source: Tuple[int, int]) -> np.ndarray:
    """Shortest unit-move path lengths from a 0-based source on the N x N torus."""
    dist = np.full((n, n), -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        x, y = queue.popleft()
        for nx, ny in _neighbours(x, y, n):
            if dist[nx, ny] < 0:
                dist[nx, ny] = dist[x, y] + 1
                queue.append((nx, ny))
    return dist


def random_walk_transition(n: int) -> np.ndarray:
    """Transition matrix of the simple random walk; state index is x * N + y."""
    size = n * n
    P = np.zeros((size, size))
    for x in range(n):
        for y in range(n):
            for nx, ny in _neighbours(x, y, n):
                P[x * n + y, nx * n + ny] += 0.25
    return P


def _detection_mask(n: int, target: Tuple[int, int], r_v: int) -> np.ndarray:
    return np.array(
        [_torus_l1(x, y, target[0], target[1], n) <= r_v for x in range(n) for y in range(n)]
    )


def hitting_times(n: int, target: Tuple[int, int], r_v: int = 0) -> np.ndarray:
    """
    Expected random-walk steps to detect a 0-based target, from every start cell.

    Solves (I - P) h = 1 on the undetected states, with h = 0 on detected ones.

    Returns:
        Array of shape (N, N) indexed by start cell
    """
    P = random_walk_transition(n)
    done = _detection_mask(n, target, r_v)
    open_ = ~done
    A = np.eye(open_.sum()) - P[np.ix_(open_, open_)]
    h = np.zeros(n * n)
    h[open_] = solve(A, np.ones(open_.sum()))
    return h.reshape(n, n)


def mean_hitting_time_uniform(n: int, r_v: int = 0) -> float:
    """Expected hitting time from a fixed start, averaged over a uniform target."""
    # Translation invariance: every target sees the same field of offsets
    return float(hitting_times(n, (0, 0), r_v).mean())


def expected_inverse_hitting_time(
    n: int,
    start: Tuple[int, int],
    target: Tuple[int, int],
    r_v: int = 0,
    tol: float = 1e-13,
    max_steps: int = 1_000_000,
) -> float:
    """E[1 / max(tau, 1)] for the random walk, by propagating the absorbing chain."""
    done = _detection_mask(n, target, r_v)
    if done[start[0] * n + start[1]]:
        return 1.0
    P = random_walk_transition(n)
    open_ = ~done
    Q = P[np.ix_(open_, open_)]
    absorb = P[np.ix_(open_, done)].sum(axis=1)
    index = np.cumsum(open_) - 1
    p = np.zeros(open_.sum())
    p[index[start[0] * n + start[1]]] = 1.0
    total = 0.0
    for t in range(1, max_steps + 1):
        total += float(p @ absorb) / t
        p = p @ Q
        if p.sum() < tol:
            break
    return total
