"""Target placement: delta, wrapped-rounded Gaussian and uniform priors."""
import math
from typing import Tuple

import numpy as np
from scipy.stats import norm

from lattice_mcts.engine.lattice import from_xy
from lattice_mcts.errors import UsageError
from lattice_mcts.models.schemas import Position, TargetDistribution, TargetKind


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def _sample_xy(dist: TargetDistribution, rng: np.random.Generator) -> Tuple[int, int]:
    """0-based target cell. Delta and sigma=0 Gaussians draw nothing from rng."""
    n = dist.side_length
    if dist.kind is TargetKind.DELTA:
        return int(dist.x) - 1, int(dist.y) - 1
    if dist.kind is TargetKind.UNIFORM:
        x, y = rng.integers(0, n, size=2)
        return int(x), int(y)
    if dist.sigma == 0.0:
        vx, vy = dist.x, dist.y
    else:
        vx, vy = rng.normal((dist.x, dist.y), dist.sigma)
    # ((v - 1) mod N) + 1 in 1-based terms
    return (_round_half_up(vx) - 1) % n, (_round_half_up(vy) - 1) % n


def sample_target(dist: TargetDistribution, rng: np.random.Generator) -> Position:
    """
    Draw one target cell.

    Gaussian components are rounded to the nearest integer (halves round up)
    and wrapped into [1, N].
    """
    return from_xy(*_sample_xy(dist, rng))


def histogram(dist: TargetDistribution, draws: int, rng: np.random.Generator) -> np.ndarray:
    """
    Count grid of `draws` samples.

    Args:
        dist: Target distribution
        draws: Number of samples, at least 1
        rng: Random stream

    Returns:
        Integer array of shape (N, N) indexed [x - 1, y - 1]
    """
    if draws < 1:
        raise UsageError("histogram needs at least one draw")
    n = dist.side_length
    counts = np.zeros((n, n), dtype=np.int64)
    for _ in range(draws):
        x, y = _sample_xy(dist, rng)
        counts[x, y] += 1
    return counts


def _wrapped_axis_pmf(mean: float, sigma: float, n: int) -> np.ndarray:
    """P(cell k) for k = 1..N of a rounded, wrapped normal along one axis."""
    if sigma == 0.0:
        pmf = np.zeros(n)
        pmf[(_round_half_up(mean) - 1) % n] = 1.0
        return pmf
    # Integer v collects mass from [v - 0.5, v + 0.5); cover +-12 sigma
    reach = int(math.ceil(12 * sigma)) + 1
    lo = _round_half_up(mean) - reach
    hi = _round_half_up(mean) + reach
    values = np.arange(lo, hi + 1)
    mass = norm.cdf(values + 0.5, mean, sigma) - norm.cdf(values - 0.5, mean, sigma)
    pmf = np.zeros(n)
    np.add.at(pmf, (values - 1) % n, mass)
    return pmf / pmf.sum()


def exact_pmf(dist: TargetDistribution) -> np.ndarray:
    """Exact probability grid, indexed [x - 1, y - 1]."""
    n = dist.side_length
    if dist.kind is TargetKind.UNIFORM:
        return np.full((n, n), 1.0 / (n * n))
    if dist.kind is TargetKind.DELTA:
        pmf = np.zeros((n, n))
        pmf[int(dist.x) - 1, int(dist.y) - 1] = 1.0
        return pmf
    return np.outer(
        _wrapped_axis_pmf(dist.x, dist.sigma, n),
        _wrapped_axis_pmf(dist.y, dist.sigma, n),
    )
