"""Fixed statistical helpers used by the experiments and their acceptance checks."""
from typing import Sequence

import numpy as np
from scipy import optimize, stats


def chi_square_uniform(counts: Sequence[int]) -> float:
    """p-value of counts against equal expected frequencies."""
    return float(stats.chisquare(np.asarray(counts, dtype=float)).pvalue)


def chi_square_gof(counts: Sequence[int], probs: Sequence[float]) -> float:
    """p-value of counts against the given cell probabilities (zero-probability cells dropped)."""
    counts = np.asarray(counts, dtype=float).ravel()
    probs = np.asarray(probs, dtype=float).ravel()
    keep = probs > 0
    expected = probs[keep] / probs[keep].sum() * counts[keep].sum()
    return float(stats.chisquare(counts[keep], expected).pvalue)


def two_sample_chi_square(a: Sequence[int], b: Sequence[int]) -> float:
    """p-value that two count vectors share one categorical distribution."""
    table = np.array([a, b], dtype=float)
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        return 1.0
    return float(stats.chi2_contingency(table).pvalue)


def paired_less(a: Sequence[float], b: Sequence[float]) -> float:
    """One-sided paired t-test p-value for mean(a) < mean(b)."""
    return float(stats.ttest_rel(a, b, alternative="less").pvalue)


def welch_less(a: Sequence[float], b: Sequence[float]) -> float:
    """One-sided Welch t-test p-value for mean(a) < mean(b)."""
    return float(stats.ttest_ind(a, b, equal_var=False, alternative="less").pvalue)


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    return float(stats.spearmanr(x, y)[0])


def total_variation(p: Sequence[float], q: Sequence[float]) -> float:
    return 0.5 * float(np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float)).sum())


def power_law_mle(samples: Sequence[int], l_max: int) -> float:
    """
    Maximum-likelihood exponent of a discrete power law truncated to 1..l_max.

    Args:
        samples: Observed lengths, each in [1, l_max]
        l_max: Upper truncation

    Returns:
        Estimated exponent mu
    """
    samples = np.asarray(samples, dtype=float)
    log_sum = np.log(samples).sum()
    count = samples.size
    log_support = np.log(np.arange(1, l_max + 1, dtype=float))

    def neg_log_likelihood(mu: float) -> float:
        return count * np.log(np.exp(-mu * log_support).sum()) + mu * log_sum

    result = optimize.minimize_scalar(neg_log_likelihood, bounds=(0.01, 8.0), method="bounded")
    return float(result.x)
