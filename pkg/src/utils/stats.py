"""
Statistical helpers shared by the validators and experiment campaigns.
"""
import math
from fractions import Fraction
from typing import Callable, Sequence, Tuple, Union

import numpy as np
from scipy import stats


def as_ratio(beta: Union[float, int, str, Fraction], max_denominator: int = 10**9) -> Fraction:
    """
    Convert an imbalance ratio to an exact fraction.

    Floats are converted through their shortest repr so that 0.05 becomes 1/20.

    Raises:
        ValueError: If beta is not in (0, 1]
    """
    if isinstance(beta, Fraction):
        ratio = beta
    elif isinstance(beta, float):
        ratio = Fraction(repr(beta)).limit_denominator(max_denominator)
    else:
        ratio = Fraction(beta).limit_denominator(max_denominator)
    if not (0 < ratio <= 1):
        raise ValueError(f"beta must be in (0, 1], got {beta}")
    return ratio


def minority_count(n: int, beta: Union[float, Fraction]) -> int:
    """
    Number of minority examples, beta * n, required to be an integer.

    Raises:
        ValueError: If beta * n is not integral or is zero
    """
    product = as_ratio(beta) * int(n)
    if product.denominator != 1:
        raise ValueError(f"beta * n must be an integer, got {float(beta)} * {n} = {float(product)}")
    if product < 1:
        raise ValueError(f"beta * n must be at least 1, got {product}")
    return int(product)


def wilson_interval(hits: int, trials: int, confidence: float = 0.99) -> Tuple[float, float]:
    """
    Wilson score interval for a binomial proportion.

    Args:
        hits: Number of successes
        trials: Number of trials (> 0)
        confidence: Two-sided confidence level

    Returns:
        (lower, upper) bounds
    """
    if trials <= 0:
        raise ValueError(f"trials must be positive, got {trials}")
    z = stats.norm.ppf(0.5 + confidence / 2.0)
    p = hits / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def ks_distance(samples: Sequence[float], cdf: Callable) -> float:
    """One-sample Kolmogorov-Smirnov statistic against a vectorized CDF."""
    return float(stats.kstest(np.asarray(samples, dtype=float), cdf).statistic)


def ks_two_sample(first: Sequence[float], second: Sequence[float]) -> float:
    """Two-sample Kolmogorov-Smirnov statistic."""
    return float(stats.ks_2samp(np.asarray(first, dtype=float), np.asarray(second, dtype=float)).statistic)


def levy_distance(first: Sequence[float], second: Sequence[float], iterations: int = 60) -> float:
    """
    Lévy distance between the empirical distributions of two samples.

    The smallest h with F(x - h) - h <= G(x) <= F(x + h) + h for all x,
    found by bisection. Unlike KS, it shrinks when both samples collapse to
    the same point, so it metrizes convergence in distribution.
    """
    a = np.sort(np.asarray(first, dtype=float))
    b = np.sort(np.asarray(second, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("Both samples must be non-empty")
    grid = np.concatenate([a, b])

    def ecdf(sorted_values: np.ndarray, x: np.ndarray) -> np.ndarray:
        return np.searchsorted(sorted_values, x, side="right") / sorted_values.size

    def holds(h: float) -> bool:
        fa_lo, fa_hi = ecdf(a, grid - h), ecdf(a, grid + h)
        fb_lo, fb_hi = ecdf(b, grid - h), ecdf(b, grid + h)
        fa, fb = ecdf(a, grid), ecdf(b, grid)
        return bool(
            np.all(fa_lo - h <= fb + 1e-15) and np.all(fb <= fa_hi + h + 1e-15)
            and np.all(fb_lo - h <= fa + 1e-15) and np.all(fa <= fb_hi + h + 1e-15)
        )

    lo, hi = 0.0, 1.0
    if holds(lo):
        return 0.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return hi


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman rank correlation, NaN when undefined."""
    result = stats.spearmanr(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return float(result.statistic if hasattr(result, "statistic") else result.correlation)


def mean_std(values: Sequence[float]) -> Tuple[float, float]:
    """Mean and sample standard deviation (ddof=1; std 0 for a single value, NaN for none)."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return float("nan"), float("nan")
    if arr.size == 1:
        return float(arr[0]), 0.0
    return float(arr.mean()), float(arr.std(ddof=1))


def binomial_sigma(p: float, m: int) -> float:
    """Standard deviation of a frequency over m Bernoulli(p) draws."""
    return math.sqrt(max(p * (1.0 - p), 0.0) / m)
