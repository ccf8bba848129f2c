"""Small statistics helpers for Monte Carlo reports."""

from __future__ import annotations

import math

import numpy as np

Z_95 = 1.959963984540054  # two-sided 95% normal quantile
Z_ONE_SIDED_95 = 1.6448536269514722


def wilson_interval(successes: int, n: int, z: float = Z_95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("need n > 0")
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2.0 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == n else min(1.0, center + half)
    return lo, hi


def wilson_halfwidth(successes: int, n: int, z: float = Z_95) -> float:
    lo, hi = wilson_interval(successes, n, z)
    return 0.5 * (hi - lo)


def binomial_stderr(successes: int, n: int) -> float:
    p = successes / n
    return math.sqrt(p * (1.0 - p) / n)


def slope_through_origin(x, y) -> float:
    """Least-squares slope of y = s * x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.dot(x, y) / np.dot(x, x))


def weighted_line_fit(x, y, var_y) -> tuple[float, float, float, float]:
    """Weighted least squares y = a + b x with known per-point variances.

    Returns (a, b, se_a, se_b).  With known variances the slope standard
    error is exact under the Gaussian error model, independent of the
    residual degrees of freedom.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = 1.0 / np.asarray(var_y, dtype=float)
    sw = w.sum()
    xbar = float((w * x).sum() / sw)
    ybar = float((w * y).sum() / sw)
    sxx = float((w * (x - xbar) ** 2).sum())
    b = float((w * (x - xbar) * (y - ybar)).sum() / sxx)
    a = ybar - b * xbar
    se_b = math.sqrt(1.0 / sxx)
    se_a = math.sqrt(1.0 / sw + xbar * xbar / sxx)
    return a, b, se_a, se_b
