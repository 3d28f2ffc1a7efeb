"""Kernel estimates of the passage-time density and distribution.

Censored runs count in the sample size but carry no kernel mass, so the
estimate is a sub-density whose total mass is the crossing fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

SQRT5 = math.sqrt(5.0)
_K0 = 3.0 / (4.0 * SQRT5)
BANDWIDTH_FLOOR = 1e-12
DEFAULT_GRID_POINTS = 512


def epanechnikov(t):
    """Epanechnikov kernel scaled to unit variance, supported on ``[-sqrt5, sqrt5]``."""
    t = np.asarray(t, dtype=float)
    val = np.where(np.abs(t) < SQRT5, np.maximum(_K0 * (1.0 - t * t / 5.0), 0.0), 0.0)
    return float(val) if val.ndim == 0 else val


def epanechnikov_cdf(t):
    """Integral of :func:`epanechnikov` from ``-inf`` to ``t``."""
    t = np.clip(np.asarray(t, dtype=float), -SQRT5, SQRT5)
    val = 0.5 + _K0 * (t - t ** 3 / 15.0)
    return float(val) if val.ndim == 0 else val


@dataclass(frozen=True)
class DensityEstimate:
    grid: np.ndarray
    h_hat: np.ndarray
    se: np.ndarray
    n_total: int
    n_censored: int
    bandwidth: float
    mass_below_grid: float = 0.0
    """Kernel mass that falls left of ``grid[0]`` (boundary leakage at t = 0)."""

    @property
    def crossing_fraction(self):
        return (self.n_total - self.n_censored) / self.n_total


def default_bandwidth(samples):
    """Silverman's rule of thumb, ``0.9 min(sd, IQR/1.34) n^(-1/5)``."""
    x = np.asarray(samples, dtype=float)
    x = x[~np.isnan(x)]
    if x.size < 2:
        raise DomainError(f"bandwidth selection needs at least 2 crossing times, got {x.size}")
    sd = x.std(ddof=1)
    q75, q25 = np.percentile(x, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34)
    if not spread > 0:
        spread = max(sd, (q75 - q25) / 1.34)
    return max(BANDWIDTH_FLOOR, 0.9 * spread * x.size ** -0.2)


def default_grid(samples, bandwidth, points=DEFAULT_GRID_POINTS):
    """Equally spaced grid from 0 to the 99.5th percentile plus the kernel half-width."""
    x = np.asarray(samples, dtype=float)
    x = x[~np.isnan(x)]
    top = (np.percentile(x, 99.5) if x.size else 0.0) + SQRT5 * bandwidth
    return np.linspace(0.0, top, points)


def estimate_density(samples, n_total, bandwidth, grid):
    """Kernel estimate ``(1/(n Delta)) sum K((t - T_i)/Delta)`` with ``n = n_total``.

    ``samples`` are the crossing times (``nan`` entries are dropped and
    treated as censored).  Standard errors come from the exact sample variance
    of the per-run kernel contributions, zeros included for censored runs.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("density grid must be a non-empty 1-d array")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("density grid must be strictly increasing")
    if not bandwidth > 0:
        raise DomainError(f"bandwidth must be > 0, got {bandwidth!r}")
    x = np.sort(np.asarray(samples, dtype=float))
    x = x[~np.isnan(x)]
    n_total = int(n_total)
    if n_total < max(1, x.size):
        raise DomainError("n_total must be at least the number of crossing times")

    reach = SQRT5 * bandwidth
    lo = np.searchsorted(x, grid - reach, side="left")
    hi = np.searchsorted(x, grid + reach, side="right")
    s1 = np.empty(grid.size)
    s2 = np.empty(grid.size)
    for j, (a, b) in enumerate(zip(lo, hi)):
        kv = epanechnikov((grid[j] - x[a:b]) / bandwidth) / bandwidth
        s1[j] = kv.sum()
        s2[j] = (kv * kv).sum()
    h_hat = s1 / n_total
    if n_total > 1:
        var = np.maximum(s2 / n_total - h_hat * h_hat, 0.0) * n_total / (n_total - 1)
        se = np.sqrt(var / n_total)
    else:
        se = np.zeros(grid.size)
    below = float(epanechnikov_cdf((grid[0] - x) / bandwidth).sum()) / n_total
    return DensityEstimate(grid, h_hat, se, n_total, n_total - x.size, float(bandwidth), below)


def estimate_cdf(estimate: DensityEstimate):
    """Running trapezoid integral of the density estimate, offset by the mass below the grid."""
    h = estimate.h_hat
    steps = 0.5 * (h[1:] + h[:-1]) * np.diff(estimate.grid)
    return estimate.mass_below_grid + np.concatenate(([0.0], np.cumsum(steps)))


def empirical_cdf(samples, n_total, grid):
    """Fraction of runs crossed by each grid time, with binomial standard errors."""
    x = np.sort(np.asarray(samples, dtype=float))
    x = x[~np.isnan(x)]
    grid = np.asarray(grid, dtype=float)
    p = np.searchsorted(x, grid, side="right") / n_total
    return p, np.sqrt(p * (1.0 - p) / n_total)
