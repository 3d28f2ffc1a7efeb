"""Independent reference computations used by the tests.

Nothing here calls the closed forms under test except where noted.
"""

import math

import numpy as np
from scipy import stats
from scipy.integrate import quad


def ks_critical(n, alpha=0.01):
    """Exact two-sided one-sample KS critical value at level ``alpha``."""
    return stats.kstwo.ppf(1.0 - alpha, n)


def ks_statistic(samples, cdf):
    return stats.kstest(np.asarray(samples), cdf).statistic


def euler_crossing_fraction(mu, sigma, dist, t, dt, n_paths, rng, chunk=100_000):
    """Fraction of discretized drifted Brownian paths exceeding ``dist`` by ``t``."""
    steps = int(round(t / dt))
    hits = 0
    done = 0
    while done < n_paths:
        m = min(chunk, n_paths - done)
        x = np.zeros(m)
        sd = sigma * math.sqrt(dt)
        for _ in range(steps):
            x += mu * dt + sd * rng.standard_normal(x.size)
            crossed = x > dist
            if crossed.any():
                hits += int(crossed.sum())
                x = x[~crossed]
                if not x.size:
                    break
        done += m
    return hits / n_paths


def gaussian_pdf(x, mean, var):
    return np.exp(-(x - mean) ** 2 / (2 * var)) / np.sqrt(2 * np.pi * var)


def quad_cdf(pdf, lower, points):
    """Cumulative integral of ``pdf`` from ``lower`` to each sorted point."""
    out = []
    acc = 0.0
    prev = lower
    for p in points:
        acc += quad(pdf, prev, p, epsabs=1e-13, epsrel=1e-11, limit=200)[0]
        out.append(acc)
        prev = p
    return np.array(out)


def binomial_se(p, n):
    return np.sqrt(p * (1 - p) / n)
