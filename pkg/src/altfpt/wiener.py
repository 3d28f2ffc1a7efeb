"""Closed-form first-passage quantities for a Wiener process with drift.

All array kernels work on the distance to the barrier ``dist = beta - x`` and
broadcast over numpy arrays.  The :class:`WienerRegime` / :class:`Barrier`
wrappers validate arguments and are the public entry points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr, ndtr

from .errors import DomainError

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class WienerRegime:
    """Drift ``mu`` and diffusion scale ``sigma`` of one regime."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise DomainError(f"mu must be finite, got {self.mu!r}")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError(f"sigma must be finite and > 0, got {self.sigma!r}")


@dataclass(frozen=True)
class Barrier:
    """Upper absorbing level ``beta`` for a process started at ``x0 < beta``."""

    beta: float
    x0: float

    def __post_init__(self):
        if not self.beta > self.x0:
            raise DomainError(
                f"barrier must lie above the start: beta={self.beta!r}, x0={self.x0!r}"
            )

    @property
    def distance(self):
        return self.beta - self.x0


# -- array kernels -----------------------------------------------------------


def fpt_cdf(mu, sigma, dist, t):
    """P(T <= t) for the upward passage through a level ``dist`` above the start."""
    mu, sigma, dist, t = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (mu, sigma, dist, t))
    )
    s = sigma * np.sqrt(t)
    direct = ndtr(-(dist - mu * t) / s)
    # exp(2 mu d / sigma^2) overflows long before the product does; stay in logs.
    reflected = np.exp(2.0 * mu * dist / (sigma * sigma) + log_ndtr(-(dist + mu * t) / s))
    return np.clip(direct + reflected, 0.0, 1.0)


def fpt_logpdf(mu, sigma, dist, t):
    """Log of the first-passage density; ``-inf`` where the density underflows."""
    mu, sigma, dist, t = (np.asarray(a, dtype=float) for a in (mu, sigma, dist, t))
    with np.errstate(divide="ignore"):
        return (
            np.log(dist)
            - _LOG_SQRT_2PI
            - np.log(sigma)
            - 1.5 * np.log(t)
            - (dist - mu * t) ** 2 / (2.0 * sigma * sigma * t)
        )


def fpt_pdf(mu, sigma, dist, t):
    return np.exp(fpt_logpdf(mu, sigma, dist, t))


def fpt_mode(mu, sigma, dist):
    """Location of the maximum of the first-passage density on (0, inf)."""
    mu, sigma, dist = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (mu, sigma, dist))
    )
    s2 = sigma * sigma
    mu2 = mu * mu
    driftless = dist * dist / (3.0 * s2)
    with np.errstate(divide="ignore", invalid="ignore"):
        # (-3 s2 + sqrt(9 s2^2 + 4 mu2 d^2)) / (2 mu2), rationalized so that
        # small mu does not cancel: 2 d^2 / (3 s2 + sqrt(9 s2^2 + 4 mu2 d^2)).
        drifted = 2.0 * dist * dist / (3.0 * s2 + np.sqrt(9.0 * s2 * s2 + 4.0 * mu2 * dist * dist))
    return np.where(mu == 0.0, driftless, drifted)


def avoiding_density(mu, sigma, dist0, y, t):
    """Density of the state at ``t`` on non-crossed paths.

    ``dist0`` is the initial distance to the barrier and ``y = beta - x`` the
    terminal distance (``y >= 0``).
    """
    mu, sigma, dist0, y, t = (np.asarray(a, dtype=float) for a in (mu, sigma, dist0, y, t))
    s2t = sigma * sigma * t
    free = np.exp(-((dist0 - y) - mu * t) ** 2 / (2.0 * s2t)) / np.sqrt(2.0 * np.pi * s2t)
    return free * -np.expm1(-2.0 * y * dist0 / s2t)


# -- validated public API ----------------------------------------------------


def _positive_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise DomainError("time argument must be > 0")
    return t


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def crossing_cdf(regime: WienerRegime, barrier: Barrier, t):
    """Probability that the passage through ``barrier.beta`` happens by time ``t``."""
    t = _positive_time(t)
    return _out(fpt_cdf(regime.mu, regime.sigma, barrier.distance, t))


def crossing_pdf(regime: WienerRegime, barrier: Barrier, t):
    """First-passage density at time ``t`` (inverse-Gaussian shaped)."""
    t = _positive_time(t)
    return _out(fpt_pdf(regime.mu, regime.sigma, barrier.distance, t))


def avoiding_pdf(regime: WienerRegime, barrier: Barrier, x, t):
    """Sub-density of the state ``x <= beta`` at time ``t`` before any crossing.

    Integrates over ``x`` to ``1 - crossing_cdf(regime, barrier, t)``.
    """
    t = _positive_time(t)
    x = np.asarray(x, dtype=float)
    if np.any(x > barrier.beta):
        raise DomainError("avoiding density is defined for x <= beta only")
    return _out(avoiding_density(regime.mu, regime.sigma, barrier.distance, barrier.beta - x, t))


def free_pdf(regime: WienerRegime, x0, x, t):
    """Unconstrained Gaussian transition density of the regime."""
    t = _positive_time(t)
    s2t = regime.sigma ** 2 * t
    x = np.asarray(x, dtype=float)
    return _out(np.exp(-(x - x0 - regime.mu * t) ** 2 / (2.0 * s2t)) / np.sqrt(2.0 * np.pi * s2t))


def pdf_mode(regime: WienerRegime, beta, x):
    """Time at which the first-passage density from ``x`` to ``beta`` peaks.

    Callers restricting the density to ``(0, tau)`` take ``min(tau, mode)``.
    """
    if not beta > x:
        raise DomainError(f"pdf_mode needs beta > x, got beta={beta!r}, x={x!r}")
    return _out(fpt_mode(regime.mu, regime.sigma, beta - x))
