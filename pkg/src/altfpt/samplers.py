"""Acceptance-rejection samplers for one constant-parameter segment.

Within a segment of length ``tau`` the process is a plain Wiener process, so
the engine needs two conditional laws:

* the crossing time given that the barrier is reached before ``tau``
  (uniform-box rejection under the peak of the first-passage density);
* the state at ``tau`` given no crossing (truncated-Gaussian proposal thinned
  by the image-term factor), which in turn needs a truncated standard normal.

Internally everything is expressed through the distance to the barrier,
``dist = beta - x``, and vectorized over paths.  Rejection loops draw
proposals in blocks that grow geometrically for stubborn entries; taking the
first accepted proposal of an i.i.d. block is equivalent to the sequential
loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr, ndtr

from ._rng import open_uniform
from .errors import DomainError, PreconditionError, RejectionLimitError
from .wiener import WienerRegime, fpt_cdf, fpt_logpdf, fpt_mode

MAX_REJECTION_ITERATIONS = 10_000_000
_MAX_BLOCK_ELEMENTS = 1 << 20
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Truncation points outside this window use cheaper exact generators.
SHIFTED_EXP_WINDOW = (-1.0, 0.5)


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds of the simulation.

    eps1
        crossing probabilities below this are treated as zero.
    eps2
        when the crossing-time rejection would accept with probability at
        most ``eps2`` the density's peak is returned instead.
    eps3
        when the truncated-away normal mass is below ``eps3`` the truncated
        normal is drawn as an ordinary normal.
    """

    eps1: float = 1e-12
    eps2: float = 1e-4
    eps3: float = 1e-12

    def __post_init__(self):
        for name in ("eps1", "eps2", "eps3"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise DomainError(f"{name} must lie in (0, 1), got {value!r}")

    def to_dict(self):
        return {"eps1": self.eps1, "eps2": self.eps2, "eps3": self.eps3}


def _rejection(n, propose, max_iterations=MAX_REJECTION_ITERATIONS):
    """Run ``n`` independent rejection loops in lock-step.

    ``propose(idx, reps)`` returns ``(values, accepted)`` of shape
    ``(len(idx), reps)``.
    """
    out = np.empty(n)
    pending = np.arange(n)
    attempts = np.zeros(n, dtype=np.int64)
    reps = 1
    while pending.size:
        values, accepted = propose(pending, reps)
        hit = accepted.any(axis=1)
        first = accepted.argmax(axis=1)
        out[pending[hit]] = values[hit, first[hit]]
        attempts[pending] += reps
        pending = pending[~hit]
        if pending.size and attempts[pending].max() >= max_iterations:
            raise RejectionLimitError(
                f"rejection sampler exceeded {max_iterations} proposals for "
                f"{pending.size} entr{'y' if pending.size == 1 else 'ies'}"
            )
        if pending.size:
            reps = max(1, min(2 * reps, _MAX_BLOCK_ELEMENTS // pending.size))
    return out


def _rows(a, idx, reps):
    return np.broadcast_to(a[idx][:, None], (idx.size, reps))


# -- crossing time ----------------------------------------------------------


def _crossing_times(mu, sigma, dist, tau, eps2, rng):
    """Crossing times on (0, tau) from the conditioned first-passage density."""
    mu, sigma, dist, tau = (np.ascontiguousarray(a, dtype=float) for a in (mu, sigma, dist, tau))
    g_tau = fpt_cdf(mu, sigma, dist, tau)
    if np.any(g_tau <= 0.0):
        raise PreconditionError("crossing probability within tau is zero; nothing to condition on")
    log_g = np.log(g_tau)
    theta_m = np.minimum(tau, fpt_mode(mu, sigma, dist))
    log_peak = fpt_logpdf(mu, sigma, dist, theta_m) - log_g
    log_tau = np.log(tau)

    out = np.empty(mu.shape)
    degenerate = -(log_peak + log_tau) <= math.log(eps2)
    out[degenerate] = theta_m[degenerate]
    live = np.flatnonzero(~degenerate)
    if live.size == 0:
        return out

    def propose(idx, reps):
        i = live[idx]
        x = open_uniform(rng, (idx.size, reps)) * _rows(tau, i, reps)
        log_y = np.log(open_uniform(rng, (idx.size, reps))) + _rows(log_peak, i, reps)
        with np.errstate(divide="ignore", over="ignore"):
            log_f = fpt_logpdf(_rows(mu, i, reps), _rows(sigma, i, reps), _rows(dist, i, reps), x)
        return x, log_y <= log_f - _rows(log_g, i, reps)

    out[live] = _rejection(live.size, propose)
    return out


def crossing_envelope(regime: WienerRegime, beta, x, tau):
    """Peak location and height of the crossing density conditioned on ``T <= tau``.

    Returns ``(theta_m, m)``; ``1 / (m * tau)`` is the acceptance probability of
    the uniform-box rejection.
    """
    dist = beta - x
    theta_m = min(tau, float(fpt_mode(regime.mu, regime.sigma, dist)))
    g_tau = float(fpt_cdf(regime.mu, regime.sigma, dist, tau))
    return theta_m, float(np.exp(fpt_logpdf(regime.mu, regime.sigma, dist, theta_m))) / g_tau


def conditional_crossing_pdf(regime: WienerRegime, beta, x, tau, theta):
    """Density of the crossing time on (0, tau) given a crossing before tau."""
    dist = beta - x
    g_tau = fpt_cdf(regime.mu, regime.sigma, dist, tau)
    return np.exp(fpt_logpdf(regime.mu, regime.sigma, dist, theta)) / g_tau


def _segment_args(beta, x, tau):
    x = np.asarray(x, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if np.any(~(x < beta)):
        raise DomainError("segment start must lie strictly below beta")
    if np.any(~(tau > 0)):
        raise DomainError("segment length tau must be > 0")
    return x, tau


def _shape_out(values, shape):
    values = values.reshape(shape)
    return float(values) if values.ndim == 0 else values


def sample_crossing_time(regime: WienerRegime, beta, x, tau, rng, eps2=Tolerances.eps2, size=None):
    """Draw the passage time through ``beta`` conditioned on it preceding ``tau``.

    ``x`` and ``tau`` broadcast against each other and against ``size``.
    When the acceptance probability ``1/(m tau)`` is at most ``eps2`` the
    location of the peak is returned without sampling.
    """
    x, tau = _segment_args(beta, x, tau)
    shape = np.broadcast_shapes(x.shape, tau.shape, () if size is None else tuple(np.atleast_1d(size)))
    dist = np.broadcast_to(beta - x, shape).ravel()
    tau = np.broadcast_to(tau, shape).ravel()
    mu = np.full(dist.shape, regime.mu)
    sigma = np.full(dist.shape, regime.sigma)
    return _shape_out(_crossing_times(mu, sigma, dist, tau, eps2, rng), shape)


# -- truncated standard normal ---------------------------------------------


def shifted_exp_pdf(y, b):
    """Proposal density ``exp(y - b)`` on ``y < b``."""
    y = np.asarray(y, dtype=float)
    with np.errstate(over="ignore"):
        return np.where(y < b, np.exp(np.minimum(y - b, 0.0)), 0.0)


def truncnorm_acceptance(y):
    """Acceptance probability for a shifted-exponential proposal ``y``."""
    y = np.asarray(y, dtype=float)
    return np.exp(-0.5 * (y + 1.0) ** 2)


def truncnorm_envelope_constant(b):
    """Constant ``D`` with ``phi(y)/Phi(b) = D * shifted_exp_pdf(y, b) * truncnorm_acceptance(y)``."""
    return math.exp(b + 0.5 - _LOG_SQRT_2PI - float(log_ndtr(b)))


def truncated_std_normal_pdf(y, b):
    y = np.asarray(y, dtype=float)
    return np.where(y < b, np.exp(-0.5 * y * y - _LOG_SQRT_2PI - log_ndtr(b)), 0.0)


def _draw_shifted_exp(b, rng):
    def propose(idx, reps):
        bb = _rows(b, idx, reps)
        y = np.log(open_uniform(rng, (idx.size, reps))) + bb
        u = open_uniform(rng, (idx.size, reps))
        return y, u < truncnorm_acceptance(y)

    return _rejection(b.size, propose)


def _draw_plain(b, rng):
    # Normal draws rejected above b; used when Phi(b) is close to one.
    def propose(idx, reps):
        w = rng.standard_normal((idx.size, reps))
        return w, w < _rows(b, idx, reps)

    return _rejection(b.size, propose)


def _draw_lower_tail(b, rng):
    # Exponential proposal with the optimal rate for W < b << 0 (Robert, 1995),
    # applied to -W > -b.
    a = -b
    rate = 0.5 * (a + np.sqrt(a * a + 4.0))

    def propose(idx, reps):
        aa = _rows(a, idx, reps)
        rr = _rows(rate, idx, reps)
        z = aa - np.log(open_uniform(rng, (idx.size, reps))) / rr
        u = open_uniform(rng, (idx.size, reps))
        return -z, u <= np.exp(-0.5 * (z - rr) ** 2)

    return _rejection(b.size, propose)


def _truncated_std_normals(b, eps3, rng, method="auto"):
    b = np.ascontiguousarray(b, dtype=float).ravel()
    out = np.empty(b.shape)
    tail_mass = ndtr(-b)
    near_certain = tail_mass < eps3
    if method == "auto":
        lo, hi = SHIFTED_EXP_WINDOW
        plain = ~near_certain & (b > hi)
        lower = b < lo
        shifted = ~near_certain & ~plain & ~lower
    elif method == "shifted_exponential":
        plain = np.zeros(b.shape, dtype=bool)
        lower = np.zeros(b.shape, dtype=bool)
        shifted = ~near_certain
    else:
        raise DomainError(f"unknown truncated-normal method {method!r}")
    # The truncated-away mass is below eps3 here, so an ordinary normal draw is
    # the intended approximation; the redraw above b costs nothing and keeps
    # the support exact.
    for mask, draw in (
        (near_certain, lambda bb: _draw_plain(bb, rng)),
        (plain, lambda bb: _draw_plain(bb, rng)),
        (lower, lambda bb: _draw_lower_tail(bb, rng)),
        (shifted, lambda bb: _draw_shifted_exp(bb, rng)),
    ):
        if mask.any():
            out[mask] = draw(b[mask])
    return out


def sample_truncated_std_normal(upper, rng, eps3=Tolerances.eps3, size=None, method="auto"):
    """Standard normal conditioned on ``W < upper``.

    ``method="shifted_exponential"`` always uses the exponential proposal
    ``log(V) + upper`` thinned by :func:`truncnorm_acceptance`; ``"auto"``
    switches to plain normal rejection or an optimal-rate exponential tail
    proposal outside :data:`SHIFTED_EXP_WINDOW`, where the former becomes
    inefficient.
    """
    upper = np.asarray(upper, dtype=float)
    shape = np.broadcast_shapes(upper.shape, () if size is None else tuple(np.atleast_1d(size)))
    b = np.broadcast_to(upper, shape)
    return _shape_out(_truncated_std_normals(b, eps3, rng, method), shape)


# -- state at the end of a non-crossing segment -----------------------------


def _avoiding_distances(mu, sigma, dist, tau, eps3, rng):
    """Terminal distances ``beta - X(tau) > 0`` given no crossing on (0, tau]."""
    mu, sigma, dist, tau = (np.ascontiguousarray(a, dtype=float) for a in (mu, sigma, dist, tau))
    g_tau = fpt_cdf(mu, sigma, dist, tau)
    if np.any(g_tau >= 1.0):
        raise PreconditionError("crossing before tau is certain; no surviving state to sample")
    scale = sigma * np.sqrt(tau)
    b = (dist - mu * tau) / scale
    two_d_over_var = 2.0 * dist / (sigma * sigma * tau)

    def propose(idx, reps):
        bb = _rows(b, idx, reps)
        w = _truncated_std_normals(bb, eps3, rng).reshape(idx.size, reps)
        y = _rows(scale, idx, reps) * (bb - w)
        # Thin by the image-term bracket only; the extra constant Phi(b) of
        # avoiding_acceptance would just lower the acceptance rate.
        keep = -np.expm1(-_rows(two_d_over_var, idx, reps) * y)
        u = open_uniform(rng, (idx.size, reps))
        return y, (u <= keep) & (y > 0.0)

    return _rejection(mu.size, propose)


def truncated_gaussian_pdf(regime: WienerRegime, beta, x, tau, z):
    """Free transition density at ``tau`` restricted to ``z < beta`` and renormalized."""
    m = x + regime.mu * tau
    s = regime.sigma * math.sqrt(tau)
    z = np.asarray(z, dtype=float)
    b = (beta - m) / s
    w = (z - m) / s
    return np.where(z < beta, np.exp(-0.5 * w * w - _LOG_SQRT_2PI - log_ndtr(b)) / s, 0.0)


def avoiding_acceptance(regime: WienerRegime, beta, x, tau, z):
    """Thinning factor ``Phi(b) * [1 - exp(-2 (beta - z)(beta - x) / (sigma^2 tau))]``."""
    s = regime.sigma * math.sqrt(tau)
    b = (beta - x - regime.mu * tau) / s
    z = np.asarray(z, dtype=float)
    return float(ndtr(b)) * -np.expm1(-2.0 * (beta - z) * (beta - x) / (regime.sigma ** 2 * tau))


def avoiding_normalizer(regime: WienerRegime, beta, x, tau):
    """``1 / (1 - G)``, the reciprocal survival probability of the segment."""
    return 1.0 / (1.0 - float(fpt_cdf(regime.mu, regime.sigma, beta - x, tau)))


def sample_avoiding_state(regime: WienerRegime, beta, x, tau, rng, eps3=Tolerances.eps3, size=None):
    """Draw ``X(tau)`` for a segment started at ``x`` given no crossing of ``beta``."""
    x, tau = _segment_args(beta, x, tau)
    shape = np.broadcast_shapes(x.shape, tau.shape, () if size is None else tuple(np.atleast_1d(size)))
    dist = np.broadcast_to(beta - x, shape).ravel()
    tau = np.broadcast_to(tau, shape).ravel()
    mu = np.full(dist.shape, regime.mu)
    sigma = np.full(dist.shape, regime.sigma)
    y = _avoiding_distances(mu, sigma, dist, tau, eps3, rng)
    return _shape_out(beta - y, shape)
