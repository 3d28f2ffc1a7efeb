"""Analytic bounds on the first-passage density and distribution.

Lower bounds keep only the paths that cross before the first switch or
between the first and second switch; the cdf upper bound compares with the
pure upward-drift regime when both regimes share the same diffusion scale.
Time integrals use QUADPACK's adaptive Gauss-Kronrod rule (``scipy.integrate.quad``).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import log_ndtr

from .engine import AlternatingParams
from .errors import DomainError, HypothesisError
from .wiener import avoiding_density, fpt_cdf, fpt_pdf

logger = logging.getLogger(__name__)

QUAD_EPSABS = 1e-9
QUAD_EPSREL = 1e-9
QUAD_LIMIT = 200
CLOSED_FORM_RTOL = 1e-6
CLOSED_FORM_FLOOR = 1e-12

PDF_LOWER = "pdf-lower"
CDF_LOWER = "cdf-lower"
CDF_UPPER = "cdf-upper"


@dataclass(frozen=True)
class BoundCurve:
    grid: np.ndarray
    values: np.ndarray
    kind: str


def _check_regime(k):
    if k not in (1, 2):
        raise DomainError(f"regime must be 1 or 2, got {k!r}")


def _pair(params, k):
    """(mu, sigma, law) of the starting regime followed by those of the other."""
    first = params.regime(k)
    second = params.regime(3 - k)
    return first, params.law(k), second, params.law(3 - k)


def _one_switch_closed(mu_a, sig_a, mu_b, sig_b, dist, u, t):
    """Closed form of the one-switch passage density.

    With ``y = beta - X(u)`` the integrand is ``(y/s) N(y; mu_b s, sig_b^2 s)``
    times the avoiding density, itself a difference of a Gaussian and its
    mirror image.  Each Gaussian product integrates against ``y`` on
    ``(0, inf)`` in closed form; the ``phi`` terms of the two images cancel,
    leaving only the ``Phi`` terms.
    """
    u = np.asarray(u, dtype=float)
    t = np.asarray(t, dtype=float)
    s = t - u
    var_b = sig_b * sig_b * s
    var_a = sig_a * sig_a * u
    total = var_a + var_b
    mean_b = mu_b * s
    sd_post = np.sqrt(var_a * var_b / total)
    log_norm = -0.5 * np.log(2.0 * math.pi * total)

    out = 0.0
    for sign, centre, log_weight in (
        (1.0, dist - mu_a * u, 0.0),
        (-1.0, -dist - mu_a * u, 2.0 * mu_a * dist / (sig_a * sig_a)),
    ):
        post_mean = (mean_b * var_a + centre * var_b) / total
        log_mag = (
            log_weight
            + log_norm
            - (mean_b - centre) ** 2 / (2.0 * total)
            + log_ndtr(post_mean / sd_post)
        )
        out = out + sign * post_mean * np.exp(log_mag)
    return out / s


def _one_switch_quad(mu_a, sig_a, mu_b, sig_b, dist, u, t):
    s = t - u

    def integrand(y):
        return (y / s) * math.exp(-(y - mu_b * s) ** 2 / (2.0 * sig_b * sig_b * s)) / math.sqrt(
            2.0 * math.pi * sig_b * sig_b * s
        ) * float(avoiding_density(mu_a, sig_a, dist, y, u))

    # The avoiding density has negligible mass beyond 10 standard deviations
    # of its Gaussian factor; for small u it is a narrow spike at ``centre``.
    centre = dist - mu_a * u
    spread = sig_a * math.sqrt(u)
    lower = max(centre - 10.0 * spread, 0.0)
    upper = max(centre, 0.0) + 10.0 * spread
    hints = (centre - spread, centre, centre + spread, sig_b * math.sqrt(s), 4.0 * sig_b * math.sqrt(s))
    points = sorted(p for p in hints if lower < p < upper)
    value, _ = quad(integrand, lower, upper, points=points or None, epsabs=0.0, epsrel=1e-11, limit=QUAD_LIMIT)
    return value


def _switch_args(k, params):
    _check_regime(k)
    first, _, second, _ = _pair(params, k)
    return first.mu, first.sigma, second.mu, second.sigma, params.beta - params.x0


def one_switch_density(k, u, t, params: AlternatingParams, method="checked"):
    """Density of crossing at ``t`` from regime ``k`` with exactly one switch, at ``u``.

    ``method`` is ``"closed"``, ``"quadrature"`` or ``"checked"``; the last
    evaluates both and falls back to the quadrature value (logging a warning)
    when they disagree beyond ``CLOSED_FORM_RTOL``.
    """
    if not 0.0 < u < t:
        raise DomainError(f"switch time must satisfy 0 < u < t, got u={u!r}, t={t!r}")
    args = _switch_args(k, params)
    if method == "closed":
        return float(_one_switch_closed(*args, u, t))
    if method == "quadrature":
        return _one_switch_quad(*args, u, t)
    if method != "checked":
        raise DomainError(f"unknown method {method!r}")
    closed = float(_one_switch_closed(*args, u, t))
    reference = _one_switch_quad(*args, u, t)
    if min(abs(closed), abs(reference)) > CLOSED_FORM_FLOOR and not math.isclose(
        closed, reference, rel_tol=CLOSED_FORM_RTOL
    ):
        logger.warning(
            "one-switch closed form %.17g disagrees with quadrature %.17g at k=%d u=%g t=%g",
            closed, reference, k, u, t,
        )
        return reference
    return closed


def pdf_lower_bound(k, t, params: AlternatingParams, method="closed"):
    """Lower bound on the first-passage density at ``t`` for initial regime ``k``.

    Adds the no-switch term ``S_k(t) g_k(t)`` and the one-switch term
    ``int_0^t S_other(t-u) I_k(u, t) f_k(u) du``.  ``method`` selects how the
    one-switch density is evaluated (see :func:`one_switch_density`).
    """
    _check_regime(k)
    if t <= 0:
        raise DomainError(f"t must be > 0, got {t!r}")
    first, law_first, second, law_second = _pair(params, k)
    dist = params.beta - params.x0
    no_switch = law_first.sf(t) * float(fpt_pdf(first.mu, first.sigma, dist, t))
    args = _switch_args(k, params)
    if method == "closed":
        density = lambda u: float(_one_switch_closed(*args, u, t))
    else:
        density = lambda u: one_switch_density(k, u, t, params, method=method)

    def integrand(u):
        return law_second.sf(t - u) * density(u) * law_first.pdf(u)

    one_switch, _ = quad(integrand, 0.0, t, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
    return no_switch + one_switch


def cdf_lower_bound(k, t, params: AlternatingParams):
    """Lower bound ``S_k(t) G_k(t) + int_0^t G_k(u) dF_k(u)`` on the passage cdf."""
    _check_regime(k)
    if t <= 0:
        raise DomainError(f"t must be > 0, got {t!r}")
    first, law_first, _, _ = _pair(params, k)
    dist = params.beta - params.x0

    def integrand(u):
        return float(fpt_cdf(first.mu, first.sigma, dist, u)) * law_first.pdf(u)

    head = law_first.sf(t) * float(fpt_cdf(first.mu, first.sigma, dist, t))
    tail, _ = quad(integrand, 0.0, t, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
    return min(1.0, head + tail)


def check_upper_bound_hypothesis(params: AlternatingParams):
    if params.sigma1 != params.sigma2:
        raise HypothesisError(
            "the passage-time cdf upper bound requires sigma1 == sigma2 "
            f"(got sigma1={params.sigma1!r}, sigma2={params.sigma2!r})"
        )
    if params.mu2 > params.mu1:
        raise HypothesisError(
            f"the upper bound compares with the faster regime and needs mu2 <= mu1 "
            f"(got mu1={params.mu1!r}, mu2={params.mu2!r})"
        )


def cdf_upper_bound(t, params: AlternatingParams):
    """Upper bound ``G_1(t)`` on the passage cdf for either initial regime.

    Only valid when both regimes share the diffusion scale.
    """
    check_upper_bound_hypothesis(params)
    if t <= 0:
        raise DomainError(f"t must be > 0, got {t!r}")
    return float(fpt_cdf(params.mu1, params.sigma1, params.beta - params.x0, t))


def bound_curve(kind, grid, params: AlternatingParams, k=None):
    """Evaluate a bound on an increasing time grid; ``t = 0`` maps to 0."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0) or grid[0] < 0:
        raise DomainError("bound grid must be a non-empty increasing array of times >= 0")
    if kind == PDF_LOWER:
        fn = lambda t: pdf_lower_bound(k, t, params)
    elif kind == CDF_LOWER:
        fn = lambda t: cdf_lower_bound(k, t, params)
    elif kind == CDF_UPPER:
        check_upper_bound_hypothesis(params)
        fn = lambda t: cdf_upper_bound(t, params)
    else:
        raise DomainError(f"unknown bound kind {kind!r}")
    values = np.array([0.0 if t == 0 else fn(t) for t in grid])
    return BoundCurve(grid, values, kind)
