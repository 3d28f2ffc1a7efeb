"""Inter-switch duration laws for the alternating renewal schedule.

Three families are supported: exponential (rate parameterization), inverse
Gaussian (mean/shape) and generalized Pareto (shape/scale).  Each law exposes
``cdf``, ``sf`` (survival), ``pdf`` and ``sample``; the module-level
:func:`law_cdf` and :func:`law_sample` are thin functional wrappers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import log_ndtr, ndtr

from ._rng import open_uniform
from .errors import DomainError


def _check_positive(**kwargs):
    for name, value in kwargs.items():
        if not (math.isfinite(value) and value > 0):
            raise DomainError(f"{name} must be finite and > 0, got {value!r}")


def _as_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise DomainError("switching-law time argument must be >= 0")
    return t


def _unwrap(x):
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class Exponential:
    """Exponential durations with survival ``exp(-rate * t)``."""

    rate: float

    type_tag = "exponential"

    def __post_init__(self):
        _check_positive(rate=self.rate)

    def cdf(self, t):
        t = _as_time(t)
        return _unwrap(-np.expm1(-self.rate * t))

    def sf(self, t):
        t = _as_time(t)
        return _unwrap(np.exp(-self.rate * t))

    def pdf(self, t):
        t = _as_time(t)
        return _unwrap(self.rate * np.exp(-self.rate * t))

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        return _unwrap(-np.log1p(-u) / self.rate)

    def sample(self, rng, size=None):
        return _unwrap(-np.log(open_uniform(rng, size)) / self.rate)

    def to_dict(self):
        return {"type": self.type_tag, "rate": self.rate}


@dataclass(frozen=True)
class InverseGaussian:
    """Inverse Gaussian durations with the given ``mean`` and ``shape``.

    Variates come from the Michael-Schucany-Haas transformation with
    multiple roots; the cdf uses the usual closed form in terms of the
    standard normal cdf.
    """

    mean: float
    shape: float

    type_tag = "inverse_gaussian"

    def __post_init__(self):
        _check_positive(mean=self.mean, shape=self.shape)

    def _pieces(self, t):
        # Returns Phi(a) and exp(2l/m) * Phi(-b) with b = sqrt(l/t)(t/m + 1).
        m, lam = self.mean, self.shape
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.sqrt(lam / t)
            a = r * (t / m - 1.0)
            b = r * (t / m + 1.0)
            second = np.exp(2.0 * lam / m + log_ndtr(-b))
        first = ndtr(a)
        zero = t == 0
        first = np.where(zero, 0.0, first)
        second = np.where(zero, 0.0, second)
        return first, second

    def cdf(self, t):
        t = _as_time(t)
        first, second = self._pieces(t)
        return _unwrap(np.clip(first + second, 0.0, 1.0))

    def sf(self, t):
        t = _as_time(t)
        m, lam = self.mean, self.shape
        with np.errstate(divide="ignore", invalid="ignore"):
            a = np.sqrt(lam / t) * (t / m - 1.0)
        _, second = self._pieces(t)
        upper = np.where(t == 0, 1.0, ndtr(-a))
        return _unwrap(np.clip(upper - second, 0.0, 1.0))

    def pdf(self, t):
        t = _as_time(t)
        m, lam = self.mean, self.shape
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.sqrt(lam / (2.0 * np.pi * t ** 3)) * np.exp(
                -lam * (t - m) ** 2 / (2.0 * m * m * t)
            )
        return _unwrap(np.where(t == 0, 0.0, val))

    def sample(self, rng, size=None):
        m, lam = self.mean, self.shape
        nu = rng.standard_normal(size) ** 2
        mnu = m * nu
        # Smaller root m + m*mnu/(2l) - (m/(2l)) sqrt(4 l mnu + mnu^2), written
        # as m^2 / (larger root) to avoid cancellation when nu is large.
        x2 = m + m * mnu / (2.0 * lam) + (m / (2.0 * lam)) * np.sqrt(
            4.0 * lam * mnu + mnu * mnu
        )
        x1 = m * m / x2
        u = open_uniform(rng, size)
        out = np.where(u <= m / (m + x1), x1, m * m / x1)
        return _unwrap(out)

    def to_dict(self):
        return {"type": self.type_tag, "mean": self.mean, "shape": self.shape}


@dataclass(frozen=True)
class GeneralizedPareto:
    """Generalized Pareto durations, ``F(t) = 1 - (1 + xi t / eta)^(-1/xi)``."""

    xi: float
    eta: float

    type_tag = "pareto"

    def __post_init__(self):
        _check_positive(xi=self.xi, eta=self.eta)

    def _log_sf(self, t):
        return -np.log1p(self.xi * t / self.eta) / self.xi

    def cdf(self, t):
        t = _as_time(t)
        return _unwrap(-np.expm1(self._log_sf(t)))

    def sf(self, t):
        t = _as_time(t)
        return _unwrap(np.exp(self._log_sf(t)))

    def pdf(self, t):
        t = _as_time(t)
        z = 1.0 + self.xi * t / self.eta
        return _unwrap(z ** (-1.0 / self.xi - 1.0) / self.eta)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        return _unwrap((self.eta / self.xi) * np.expm1(-self.xi * np.log1p(-u)))

    def sample(self, rng, size=None):
        return self.ppf(open_uniform(rng, size))

    def to_dict(self):
        return {"type": self.type_tag, "xi": self.xi, "eta": self.eta}


SwitchingLaw = Union[Exponential, InverseGaussian, GeneralizedPareto]

_LAW_TYPES = {
    "exponential": (Exponential, ("rate",)),
    "inverse_gaussian": (InverseGaussian, ("mean", "shape")),
    "pareto": (GeneralizedPareto, ("xi", "eta")),
}


def law_from_dict(record):
    """Build a law from a tagged record such as ``{"type": "pareto", ...}``."""
    try:
        tag = record["type"]
    except (KeyError, TypeError):
        raise DomainError(f"switching law record needs a 'type' field: {record!r}")
    if tag not in _LAW_TYPES:
        raise DomainError(
            f"unknown switching law type {tag!r}; expected one of {sorted(_LAW_TYPES)}"
        )
    cls, fields = _LAW_TYPES[tag]
    extra = set(record) - set(fields) - {"type"}
    missing = [f for f in fields if f not in record]
    if missing or extra:
        raise DomainError(
            f"{tag} law expects fields {list(fields)}; missing {missing}, unexpected {sorted(extra)}"
        )
    return cls(*(float(record[f]) for f in fields))


def law_cdf(law: SwitchingLaw, t):
    return law.cdf(t)


def law_survival(law: SwitchingLaw, t):
    return law.sf(t)


def law_sample(law: SwitchingLaw, rng, size=None):
    return law.sample(rng, size)
