"""Regenerative simulation of first-passage times.

The process is observed only at the instants where drift and variance switch.
Inside a segment of length ``tau`` it is a plain Wiener process, so each step
either places the crossing inside the segment (with probability ``G(tau)``)
or moves the state to a draw from the non-crossing law and flips the regime.
Paths are advanced together as numpy arrays.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from ._rng import open_uniform, spawn_generators
from .errors import DomainError
from .laws import SwitchingLaw, law_from_dict
from .samplers import Tolerances, _avoiding_distances, _crossing_times
from .wiener import WienerRegime, fpt_cdf

DEFAULT_STREAMS = 16


@dataclass(frozen=True)
class AlternatingParams:
    """Full model: two regimes, the barrier, the switching laws and the horizon.

    Regime 1 holds for durations drawn from ``law_u`` and regime 2 for
    durations from ``law_d``.  The modelling convention is ``mu1 >= 0 >= mu2``
    (see :attr:`follows_sign_convention`); the simulation itself does not
    rely on it, so it is not enforced here.
    """

    mu1: float
    sigma1: float
    mu2: float
    sigma2: float
    x0: float
    beta: float
    initial_regime: int
    law_u: SwitchingLaw
    law_d: SwitchingLaw
    t_max: float
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        for name in ("mu1", "sigma1", "mu2", "sigma2", "x0", "beta", "t_max"):
            object.__setattr__(self, name, float(getattr(self, name)))
        problems = []
        for name in ("mu1", "mu2", "x0", "beta"):
            if not math.isfinite(getattr(self, name)):
                problems.append(f"{name} must be finite (got {getattr(self, name)!r})")
        for name in ("sigma1", "sigma2", "t_max"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                problems.append(f"{name} must be finite and > 0 (got {value!r})")
        if not self.beta > self.x0:
            problems.append(f"beta must exceed x0 (got beta={self.beta!r}, x0={self.x0!r})")
        if self.initial_regime not in (1, 2):
            problems.append(f"initial_regime must be 1 or 2 (got {self.initial_regime!r})")
        if problems:
            raise DomainError("; ".join(problems))

    @property
    def follows_sign_convention(self):
        return self.mu1 >= 0.0 >= self.mu2

    def regime(self, k):
        return WienerRegime(self.mu1, self.sigma1) if k == 1 else WienerRegime(self.mu2, self.sigma2)

    def law(self, k):
        return self.law_u if k == 1 else self.law_d

    def to_dict(self):
        return {
            "mu1": self.mu1,
            "sigma1": self.sigma1,
            "mu2": self.mu2,
            "sigma2": self.sigma2,
            "x0": self.x0,
            "beta": self.beta,
            "initial_regime": self.initial_regime,
            "law_u": self.law_u.to_dict(),
            "law_d": self.law_d.to_dict(),
            "t_max": self.t_max,
            "tolerances": self.tolerances.to_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise DomainError(f"unknown model parameter(s): {sorted(unknown)}")
        missing = known - set(d) - {"tolerances"}
        if missing:
            raise DomainError(f"missing model parameter(s): {sorted(missing)}")
        kwargs = dict(d)
        kwargs["law_u"] = law_from_dict(d["law_u"])
        kwargs["law_d"] = law_from_dict(d["law_d"])
        kwargs["tolerances"] = Tolerances(**d.get("tolerances", {}))
        kwargs["initial_regime"] = int(d["initial_regime"])
        return cls(**kwargs)


@dataclass(frozen=True)
class Crossed:
    time: float


@dataclass(frozen=True)
class Censored:
    t_max: float


FptOutcome = Union[Crossed, Censored]


@dataclass(frozen=True)
class OutcomeBatch(Sequence):
    """Outcomes of many runs stored column-wise.

    ``times`` holds the crossing time for crossed runs and ``nan`` otherwise.
    Indexing yields :class:`Crossed` / :class:`Censored` values.
    """

    times: np.ndarray
    t_max: float

    @property
    def crossed(self):
        return ~np.isnan(self.times)

    @property
    def crossing_times(self):
        return self.times[self.crossed]

    @property
    def n_censored(self):
        return int(np.isnan(self.times).sum())

    @property
    def censored_fraction(self):
        return self.n_censored / len(self)

    def __len__(self):
        return self.times.size

    def __getitem__(self, i):
        if isinstance(i, slice):
            return OutcomeBatch(self.times[i], self.t_max)
        t = self.times[i]
        return Censored(self.t_max) if np.isnan(t) else Crossed(float(t))

    def __eq__(self, other):
        if not isinstance(other, OutcomeBatch):
            return NotImplemented
        return self.t_max == other.t_max and np.array_equal(self.times, other.times, equal_nan=True)

    __hash__ = None


def _run_paths(params: AlternatingParams, n, rng, trace=None):
    """Advance ``n`` independent paths to crossing or censoring."""
    tol = params.tolerances
    dist = np.full(n, params.beta - params.x0, dtype=float)
    t = np.zeros(n)
    k = np.full(n, params.initial_regime, dtype=np.int8)
    times = np.full(n, np.nan)
    active = np.arange(n)

    while active.size:
        active = active[t[active] < params.t_max]
        if not active.size:
            break
        if trace is not None:
            trace.append((active.copy(), t[active].copy(), params.beta - dist[active], k[active].copy()))
        ka = k[active]
        in_u = ka == 1
        tau = np.empty(active.size)
        tau[in_u] = params.law_u.sample(rng, int(in_u.sum()))
        tau[~in_u] = params.law_d.sample(rng, int((~in_u).sum()))
        mu = np.where(in_u, params.mu1, params.mu2)
        sigma = np.where(in_u, params.sigma1, params.sigma2)
        d = dist[active]

        # Crossings after t_max are censored, so only the part of the segment
        # inside the horizon needs a crossing time.  Sampling on (0, min(tau,
        # remaining)) keeps the box rejection narrow for very long segments.
        remaining = params.t_max - t[active]
        window = np.minimum(tau, remaining)
        p = fpt_cdf(mu, sigma, d, window)
        u = open_uniform(rng, active.size)
        # p < eps1 is handled as a certain survival of the segment.
        hit = (p >= tol.eps1) & (u <= p)
        if hit.any():
            theta = _crossing_times(mu[hit], sigma[hit], d[hit], window[hit], tol.eps2, rng)
            times[active[hit]] = np.minimum(t[active[hit]] + theta, params.t_max)

        # Segments reaching past t_max end the run censored whether or not the
        # barrier is crossed later on, so their end state is never needed.
        stay = ~hit & (tau < remaining)
        idx = active[stay]
        if idx.size:
            dist[idx] = _avoiding_distances(mu[stay], sigma[stay], d[stay], tau[stay], tol.eps3, rng)
            t[idx] += tau[stay]
            k[idx] = 3 - k[idx]
        active = idx
    return times


def simulate_fpt(params: AlternatingParams, rng, trace=None) -> FptOutcome:
    """Simulate one path and return its outcome.

    If ``trace`` is a list, ``(t, x, k)`` is appended at every switch instant
    visited before the outcome is decided.
    """
    steps = [] if trace is not None else None
    times = _run_paths(params, 1, rng, steps)
    if trace is not None:
        trace.extend((float(s[1][0]), float(s[2][0]), int(s[3][0])) for s in steps)
    t = times[0]
    return Censored(params.t_max) if np.isnan(t) else Crossed(float(t))


def _chunk_sizes(n, parts):
    base, extra = divmod(n, parts)
    return [base + (i < extra) for i in range(parts)]


def simulate_batch(params: AlternatingParams, n, seed, n_streams=DEFAULT_STREAMS, workers=1):
    """Simulate ``n`` independent runs, reproducibly for a given ``(seed, n_streams)``.

    The runs are split into ``n_streams`` chunks, each driven by its own
    counter-based generator spawned from ``seed``; results are concatenated in
    stream order, so ``workers`` affects speed only.
    """
    if n < 1:
        raise DomainError(f"sample count must be >= 1, got {n!r}")
    sizes = _chunk_sizes(int(n), n_streams)
    rngs = spawn_generators(seed, n_streams)
    jobs = [(size, rng) for size, rng in zip(sizes, rngs) if size]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _run_paths(params, *job), jobs))
    else:
        parts = [_run_paths(params, size, rng) for size, rng in jobs]
    return OutcomeBatch(np.concatenate(parts), params.t_max)
