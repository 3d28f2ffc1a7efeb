"""Scenario configuration, the geometric price mapping and named presets."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional

from .engine import AlternatingParams
from .errors import DomainError
from .laws import Exponential, GeneralizedPareto, InverseGaussian
from .samplers import Tolerances

CONFIG_SCHEMA = "altfpt.config/1"
DEFAULT_N = 1_000_000
DEFAULT_SEED = 20040601

# Inverse-Gaussian switching-time and moment estimates for the moisture model.
MOISTURE = dict(
    l1=0.7518, m1=1.4215, l2=0.5073, m2=1.0476,
    mu1=0.2313, sigma1=0.3792, mu2=-0.3139, sigma2=0.4616,
)
FIG2_BETAS = (0.3, 0.5, 0.7, 0.9)


@dataclass(frozen=True)
class GeometricBarrier:
    """Start price ``s0`` and price barrier ``beta_s`` of an exponential model."""

    s0: float
    beta_s: float

    def __post_init__(self):
        geometric_to_additive(self.s0, self.beta_s)

    def additive(self):
        return geometric_to_additive(self.s0, self.beta_s)


def geometric_to_additive(s0, beta_s):
    """Map a price start and barrier to ``(x0, beta) = (0, ln(beta_s / s0))``."""
    if not (math.isfinite(s0) and s0 > 0):
        raise DomainError(f"start price must be > 0, got {s0!r}")
    if not (math.isfinite(beta_s) and beta_s > s0):
        raise DomainError(f"price barrier must exceed the start price: s0={s0!r}, beta_s={beta_s!r}")
    return 0.0, math.log(beta_s / s0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Model parameters plus simulation, estimation and bound-grid settings."""

    params: AlternatingParams
    name: str = "custom"
    n: int = DEFAULT_N
    seed: int = DEFAULT_SEED
    bandwidth: Optional[float] = None
    grid_points: int = 512
    bound_points: int = 200
    bound_t_max: Optional[float] = None
    geometric: Optional[GeometricBarrier] = None

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n!r}")
        if self.bandwidth is not None and not self.bandwidth > 0:
            raise DomainError(f"bandwidth must be > 0, got {self.bandwidth!r}")
        if self.grid_points < 2 or self.bound_points < 2:
            raise DomainError("grids need at least 2 points")
        if self.geometric is not None:
            x0, beta = self.geometric.additive()
            if not (math.isclose(self.params.x0, x0, abs_tol=1e-12)
                    and math.isclose(self.params.beta, beta, rel_tol=1e-12)):
                raise DomainError(
                    f"model barrier (x0={self.params.x0}, beta={self.params.beta}) does not match "
                    f"the price barrier, which maps to (x0={x0}, beta={beta})"
                )

    @property
    def bounds_horizon(self):
        return self.bound_t_max if self.bound_t_max is not None else self.params.t_max

    def replace(self, **changes):
        """Copy with updated settings; ``t_max`` and ``beta`` reach into the model."""
        model = {}
        for key in ("t_max", "beta"):
            if key in changes:
                model[key] = changes.pop(key)
        params = dataclasses.replace(self.params, **model) if model else self.params
        return dataclasses.replace(self, params=params, **changes)

    def to_dict(self):
        d = {
            "schema": CONFIG_SCHEMA,
            "name": self.name,
            "model": self.params.to_dict(),
            "n": self.n,
            "seed": self.seed,
            "bandwidth": self.bandwidth,
            "grid_points": self.grid_points,
            "bound_points": self.bound_points,
            "bound_t_max": self.bound_t_max,
        }
        if self.geometric is not None:
            d["geometric"] = {"s0": self.geometric.s0, "beta_s": self.geometric.beta_s}
        return d

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise DomainError("config must be a JSON object")
        schema = d.get("schema")
        if schema != CONFIG_SCHEMA:
            raise DomainError(f"unsupported config schema {schema!r}; expected {CONFIG_SCHEMA!r}")
        allowed = {"schema", "name", "model", "n", "seed", "bandwidth", "grid_points",
                   "bound_points", "bound_t_max", "geometric"}
        unknown = set(d) - allowed
        if unknown:
            raise DomainError(f"unknown config field(s): {sorted(unknown)}")
        if "model" not in d:
            raise DomainError("config is missing the 'model' section")
        model = dict(d["model"])
        geometric = None
        if d.get("geometric") is not None:
            g = d["geometric"]
            geometric = GeometricBarrier(float(g["s0"]), float(g["beta_s"]))
            x0, beta = geometric.additive()
            model.setdefault("x0", x0)
            model.setdefault("beta", beta)
        kwargs = {k: d[k] for k in ("name", "n", "seed", "grid_points", "bound_points") if k in d}
        for key in ("bandwidth", "bound_t_max"):
            if d.get(key) is not None:
                kwargs[key] = float(d[key])
        for key in ("n", "seed", "grid_points", "bound_points"):
            if key in kwargs:
                kwargs[key] = int(kwargs[key])
        return cls(params=AlternatingParams.from_dict(model), geometric=geometric, **kwargs)


def fig1():
    """Exponential switching with rates 1/2 and 2, strongly diffusive second regime."""
    params = AlternatingParams(
        mu1=1.0, sigma1=1.0, mu2=-1.0, sigma2=math.sqrt(10.0),
        x0=0.0, beta=3.0, initial_regime=2,
        law_u=Exponential(0.5), law_d=Exponential(2.0),
        t_max=20.0, tolerances=Tolerances(),
    )
    return ScenarioConfig(params, name="fig1", bound_t_max=10.0)


def fig2(beta=FIG2_BETAS[0]):
    """Moisture model with inverse-Gaussian wet and dry durations."""
    m = MOISTURE
    params = AlternatingParams(
        mu1=m["mu1"], sigma1=m["sigma1"], mu2=m["mu2"], sigma2=m["sigma2"],
        x0=0.0, beta=beta, initial_regime=1,
        law_u=InverseGaussian(m["m1"], m["l1"]), law_d=InverseGaussian(m["m2"], m["l2"]),
        t_max=50.0, tolerances=Tolerances(),
    )
    return ScenarioConfig(params, name="fig2", bound_t_max=20.0)


def fig3():
    """Asset price with generalized-Pareto trend durations, barrier at twice the start."""
    geometric = GeometricBarrier(1.0, 2.0)
    x0, beta = geometric.additive()
    params = AlternatingParams(
        mu1=1.0, sigma1=1.0, mu2=-1.0, sigma2=1.0,
        x0=x0, beta=beta, initial_regime=1,
        law_u=GeneralizedPareto(1.0, 2.0), law_d=GeneralizedPareto(3.0, 4.0),
        t_max=30.0, tolerances=Tolerances(),
    )
    return ScenarioConfig(params, name="fig3", bound_t_max=10.0, geometric=geometric)


PRESETS = {"fig1": fig1, "fig2": fig2, "fig3": fig3}


def preset(name, **kwargs):
    try:
        factory = PRESETS[name]
    except KeyError:
        raise DomainError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return factory(**kwargs)
