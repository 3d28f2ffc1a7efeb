import math

import numpy as np
import pytest

from altfpt.engine import AlternatingParams, Censored, Crossed, OutcomeBatch, simulate_batch, simulate_fpt
from altfpt.errors import DomainError
from altfpt.laws import Exponential, GeneralizedPareto, InverseGaussian
from altfpt.scenarios import preset
from altfpt.wiener import fpt_cdf

HUGE = GeneralizedPareto(1.0, 1e12)


def ecdf(batch, t):
    times = batch.crossing_times
    p = np.array([np.count_nonzero(times <= s) for s in np.atleast_1d(t)]) / len(batch)
    return p, np.sqrt(p * (1 - p) / len(batch))


def params(**kw):
    base = dict(mu1=1.0, sigma1=1.0, mu2=-1.0, sigma2=1.0, x0=0.0, beta=2.0, initial_regime=1,
                law_u=Exponential(1.0), law_d=Exponential(1.0), t_max=20.0)
    base.update(kw)
    return AlternatingParams(**base)


def test_identical_regimes_reduce_to_wiener():
    p = params(mu1=0.5, sigma1=2.0, mu2=0.5, sigma2=2.0, law_u=InverseGaussian(0.3, 0.5),
               law_d=Exponential(3.0))
    batch = simulate_batch(p, 40_000, seed=101)
    t = np.array([0.25, 0.5, 1.0, 2.0, 5.0])
    emp, se = ecdf(batch, t)
    assert np.all(np.abs(emp - fpt_cdf(0.5, 2.0, 2.0, t)) < 3 * np.maximum(se, 1e-4))


def test_long_first_segment_is_a_single_wiener_segment():
    p = params(law_u=HUGE, law_d=HUGE, t_max=50.0)
    batch = simulate_batch(p, 20_000, seed=5)
    t = np.array([0.5, 1.0, 2.0, 4.0, 10.0])
    emp, se = ecdf(batch, t)
    assert np.all(np.abs(emp - fpt_cdf(1.0, 1.0, 2.0, t)) < 3 * np.maximum(se, 1e-4))


def test_negative_regime_crossing_fraction():
    p = params(initial_regime=2, beta=1.0, law_u=HUGE, law_d=HUGE, t_max=200.0)
    batch = simulate_batch(p, 50_000, seed=6)
    frac = 1 - batch.censored_fraction
    limit = math.exp(-2.0)
    se = math.sqrt(limit * (1 - limit) / len(batch))
    assert frac <= limit + 3 * se
    assert frac >= float(fpt_cdf(-1.0, 1.0, 1.0, 200.0)) - 3 * se


def test_batch_is_deterministic_and_worker_independent():
    p = preset("fig1").params
    a = simulate_batch(p, 3000, seed=42)
    b = simulate_batch(p, 3000, seed=42)
    c = simulate_batch(p, 3000, seed=42, workers=3)
    assert a == b == c
    assert simulate_batch(p, 3000, seed=43) != a


def test_disjoint_seeds_agree():
    p = preset("fig1").params
    a = simulate_batch(p, 20_000, seed=1)
    b = simulate_batch(p, 20_000, seed=2)
    t = np.linspace(0.1, 20.0, 20)
    pa, sa = ecdf(a, t)
    pb, sb = ecdf(b, t)
    assert np.all(np.abs(pa - pb) <= 3 * np.hypot(sa, sb))


def test_trace_alternates_and_time_increases():
    p = preset("fig1").params
    rng = np.random.default_rng(7)
    for _ in range(200):
        trace = []
        out = simulate_fpt(p, rng, trace)
        assert trace[0] == (0.0, 0.0, 2)
        ts = [s[0] for s in trace]
        ks = [s[2] for s in trace]
        assert all(b > a for a, b in zip(ts, ts[1:]))
        assert all(k2 == 3 - k1 for k1, k2 in zip(ks, ks[1:]))
        assert all(s[1] < p.beta for s in trace)
        assert all(t <= p.t_max for t in ts)
        if isinstance(out, Crossed):
            assert ts[-1] < out.time <= p.t_max
        else:
            assert out == Censored(p.t_max)


def test_crossing_times_positive_and_bounded():
    batch = simulate_batch(preset("fig3").params, 20_000, seed=9)
    times = batch.crossing_times
    assert np.all((times > 0) & (times <= batch.t_max))
    assert 0 < batch.censored_fraction < 1


def test_higher_barrier_crosses_later():
    a = simulate_batch(params(beta=2.0), 20_000, seed=10)
    b = simulate_batch(params(beta=3.0), 20_000, seed=10)
    t = np.linspace(0.2, 20, 30)
    pa, sa = ecdf(a, t)
    pb, _ = ecdf(b, t)
    assert np.all(pb <= pa + 3 * np.maximum(sa, 1e-4))


def test_equal_variances_stay_below_first_regime_cdf():
    p = preset("fig3").params
    batch = simulate_batch(p, 20_000, seed=11)
    t = np.linspace(0.05, 30, 40)
    emp, se = ecdf(batch, t)
    assert np.all(emp <= fpt_cdf(p.mu1, p.sigma1, p.beta - p.x0, t) + 3 * np.maximum(se, 1e-4))


def test_outcome_batch_sequence_protocol():
    b = OutcomeBatch(np.array([1.5, np.nan, 0.2]), 10.0)
    assert len(b) == 3 and b.n_censored == 1
    assert list(b) == [Crossed(1.5), Censored(10.0), Crossed(0.2)]
    assert b[1:] == OutcomeBatch(np.array([np.nan, 0.2]), 10.0)
    assert b.censored_fraction == pytest.approx(1 / 3)


def test_params_validation_and_roundtrip():
    p = params(beta=3, x0=1)
    assert isinstance(p.beta, float)
    assert AlternatingParams.from_dict(p.to_dict()) == p
    assert p.follows_sign_convention
    assert not params(mu2=1.0).follows_sign_convention
    for bad in (dict(sigma1=0.0), dict(beta=0.0), dict(initial_regime=3), dict(t_max=-1.0),
                dict(mu1=float("nan"))):
        with pytest.raises(DomainError):
            params(**bad)
    with pytest.raises(DomainError):
        AlternatingParams.from_dict({**p.to_dict(), "gamma": 1.0})
    with pytest.raises(DomainError):
        simulate_batch(p, 0, seed=1)


@pytest.mark.slow
def test_full_size_fig1_batch():
    batch = simulate_batch(preset("fig1").params, 1_000_000, seed=12)
    assert len(batch) == 1_000_000
    assert 0 < batch.censored_fraction < 1
