import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from altfpt.density import (
    default_bandwidth,
    default_grid,
    empirical_cdf,
    epanechnikov,
    epanechnikov_cdf,
    estimate_cdf,
    estimate_density,
)
from altfpt.engine import AlternatingParams, simulate_batch
from altfpt.errors import DomainError
from altfpt.laws import Exponential
from altfpt.scenarios import preset
from altfpt.wiener import fpt_pdf

K0 = 3 / (4 * math.sqrt(5))


def test_kernel_values_and_mass():
    assert epanechnikov(0.0) == pytest.approx(K0, rel=1e-15)
    assert epanechnikov(math.sqrt(5)) == 0.0 and epanechnikov(-math.sqrt(5)) == 0.0
    assert epanechnikov(3.0) == 0.0
    mass, _ = quad(epanechnikov, -3, 3, points=[-math.sqrt(5), math.sqrt(5)])
    assert mass == pytest.approx(1.0, abs=1e-12)
    var, _ = quad(lambda t: t * t * epanechnikov(t), -3, 3, points=[-math.sqrt(5), math.sqrt(5)])
    assert var == pytest.approx(1.0, abs=1e-12)


@given(st.floats(-4, 4))
def test_kernel_cdf_is_integral(t):
    val, _ = quad(epanechnikov, -3, t, points=[p for p in (-math.sqrt(5), math.sqrt(5)) if -3 < p < t] or None)
    assert epanechnikov_cdf(t) == pytest.approx(val, abs=1e-12)


def test_single_sample():
    grid = np.linspace(0, 4, 401)
    est = estimate_density([2.0], 1, 0.5, grid)
    assert est.h_hat.max() == pytest.approx(K0 / 0.5, rel=1e-14)
    assert grid[est.h_hat.argmax()] == pytest.approx(2.0)
    assert np.allclose(est.h_hat, epanechnikov((grid - 2.0) / 0.5) / 0.5, rtol=0, atol=1e-15)


def test_mass_equals_crossing_fraction():
    rng = np.random.default_rng(0)
    x = rng.gamma(2.0, 1.0, 5000)
    times = np.concatenate([x, np.full(1250, np.nan)])
    bw = default_bandwidth(times)
    grid = np.linspace(x.min() - 3 * bw, x.max() + 3 * bw, 20_000)
    est = estimate_density(times, times.size, bw, grid)
    assert est.n_censored == 1250 and est.crossing_fraction == pytest.approx(0.8)
    area = np.sum(np.diff(grid) * (est.h_hat[1:] + est.h_hat[:-1]) / 2)
    assert area == pytest.approx(0.8, abs=1e-3)
    cdf = estimate_cdf(est)
    assert cdf[-1] == pytest.approx(0.8, abs=1e-3)
    assert np.all(est.h_hat >= 0)


def test_symmetric_samples_give_symmetric_estimate():
    rng = np.random.default_rng(1)
    half = rng.uniform(0, 3, 200)
    c = 5.0
    samples = np.concatenate([c - half, c + half])
    grid = c + np.linspace(-4, 4, 161)
    h = estimate_density(samples, samples.size, 0.4, grid).h_hat
    assert np.allclose(h, h[::-1], rtol=1e-12, atol=0)


def test_cdf_nondecreasing_and_boundary_leakage():
    rng = np.random.default_rng(2)
    x = rng.exponential(1.0, 4000)
    bw = default_bandwidth(x)
    est = estimate_density(x, x.size, bw, default_grid(x, bw))
    cdf = estimate_cdf(est)
    assert np.all(np.diff(cdf) >= 0)
    assert 0 <= cdf[0] == est.mass_below_grid
    # Only kernels centred within sqrt5 * bw of 0 can leak below the origin.
    assert est.mass_below_grid <= np.mean(x < math.sqrt(5) * bw)


def test_standard_errors_match_replication():
    rng = np.random.default_rng(3)
    grid = np.array([0.5, 1.0, 2.0])
    reps = np.array([estimate_density(rng.exponential(1.0, 2000), 2500, 0.2, grid).h_hat
                     for _ in range(400)])
    se = estimate_density(rng.exponential(1.0, 2000), 2500, 0.2, grid).se
    assert np.allclose(reps.std(axis=0, ddof=1), se, rtol=0.2)


def test_default_bandwidth():
    rng = np.random.default_rng(4)
    z = rng.standard_normal(1_000_000)
    assert default_bandwidth(z[:10_000]) == pytest.approx(0.9 * 10_000 ** -0.2, rel=0.05)
    assert default_bandwidth(z) < default_bandwidth(z[:10_000])
    assert default_bandwidth([1.0, 1.0, 1.0, 1.0]) == pytest.approx(1e-12)
    # Tied middle quartiles fall back to the standard deviation.
    assert default_bandwidth([1.0] * 10 + [5.0]) > 1e-3
    with pytest.raises(DomainError):
        default_bandwidth([1.0, np.nan])


def test_default_grid():
    x = np.arange(1.0, 1001.0)
    grid = default_grid(x, 2.0)
    assert grid.size == 512 and grid[0] == 0.0
    assert grid[-1] == pytest.approx(np.percentile(x, 99.5) + 2 * math.sqrt(5))


def test_empirical_cdf():
    p, se = empirical_cdf([0.5, 1.5, np.nan, np.nan], 4, [0.0, 1.0, 2.0])
    assert list(p) == [0.0, 0.25, 0.5]
    assert se[2] == pytest.approx(0.25)


def test_validation():
    with pytest.raises(DomainError):
        estimate_density([1.0], 1, 0.1, [])
    with pytest.raises(DomainError):
        estimate_density([1.0], 1, 0.1, [1.0, 0.5])
    with pytest.raises(DomainError):
        estimate_density([1.0], 1, 0.0, [1.0])
    with pytest.raises(DomainError):
        estimate_density([1.0, 2.0], 1, 0.1, [1.0])


def test_integrated_estimate_matches_empirical_cdf_fig1():
    batch = simulate_batch(preset("fig1").params, 100_000, seed=31)
    x = batch.times
    # The rule-of-thumb bandwidth (about 0.3 here) smooths the very steep
    # rise near t = 0.1 by up to 0.026 in cdf; a narrower kernel resolves it.
    bw = 0.05
    grid = default_grid(x, bw, 2048)
    cdf = estimate_cdf(estimate_density(x, len(batch), bw, grid))
    p, se = empirical_cdf(x, len(batch), grid)
    assert np.all(np.abs(cdf - p) <= np.maximum(0.01, 3 * se))
    silverman = default_bandwidth(x)
    grid = default_grid(x, silverman, 2048)
    cdf = estimate_cdf(estimate_density(x, len(batch), silverman, grid))
    p, se = empirical_cdf(x, len(batch), grid)
    late = grid > 0.5
    assert np.all(np.abs(cdf - p)[late] <= np.maximum(0.01, 3 * se[late]))


@pytest.mark.slow
def test_consistency_on_wiener_configuration():
    params = AlternatingParams(1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1, Exponential(1.0), Exponential(1.0), 50.0)
    batch = simulate_batch(params, 1_000_000, seed=32)
    bw = default_bandwidth(batch.times)
    grid = np.linspace(0.2, 4.0, 30)
    est = estimate_density(batch.times, len(batch), bw, grid)
    g = lambda t: fpt_pdf(1.0, 1.0, 1.0, t)
    h = 1e-3
    g2 = (g(grid + h) - 2 * g(grid) + g(grid - h)) / h ** 2
    allowance = est.se + 0.5 * bw ** 2 * np.abs(g2)
    assert np.max(np.abs(est.h_hat - g(grid)) / allowance) < 5


@pytest.mark.slow
@pytest.mark.parametrize("beta", [0.3, 0.9])
def test_estimate_dominates_pdf_lower_bound_fig2(beta):
    from altfpt.bounds import pdf_lower_bound

    params = preset("fig2", beta=beta).params
    batch = simulate_batch(params, 100_000, seed=5)
    grid = np.linspace(0.0, 20.0, 101)
    lower = np.array([0.0 if t == 0 else pdf_lower_bound(1, t, params) for t in grid])
    # A narrow kernel keeps smoothing bias on the steep initial rise below the noise.
    bw = 0.015
    est = estimate_density(batch.times, len(batch), bw, grid)
    # Where the window holds no crossing the plug-in se is 0; floor it at the
    # contribution of a single run.
    se = np.maximum(est.se, K0 / (len(batch) * bw))
    assert np.all(est.h_hat >= lower - 3 * se)
