import math

import numpy as np
import pytest
from scipy.special import gammaln

from eggbergman.domain import EggDomain, defining_function
from eggbergman.quadrature import (
    NonFiniteIntegrand,
    SeriesTruncationError,
    WeightedMeasure,
    focused_sample,
    integrate_rejection,
    integrate_weighted,
    monomial_moment,
    psi,
    psi_norm_integral,
    weighted_volume,
)
from eggbergman.sampling import SamplerSpec, points_at_levels, sample_uniform


def test_measure_validation():
    with pytest.raises(ValueError):
        WeightedMeasure(-1)
    with pytest.raises(ValueError):
        weighted_volume(EggDomain(1, 1, 1.0), -1.5)


def test_ball_volume():
    assert weighted_volume(EggDomain(1, 1, 1.0), 0) == pytest.approx(math.pi**2 / 2, rel=1e-14)


@pytest.mark.parametrize("n,m,sigma", [(1, 1, 0.0), (2, 1, 1.5), (1, 3, -0.5), (2, 2, 4.0)])
def test_ball_weighted_volume_reduces(n, m, sigma):
    N = n + m
    expect = math.exp(N * math.log(math.pi) + gammaln(sigma + 1) - gammaln(N + sigma + 1))
    assert weighted_volume(EggDomain(n, m, 1.0), sigma) == pytest.approx(expect, rel=1e-13)


@pytest.mark.parametrize("a,sigma", [(0.5, 1.0), (0.5, 0.0), (2.0, 0.5), (1.3, 2.0)])
def test_weighted_volume_vs_rejection(a, sigma):
    d = EggDomain(1, 1, a)
    mc = integrate_rejection(d, sigma, lambda x: np.ones(len(x)), SamplerSpec(400_000, seed=1))
    assert mc.within(weighted_volume(d, sigma), 3.0)
    assert abs(mc.estimate / weighted_volume(d, sigma) - 1) < 0.01


@pytest.mark.parametrize("alpha", [(1, 0), (0, 1), (2, 1), (1, 3)])
def test_monomial_moment_vs_rejection(alpha):
    d = EggDomain(1, 1, 0.5)
    f = lambda x: np.abs(x[:, 0] ** alpha[0] * x[:, 1] ** alpha[1]) ** 2
    mc = integrate_rejection(d, 1.0, f, SamplerSpec(400_000, seed=2))
    assert mc.within(monomial_moment(d, 1.0, alpha), 3.5)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_integrate_weighted_basics(a):
    d = EggDomain(1, 1, a)
    spec = SamplerSpec(200_000, seed=3)
    one = integrate_weighted(d, 1.0, lambda x: np.ones(len(x)), spec)
    assert one.within(weighted_volume(d, 1.0), 3.0)
    odd = integrate_weighted(d, 1.0, lambda x: x[:, 0], spec)
    assert odd.within(0, 3.0)
    imp = integrate_weighted(d, -0.5, lambda x: np.ones(len(x)), spec, importance=True)
    assert imp.estimate == pytest.approx(weighted_volume(d, -0.5), rel=1e-12)


def test_integrate_weighted_reports_bad_point():
    d = EggDomain(1, 1, 1.0)
    with pytest.raises(NonFiniteIntegrand) as err:
        integrate_weighted(d, 0, lambda x: np.where(np.arange(len(x)) == 5, np.nan, 1.0), SamplerSpec(10))
    assert err.value.point.shape == (2,)
    with pytest.raises(ValueError):
        integrate_weighted(d, 0, lambda x: np.ones(3), SamplerSpec(10))


def test_psi_norm_origin():
    d = EggDomain(1, 1, 0.5)
    origin = np.zeros(2)
    for s in (0.0, 1.0, -0.5):
        assert psi_norm_integral(d, s, 0, 2.0, origin) == pytest.approx(weighted_volume(d, s), rel=1e-13)
        assert psi_norm_integral(d, s, 2, 2.0, origin) == 0.0


@pytest.mark.parametrize("a,s", [(0.5, 0.0), (1.0, 1.0), (2.0, 0.0)])
def test_psi_norm_vs_mc(a, s):
    d = EggDomain(1, 1, a)
    at = np.array([0.3, 0.4])
    exact = psi_norm_integral(d, s, 1, 2.0, at)
    mc = integrate_weighted(d, s, lambda x: np.abs(psi(d, 1, 2.0, at, x)) ** 2, SamplerSpec(1_000_000, seed=4))
    assert abs(mc.estimate.real / exact - 1) < 0.02


def test_psi_orthogonality():
    d = EggDomain(1, 1, 0.5)
    at = np.array([0.3, 0.4j])
    b = (d.a * (1 + d.m) + d.n + 2) / 2
    mc = integrate_weighted(d, 1.0, lambda x: psi(d, 0, b, at, x) * np.conj(psi(d, 2, 2 * d.a + b, at, x)),
                            SamplerSpec(400_000, seed=5))
    assert mc.within(0, 3.0)


def test_series_truncation_is_reported():
    d = EggDomain(1, 1, 1.0)
    with pytest.raises(SeriesTruncationError):
        psi_norm_integral(d, 0.0, 0, 3.0, np.array([0.999, 0.0]), series_terms=10)
    with pytest.raises(ValueError):
        psi_norm_integral(d, -1.0, 0, 3.0, np.zeros(2))


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("h", [0.3, 1e-4])
@pytest.mark.parametrize("mu", [0.5, -0.5])
def test_focused_sample_is_unbiased(a, h, mu):
    # the mixture weights must integrate 1 and |z|^2 against h^mu exactly
    d = EggDomain(1, 1, a)
    base = sample_uniform(d, SamplerSpec(1, seed=5))
    xi = points_at_levels(d, base, [h])[0]
    fs = focused_sample(d, mu, xi, SamplerSpec(200_000, seed=1), 0)
    m0, e0 = fs.mean_and_error(np.ones(len(fs.points)))
    m1, e1 = fs.mean_and_error(np.abs(fs.points[:, 0]) ** 2)
    assert abs(m0 - weighted_volume(d, mu)) < 3.5 * e0
    assert abs(m1 - monomial_moment(d, mu, (1, 0))) < 3.5 * e1
    assert np.all(defining_function(d, fs.points) > 0)
