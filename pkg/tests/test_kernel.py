import math

import numpy as np
import pytest

from conftest import kernel, random_interior
from eggbergman.domain import DomainError, EggDomain, defining_function
from eggbergman.kernel import (
    KernelParams,
    RESIDUAL_TOL,
    bergman_kernel,
    coefficient_residual,
    g_sigma,
    kernel_gradient,
    lemma1_ratio,
    lemma2_integral,
    lemma2_ratio,
    lemma2_series,
    solve_kernel_coefficients,
    t_quadrature,
    weighted_ball_kernel,
)
from eggbergman.quadrature import weighted_volume
from eggbergman.sampling import SamplerSpec, points_at_levels, sample_uniform

DOMAINS = [(1, 1), (2, 1), (1, 2)]


@pytest.mark.parametrize("n,m", DOMAINS)
@pytest.mark.parametrize("a", [0.5, 1.0, 1.5, 2.0])
@pytest.mark.parametrize("sigma", [0.0, 1.0, -0.5])
def test_solve_is_consistent(n, m, a, sigma):
    kp = kernel(a, sigma, n, m)
    assert kp.residual <= RESIDUAL_TOL
    assert coefficient_residual(kp) <= RESIDUAL_TOL
    # normalization fixes constants
    total = kp.c_sigma * sum(kp.coeffs).real * weighted_volume(kp.domain, sigma)
    assert total == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n,m", DOMAINS)
@pytest.mark.parametrize("sigma", [0.0, 1.0])
def test_ball_kernel_recovered(n, m, sigma, rng):
    kp = kernel(1.0, sigma, n, m)
    coeffs = np.abs(kp.coeffs)
    assert np.all(coeffs[: n + 1] <= 1e-8 * coeffs[n + 1])
    d = kp.domain
    p = random_interior(d, rng, 100)
    q = random_interior(d, rng, 100)
    r = bergman_kernel(kp, p, q) / weighted_ball_kernel(d.dim, sigma, p, q)
    assert np.max(np.abs(r / r.mean() - 1)) < 1e-6
    # C_sigma K is then exactly the normalized ball kernel
    assert kp.c_sigma * r.mean() == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize("a", [0.5, 2.0])
def test_kernel_structure(a, rng):
    kp = kernel(a, 1.0)
    d = kp.domain
    p = random_interior(d, rng, 50)
    q = random_interior(d, rng, 50)
    K = bergman_kernel(kp, p, q)
    assert np.max(np.abs(K - np.conj(bergman_kernel(kp, q, p))) / np.abs(K)) < 1e-12
    at_origin = bergman_kernel(kp, p, np.zeros((50, d.dim)))
    assert np.allclose(at_origin, sum(kp.coeffs), rtol=1e-14)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_comparison_function(a, rng):
    kp = kernel(a, 0.5)
    d = kp.domain
    p = random_interior(d, rng, 50)
    q = random_interior(d, rng, 50)
    t = rng.uniform(0.01, 0.99, (50, 1))
    lhs = np.abs(g_sigma(kp, t * p, q))
    assert np.max(np.abs(lhs - np.abs(g_sigma(kp, t * q, p))) / lhs) < 1e-12
    assert g_sigma(kp, np.zeros(2), np.zeros(2)) == pytest.approx(1.0)
    if a == 1.0:
        X = np.sum(p * np.conj(q), axis=1)
        assert np.allclose(g_sigma(kp, p, q), (1 - X) ** (-(0.5 + 1 + 1 + 2) / 2), rtol=1e-13)


@pytest.mark.parametrize("n,m", DOMAINS)
@pytest.mark.parametrize("a", [0.5, 2.0])
def test_gradient_vs_finite_difference(n, m, a, rng):
    kp = kernel(a, 1.0, n, m)
    d = kp.domain
    p = random_interior(d, rng, 20, shrink=0.85)
    q = random_interior(d, rng, 20)
    step = 1e-6
    for k in range(d.dim):
        e = np.zeros(d.dim)
        e[k] = step
        fd = (bergman_kernel(kp, p + e, q) - bergman_kernel(kp, p - e, q)) / (2 * step)
        ana = kernel_gradient(kp, k, p, q)
        assert np.max(np.abs(fd - ana) / np.abs(ana)) < 1e-5


def test_gradient_at_origin(rng):
    # at xi = 0 both pairings vanish: dK/dX = E0 sum c_k and dK/dY = sum c_k (sigma + m + k)
    kp = kernel(0.5, 1.0, 2, 1)
    d = kp.domain
    q = random_interior(d, rng, 5)
    c = np.array(kp.coeffs)
    s = kp.sigma + d.m + np.arange(d.n + 2)
    for k in range(d.dim):
        expect = np.conj(q[:, k]) * (kp.base_exponent * c.sum() if k < d.n else (c * s).sum())
        assert np.allclose(kernel_gradient(kp, k, np.zeros(d.dim), q), expect, rtol=1e-13)
    with pytest.raises(IndexError):
        kernel_gradient(kp, 3, np.zeros(3), q[0])


def test_boundary_points_rejected():
    kp = kernel(1.0, 0.0)
    with pytest.raises(DomainError):
        bergman_kernel(kp, np.array([1.0, 0.0]), np.zeros(2))
    with pytest.raises(DomainError):
        lemma1_ratio(kp, 0, np.zeros(2), np.array([0.0, 1.2]))


def test_record_round_trip():
    kp = kernel(0.5, 1.0, 2, 1)
    back = KernelParams.from_record(kp.to_record())
    assert back == kp
    with pytest.raises(ValueError):
        KernelParams.from_record("n 1\nm 1\n")
    with pytest.raises(ValueError):
        solve_kernel_coefficients(EggDomain(1, 1, 1.0), -1.0)


def test_t_rule_resolves_near_singular_integrands():
    t, w, gap = t_quadrature(32, 1e-9)
    assert np.sum(w) == pytest.approx(1.0, rel=1e-13)
    assert np.sum(w * t**3) == pytest.approx(0.25, rel=1e-12)
    for eps in (1e-2, 1e-5, 1e-8):
        for beta in (0.5, 1.0, 2.0, 3.0):
            got = np.sum(w * (eps + gap) ** (-beta))
            if beta == 1.0:
                exact = math.log((1 + eps) / eps)
            else:
                exact = (eps ** (1 - beta) - (1 + eps) ** (1 - beta)) / (beta - 1)
            # a few 1e-6 at worst, far below the MC error it feeds into
            assert got == pytest.approx(exact, rel=1e-5)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_lemma2_origin(a):
    kp = kernel(a, 1.0)
    d = kp.domain
    vol = weighted_volume(d, 0.5)
    assert lemma2_series(d, 1.0, 0.5, np.zeros(2)) == pytest.approx(vol, rel=1e-12)
    # G_sigma(0, .) = 1, so the MC estimate targets the weighted volume
    mc = lemma2_integral(kp, 0.5, np.zeros(2), SamplerSpec(50_000, seed=1))
    assert mc.within(vol, 4.0)
    assert lemma2_ratio(kp, 0.5, np.zeros(2), SamplerSpec(50_000, seed=1)) == mc.estimate.real
    with pytest.raises(ValueError):
        lemma2_ratio(kp, 2.0, np.zeros(2), SamplerSpec(10))


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("h", [0.2, 1e-2])
def test_lemma2_series_matches_mc(a, h):
    kp = kernel(a, 1.0)
    d = kp.domain
    base = sample_uniform(d, SamplerSpec(3, seed=11))
    for xi in points_at_levels(d, base, [h] * 3):
        mc = lemma2_integral(kp, 0.5, xi, SamplerSpec(100_000, seed=3))
        exact = lemma2_series(d, 1.0, 0.5, xi)
        assert mc.within(exact, 4.0), (xi, mc, exact)
        assert float(defining_function(d, xi)) == pytest.approx(h, rel=1e-10)
