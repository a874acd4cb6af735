"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line, echoed at the end of the run.
The one case known not to hold numerically (the comparison-integral bound
at a=2) runs as its own strict xfail so that the rest of criterion 8
still reports on its own.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from conftest import ACCEPTANCE_LINES, kernel, random_interior
from eggbergman.cli import RunConfig, run_suite
from eggbergman.domain import EggDomain
from eggbergman.gamma_tools import (
    Ineq56Params,
    gamma_ratio,
    index_grid,
    ineq5_ratio,
    ineq6_ratio,
    log_gamma,
    sup_constant,
    tail_profile,
)
from eggbergman.kernel import weighted_ball_kernel, bergman_kernel
from eggbergman.report import strip_timestamps
from eggbergman.suites import suite_kernel, suite_lemma1, suite_lemma2, suite_parseval, suite_schur
from eggbergman.taylor import (
    GaussRational,
    TaylorPoly,
    evaluate,
    gleason_decompose,
    leibenson_component,
    multiplier_transform,
    partial_derivative,
    random_poly,
    reassemble,
)

SHAPES = [(1, 1), (2, 1), (1, 2)]
EGGS = [0.5, 1.0, 2.0]


def record(num, ok, summary):
    ACCEPTANCE_LINES.append(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {summary}")


def kernels_for(cfg):
    return lambda sigma: kernel(cfg.a, sigma, cfg.n, cfg.m)


def failing(reports):
    return [f"{r.suite}/{r.check}{r.params.get('a', '')}" for r in reports if not r.passed]


def test_criterion_1_order_one_identity():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    bad_exact, worst_float = 0, 0.0
    for i in range(500):
        n, m = SHAPES[i % 3]
        N = n + m
        f = random_poly(rng, N, 8, nterms=10)
        for g in (f, f.to_float()):
            total = TaylorPoly(N)
            for k in range(N):
                total = total + TaylorPoly.variable(N, k) * leibenson_component(g, k)
            target = g - g.constant_term()
            if g.exact:
                bad_exact += total != target
            else:
                worst_float = max(worst_float, total.max_abs_diff(target))
    elapsed = time.perf_counter() - start
    ok = bad_exact == 0 and worst_float <= 1e-12 and elapsed < 10
    record(1, ok, f"500 polys: exact mismatches {bad_exact}, float err {worst_float:.1e}, {elapsed:.1f}s")
    assert ok


def test_criterion_2_order_m_identity():
    rng = np.random.default_rng(102)
    start = time.perf_counter()
    bad = 0
    for i in range(200):
        order = 2 + i % 3
        n, m = SHAPES[(i // 3) % 3]
        f = random_poly(rng, n + m, 8, nterms=8, min_order=order)
        bad += reassemble(gleason_decompose(f, order), n + m) != f
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 30
    record(2, ok, f"200 polys of order 2..4: mismatches {bad}, {elapsed:.1f}s")
    assert ok


def test_criterion_3_multiplier():
    rng = np.random.default_rng(103)
    bad_identity, bad_rule = 0, 0
    for i in range(500):
        n, m = SHAPES[i % 3]
        N = n + m
        f = random_poly(rng, N, 8, nterms=10)
        for k in range(N):
            g = multiplier_transform(f, k)
            bad_identity += g != TaylorPoly.variable(N, k) * leibenson_component(f, k)
            for alpha, c in f.terms.items():
                expect = c * Fraction(alpha[k], sum(alpha)) if sum(alpha) else GaussRational()
                bad_rule += g.coeff(alpha) != expect
    alpha = (1, 2, 0)
    spot = multiplier_transform(TaylorPoly.monomial(3, alpha), 0)
    spot_ok = spot == TaylorPoly.monomial(3, alpha, Fraction(1, 3))
    ok = bad_identity == 0 and bad_rule == 0 and spot_ok
    record(3, ok, f"500 polys: identity mismatches {bad_identity}, rule mismatches {bad_rule}, "
                  f"xi1 xi2^2 -> {spot.coeff(alpha).re} xi1 xi2^2")
    assert ok


def _ray_quad(f, k, p):
    df = partial_derivative(f, k)
    re = quad(lambda t: evaluate(df, t * p).real, 0, 1, epsabs=1e-14, epsrel=1e-13)[0]
    im = quad(lambda t: evaluate(df, t * p).imag, 0, 1, epsabs=1e-14, epsrel=1e-13)[0]
    return complex(re, im)


def test_criterion_4_ray_integral():
    rng = np.random.default_rng(104)
    worst = 0.0
    for i in range(20):
        n, m = SHAPES[i % 3]
        d = EggDomain(n, m, EGGS[i % 3])
        f = random_poly(rng, d.dim, 8, nterms=8, exact=False)
        for p in random_interior(d, rng, 20, shrink=1.0):
            k = int(rng.integers(d.dim))
            got = evaluate(leibenson_component(f, k), p)
            worst = max(worst, abs(got - _ray_quad(f, k, p)))
    ok = worst <= 1e-10
    record(4, ok, f"20 polys x 20 points: max |T_k f - quadrature| {worst:.1e} (tol 1e-10)")
    assert ok


@pytest.mark.slow
def test_criterion_5_closed_forms_vs_mc():
    bad, worst, slow = [], 0.0, 0.0
    for a in EGGS:
        start = time.perf_counter()
        cfg = RunConfig(a=a, samples=1_000_000, seed=5, suites=("parseval",))
        reports = [r for r in suite_parseval(cfg, kernels_for(cfg))
                   if r.check.startswith(("weighted-volume", "psi-norm", "ball-volume"))]
        slow = max(slow, time.perf_counter() - start)
        bad += failing(reports)
        worst = max([worst] + [r.estimate for r in reports if r.check != "ball-volume"])
    ok = not bad and worst <= 0.02 and slow < 120
    record(5, ok, f"a in {EGGS}, sigma in [0, 1]: worst relative error {worst:.2%} (tol 2%), "
                  f"slowest tuple {slow:.0f}s" + (f"; failing {bad}" if bad else ""))
    assert ok


@pytest.mark.slow
def test_criterion_6_kernel_recovery():
    rng = np.random.default_rng(106)
    dev = 0.0
    for sigma in (0.0, 1.0):
        kp = kernel(1.0, sigma)
        d = kp.domain
        p, q = random_interior(d, rng, 100), random_interior(d, rng, 100)
        r = bergman_kernel(kp, p, q) / weighted_ball_kernel(d.dim, sigma, p, q)
        dev = max(dev, float(np.max(np.abs(r / r.mean() - 1))))
    worst, bad = 0.0, []
    for a in EGGS:
        for sigma in (0.0, 1.0):
            cfg = RunConfig(a=a, sigma=sigma, samples=1_000_000, seed=6, suites=("kernel",))
            rep = [r for r in suite_kernel(cfg, kernels_for(cfg)) if r.check == "reproducing-property"][0]
            worst = max(worst, rep.estimate)
            if not rep.passed:
                bad.append((a, sigma))
    ok = dev <= 1e-6 and worst <= 0.01 and not bad
    record(6, ok, f"ball match {dev:.1e} (tol 1e-6); reproducing worst {worst:.2%} (tol 1%) "
                  f"over a in {EGGS}, sigma in [0, 1]")
    assert ok


GAMMA_TUPLES = [(0.5, 1.0, 0.5), (0.5, 0.0, 0.3), (1.0, 1.0, 0.5), (1.0, 3.0, 2.0), (2.0, 0.0, 0.5),
                (2.0, 1.0, 1.5)]


def _tail_profiles():
    grid = index_grid(10_000)
    J, L = np.meshgrid(grid, grid, indexing="ij")
    out = []
    for a, sigma, dd in GAMMA_TUPLES:
        pp = Ineq56Params(1, 1, a, sigma, dd)
        c5, _ = sup_constant(lambda j, l: ineq5_ratio(pp, j, l), [grid, grid])
        c6, _ = sup_constant(lambda l: ineq6_ratio(pp, l), [grid])
        t5 = tail_profile(np.maximum(J, L), ineq5_ratio(pp, J, L), 10_000)
        t6 = tail_profile(grid, ineq6_ratio(pp, grid), 10_000)
        out.append(((a, sigma, dd), c5, c6, t5, t6))
    return out


def test_criterion_7_gamma_properties():
    start = time.perf_counter()
    x = np.concatenate([[0.0], np.logspace(-3, math.log10(50), 199)])
    t = np.logspace(-2, 6, 400)
    g = gamma_ratio(x[:, None], t[None, :])
    below = bool(np.all(g <= 1.0))
    xs = np.logspace(-3, 2, 2001)
    rec = float(np.max(np.abs(np.exp(log_gamma(xs + 1) - log_gamma(xs)) / xs - 1)))
    bad, sups = [], []
    for key, c5, c6, t5, t6 in _tail_profiles():
        sups.append((round(c5, 3), round(c6, 3)))
        # finite sup, and the decade maxima either fall or settle with shrinking steps
        if not (math.isfinite(c5) and math.isfinite(c6) and t5.bounded and t6.bounded):
            bad.append(key)
    elapsed = time.perf_counter() - start
    ok = below and rec <= 1e-12 and not bad and elapsed < 60
    record(7, ok, f"ratio<=1: {below}; recurrence {rec:.1e}; 6 tuples bounded "
                  f"(sups {sups}){'; failing ' + str(bad) if bad else ''}; {elapsed:.1f}s")
    assert ok


@pytest.mark.xfail(strict=True, reason="most ratios rise toward a finite limit rather than decrease; see README")
def test_criterion_7_tails_non_increasing():
    rising = []
    for key, _, _, t5, t6 in _tail_profiles():
        for name, tp in (("ineq5", t5), ("ineq6", t6)):
            if not tp.monotone:
                rising.append(f"{name}{key} {tp.decade_max[0]:.5g}->{tp.decade_max[-1]:.5g}")
    record("7 (strictly non-increasing tails)", not rising,
           f"{12 - len(rising)}/12 sequences non-increasing; rising to a limit: {'; '.join(rising)} "
           f"[expected failure]")
    assert not rising


@pytest.mark.slow
def test_criterion_8_lemma_stability():
    bad, spans = [], []
    for a in EGGS:
        cfg = RunConfig(a=a, sigma=1.0, d=0.5, seed=8, suites=("lemma1",))
        reps = suite_lemma1(cfg, kernels_for(cfg))
        if a != 2.0:
            cfg = RunConfig(a=a, sigma=1.0, d=0.5, seed=8, suites=("lemma2",))
            reps += suite_lemma2(cfg, kernels_for(cfg))
        bad += [f"{r.suite}/{r.check} a={a}" for r in reps if not r.passed]
        spans += [r.detail["max_over_min"] for r in reps if "max_over_min" in r.detail]
    ok = not bad
    record(8, ok, f"lemma1 a in {EGGS}, lemma2 a in [0.5, 1.0]: worst max/min {max(spans):.2f} "
                  f"(tol 2){'; failing ' + str(bad) if bad else ''}")
    assert ok


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="at a=2 the scaled comparison integral grows like (1-|z|^2)^(1-a); see README")
def test_criterion_8_lemma2_at_a2():
    cfg = RunConfig(a=2.0, sigma=1.0, d=0.5, seed=8, suites=("lemma2",))
    reps = suite_lemma2(cfg, kernels_for(cfg))
    scan = reps[0]
    runs = ", ".join(f"{v:.3g}" for v in scan.detail["runs"].values())
    record("8 (lemma2, a=2)", scan.passed,
           f"sup estimates {runs}; max/min {scan.detail['max_over_min']:.1f} (tol 2) [expected failure]")
    assert all(r.passed for r in reps)


@pytest.mark.slow
def test_criterion_9_schur_and_l1():
    bad, spans, zs = [], [], []
    for a in EGGS:
        cfg = RunConfig(a=a, p=2.0, lam=0.0, seed=9, suites=("schur",))
        reps = suite_schur(cfg, kernels_for(cfg))
        for lam in (-0.5, 0.0, 1.0):
            cfg = RunConfig(a=a, p=1.0, lam=lam, seed=9, suites=("schur",))
            reps += suite_schur(cfg, kernels_for(cfg))
        bad += [f"{r.check} a={a} p={r.params['p']} lambda={r.params['lambda']}" for r in reps if not r.passed]
        spans += [r.detail["max_over_min"] for r in reps if "max_over_min" in r.detail]
        zs += [r.estimate for r in reps if r.check == "column-integral-via-symmetry"]
    ok = not bad
    record(9, ok, f"C8/C9 (p=2) and l1 (lambda in [-0.5, 0, 1]) over a in {EGGS}: worst max/min "
                  f"{max(spans):.2f} (tol 2); symmetry reduction worst {max(zs):.2f} SE (tol 3)"
                  f"{'; failing ' + str(bad) if bad else ''}")
    assert ok


def test_criterion_10_determinism(tmp_path):
    texts = []
    for i in range(2):
        cfg = RunConfig(a=0.5, sigma=1.0, d=0.5, samples=20_000, seed=10, grid=1000, outer=6,
                        suites=("decomposition", "multiplier", "kernel", "gamma", "lemma1", "lemma2"),
                        out=str(tmp_path / f"run{i}"), cache_dir=str(tmp_path / f"cache{i}"))
        run_suite(cfg.validate())
        texts.append((tmp_path / f"run{i}" / "report.jsonl").read_text())
    rows = len(texts[0].splitlines())
    same = strip_timestamps(texts[0]) == strip_timestamps(texts[1])
    ok = rows > 0 and same
    record(10, ok, f"two runs, {rows} report rows each: identical modulo timestamps = {same}")
    assert ok
