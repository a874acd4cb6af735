"""Weighted L^p norms, the Bergman-type projection, exponent selection and
Monte-Carlo versions of the Schur-test integrals for T_k.

Every ``sup over Omega_a`` below is a maximum over a finite set of outer
points, placed on prescribed level sets of h (log-spaced down to a floor).
Inner integrals share one weighted sample set across outer points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import CPoint, EggDomain, as_points, block_pairings, defining_function
from .kernel import (
    KernelParams,
    _g_xy,
    _kernel_xy,
    _lemma2_values,
    _require_interior,
    _t_terms,
    lemma1_ratio,
    lemma2_series,
)
from .quadrature import MCResult, focused_sample, integrate_weighted, weighted_volume
from .sampling import (
    SamplerSpec,
    block_generator,
    log_levels,
    points_at_levels,
    sample_at_levels,
    sample_uniform,
    sample_weighted,
)
from .taylor import TaylorPoly, evaluate, leibenson_component

__all__ = [
    "SpaceParams",
    "ExponentChoice",
    "RegimeError",
    "lp_norm",
    "choose_exponents",
    "projection_apply",
    "q_kernel",
    "q_matrix",
    "SupEstimate",
    "outer_points",
    "schur_test",
    "l1_check",
    "lemma1_scan",
    "lemma2_scan",
    "symmetry_check",
    "operator_norm_estimate",
]


class RegimeError(ValueError):
    """(p, lambda) lies outside the range covered by the boundedness theorem."""


@dataclass(frozen=True)
class SpaceParams:
    p: float
    lam: float

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError(f"need p >= 1, got {self.p}")
        if not self.lam > -1:
            raise ValueError(f"need lambda > -1, got {self.lam}")

    @property
    def q(self) -> float:
        return math.inf if self.p == 1 else self.p / (self.p - 1)

    @property
    def in_theorem_regime(self) -> bool:
        return (self.p > 1 and self.lam >= 0) or self.p == 1


@dataclass(frozen=True)
class ExponentChoice:
    sigma: float
    d: float | None

    def satisfies_projection_gate(self, sp: SpaceParams) -> bool:
        """0 < lambda + 1 < p (sigma + 1): T_sigma is bounded on L^p(dv_lambda)."""
        return 0 < sp.lam + 1 < sp.p * (self.sigma + 1)


def choose_exponents(sp: SpaceParams, sigma: float | None = None,
                     d: float | None = None) -> ExponentChoice:
    """Concrete sigma (and d when p > 1) for the boundedness argument.

    p > 1, lambda >= 0: sigma = max((lambda+1)/p - 1, 0) + 1 and d the midpoint
    of (0, sigma+1) intersected with (-sigma/(p-1), 1/(p-1)).
    p = 1: sigma = lambda + 1, no d.
    Explicit ``sigma`` / ``d`` replace the defaults but must satisfy the
    same constraints.
    """
    if not sp.in_theorem_regime:
        raise RegimeError(f"(p={sp.p}, lambda={sp.lam}) is outside the covered regime")
    if sp.p == 1:
        s = sp.lam + 1.0 if sigma is None else float(sigma)
        if not s > sp.lam:
            raise RegimeError(f"need sigma > lambda for p = 1, got sigma={s}")
        ec = ExponentChoice(s, None)
    else:
        s = max((sp.lam + 1) / sp.p - 1, 0.0) + 1.0 if sigma is None else float(sigma)
        lo = max(0.0, -s / (sp.p - 1))
        hi = min(s + 1.0, 1.0 / (sp.p - 1))
        if not lo < hi:
            raise RegimeError(f"empty interval for d: ({lo}, {hi})")
        dd = 0.5 * (lo + hi) if d is None else float(d)
        if not lo < dd < hi:
            raise RegimeError(f"d={dd} outside ({lo}, {hi})")
        ec = ExponentChoice(s, dd)
    if not ec.satisfies_projection_gate(sp):
        raise RegimeError(f"sigma={ec.sigma} violates 0 < lambda + 1 < p (sigma + 1)")
    return ec


def lp_norm(d: EggDomain, sp: SpaceParams, f, spec: SamplerSpec) -> float:
    """(int h^lambda |f|^p dv)^(1/p) by Monte Carlo; f is a TaylorPoly or a vectorized callable."""
    g = (lambda x: evaluate(f, x)) if isinstance(f, TaylorPoly) else f
    res = integrate_weighted(d, sp.lam, lambda x: np.abs(g(x)) ** sp.p, spec, importance=True)
    return float(res.estimate.real) ** (1.0 / sp.p)


def projection_apply(kp: KernelParams, f, at, spec: SamplerSpec):
    """C_sigma int h^sigma(xi') K(at, xi') f(xi') dv(xi') by Monte Carlo.

    ``at`` may be a batch of points and ``f`` a list of integrands; kernel
    values are computed once per point and shared.  Returns an MCResult
    (arrays over ``at`` for a batch), or a list of them when ``f`` is a list.
    """
    d = kp.domain
    fs = list(f) if isinstance(f, (list, tuple)) else [f]
    single_point = np.ndim(at) == 1 or isinstance(at, CPoint)
    at = np.atleast_2d(as_points(d, at))
    _require_interior(d, at)
    pts = sample_weighted(d, kp.sigma, spec)
    fvals = [np.asarray(evaluate(g, pts) if isinstance(g, TaylorPoly) else g(pts), dtype=complex)
             for g in fs]
    vol = kp.c_sigma * weighted_volume(d, kp.sigma)
    est = np.zeros((len(fs), len(at)), dtype=complex)
    err = np.zeros((len(fs), len(at)))
    for i, xi in enumerate(at):
        X, Y = block_pairings(d, xi, pts)
        kv = _kernel_xy(kp, X, Y)
        for j, fv in enumerate(fvals):
            v = kv * fv
            est[j, i] = vol * v.mean()
            err[j, i] = vol * math.sqrt(np.var(v) / len(v))
    out = [MCResult(complex(e[0]), float(s[0]), len(pts)) if single_point else MCResult(e, s, len(pts))
           for e, s in zip(est, err)]
    return out if isinstance(f, (list, tuple)) else out[0]


def _dk_integrated(kp: KernelParams, k: int, first, second, nodes: int = 32):
    """int_0^1 dK(t first, second)/dxi_k dt; one argument is a single point."""
    d = kp.domain
    acc = 0.0
    for wk, tX, tY, one in _t_terms(d, first, second, nodes):
        _, dX, dY = _kernel_xy(kp, tX, tY, derivatives=True, one=one)
        acc = acc + wk * (dX if k < d.n else dY)
    return np.conj(np.asarray(second)[..., k]) * acc


def q_kernel(kp: KernelParams, k: int, p, q, nodes: int = 32):
    """Q(xi, xi') = C_sigma int_0^1 h^sigma(xi') dK(t xi, xi')/dxi_k dt; q may be a batch."""
    d = kp.domain
    if not 0 <= k < d.dim:
        raise IndexError(f"coordinate {k} out of range for dimension {d.dim}")
    xi = as_points(d, p)
    pts = np.atleast_2d(as_points(d, q))
    _require_interior(d, xi, pts)
    out = kp.c_sigma * defining_function(d, pts) ** kp.sigma * _dk_integrated(kp, k, xi, pts, nodes)
    return out if np.ndim(q) > 1 else complex(out[0])


def q_matrix(kp: KernelParams, k: int, outer, inner, nodes: int = 32) -> np.ndarray:
    """|Q(outer_i, inner_j)| without the h^sigma(inner) factor, shape (len(outer), len(inner))."""
    return np.stack([np.abs(kp.c_sigma * _dk_integrated(kp, k, xi, inner, nodes)) for xi in outer])


@dataclass(frozen=True)
class SupEstimate:
    value: float
    argmax: np.ndarray
    values: np.ndarray
    std_errors: np.ndarray
    levels: np.ndarray

    @property
    def sup_point(self):
        return [[float(v.real), float(v.imag)] for v in np.ravel(self.argmax)]

    @property
    def std_error(self) -> float:
        return float(self.std_errors[int(np.argmax(self.values))])


def outer_points(d: EggDomain, floor: float, count: int, spec: SamplerSpec) -> tuple[np.ndarray, np.ndarray]:
    """``count`` points on log-spaced levels of h from ``floor`` to 1.

    Directions are uniform, except that every third point lies in the slice
    w = 0 and every third in z = 0: near those slices the boundary changes
    type (for a != 1) and uniform directions reach them only rarely.
    """
    levels = log_levels(floor, count)
    base = np.array(sample_uniform(d, spec.with_count(count)))
    base[1::3, d.n:] = 0
    base[2::3, : d.n] = 0
    return points_at_levels(d, base, levels), levels


def _sup(values, errors, pts, levels) -> SupEstimate:
    i = int(np.argmax(values))
    return SupEstimate(float(values[i]), pts[i], np.asarray(values), np.asarray(errors), levels)


def _scan(d: EggDomain, mu: float, outer, levels, spec: SamplerSpec, integrand, scale):
    """For each outer point x: scale(h(x)) * int integrand(x, .) h^mu dv, focused at x."""
    vals, errs = [], []
    for i, (x, h) in enumerate(zip(outer, levels)):
        fs = focused_sample(d, mu, x, spec, i)
        mean, err = fs.mean_and_error(integrand(x, fs.points))
        vals.append(float(mean) * scale(h))
        errs.append(err * scale(h))
    return _sup(vals, errs, outer, levels)


def schur_test(d: EggDomain, sp: SpaceParams, ec: ExponentChoice, kp: KernelParams, k: int,
               spec: SamplerSpec, *, floor: float = 1e-6, n_outer: int = 200,
               nodes: int = 32) -> tuple[SupEstimate, SupEstimate]:
    """Empirical constants for the two Schur inequalities with g = h^(-d/q).

    C8 = max_xi  h^d(xi) int |Q(xi, xi')| h^(lambda-d)(xi') dv(xi')
    C9 = max_xi' h^(d(p-1))(xi') int |Q(xi, xi')| h^(lambda-d(p-1))(xi) dv(xi)

    Each inner integral uses points focused at its outer point; Q's factor
    h^sigma(xi') is folded into the weight for C8 and into the scale for C9.
    """
    if sp.p == 1:
        raise RegimeError("p = 1 has no Schur pair; use l1_check")
    if ec.d is None:
        raise ValueError("exponent choice carries no d")
    if kp.domain != d or kp.sigma != ec.sigma:
        raise ValueError("kernel parameters do not match the domain / exponent choice")
    dd, lam, p = ec.d, sp.lam, sp.p
    outer, levels = outer_points(d, floor, n_outer, spec.substream(1))
    c = kp.c_sigma
    c8 = _scan(d, kp.sigma + lam - dd, outer, levels, spec.substream(2),
               lambda x, pts: np.abs(c * _dk_integrated(kp, k, x, pts, nodes)),
               lambda h: h**dd)
    c9 = _scan(d, lam - dd * (p - 1), outer, levels, spec.substream(3),
               lambda x, pts: np.abs(c * _dk_integrated(kp, k, pts, x, nodes)),
               lambda h: h ** (kp.sigma + dd * (p - 1)))
    return c8, c9


def l1_check(d: EggDomain, lam: float, kp: KernelParams, k: int, spec: SamplerSpec, *,
             floor: float = 1e-6, n_outer: int = 200, nodes: int = 32) -> SupEstimate:
    """max over xi' of int |Q(xi, xi')| h^lambda(xi) dv(xi) / h^lambda(xi')."""
    if not lam > -1:
        raise ValueError("need lambda > -1")
    if not kp.sigma > lam:
        raise ValueError("need sigma > lambda")
    if kp.domain != d:
        raise ValueError("kernel parameters do not match the domain")
    outer, levels = outer_points(d, floor, n_outer, spec.substream(1))
    c = kp.c_sigma
    return _scan(d, lam, outer, levels, spec.substream(4),
                 lambda x, pts: np.abs(c * _dk_integrated(kp, k, pts, x, nodes)),
                 lambda h: h ** (kp.sigma - lam))


def lemma1_scan(kp: KernelParams, k: int, spec: SamplerSpec, *, floor: float = 1e-6,
                count: int = 100_000) -> SupEstimate:
    """max of |dK/dxi_k| / |G_sigma|^2 over pairs of points with h >= floor.

    A third of the pairs are diagonal (xi = xi'), where both sides are most
    singular; the rest pair independent points from the level-set sampler.
    """
    d = kp.domain
    rng = block_generator(spec.substream(8), 0)
    levels_p = np.exp(rng.uniform(np.log(floor), 0.0, count))
    levels_q = np.exp(rng.uniform(np.log(floor), 0.0, count))
    p = sample_at_levels(d, levels_p, spec.substream(5))
    q = sample_at_levels(d, levels_q, spec.substream(6))
    q[: count // 3] = p[: count // 3]
    r = lemma1_ratio(kp, k, p, q)
    i = int(np.argmax(r))
    return SupEstimate(float(r[i]), np.stack([p[i], q[i]]), r, np.zeros_like(r), levels_p)


def lemma2_scan(kp: KernelParams, dd: float, spec: SamplerSpec, *, floor: float = 1e-6,
                n_outer: int = 24, nodes: int = 32) -> SupEstimate:
    """max over outer xi of h^d(xi) int_0^1 int h^(sigma-d)(xi') |G_sigma(t xi, xi')|^2 dv dt."""
    if not 0 < dd < kp.sigma + 1:
        raise ValueError("need 0 < d < sigma + 1")
    d = kp.domain
    outer, levels = outer_points(d, floor, n_outer, spec.substream(1))
    return _scan(d, kp.sigma - dd, outer, levels, spec.substream(7),
                 lambda x, pts: _lemma2_values(kp, x, pts, nodes),
                 lambda h: h**dd)


@dataclass(frozen=True)
class SymmetryCheck:
    point: np.ndarray
    direct: MCResult
    via_symmetry: float
    ratio: float

    @property
    def agrees(self) -> bool:
        return self.direct.within(self.via_symmetry, 3.0)


def symmetry_check(kp: KernelParams, sp: SpaceParams, ec: ExponentChoice, at, spec: SamplerSpec,
                   nodes: int = 32) -> SymmetryCheck:
    """The dual Schur integral at xi' computed two ways.

    Direct: MC of int_0^1 int h^(-d(p-1))(xi) |G_sigma(t xi, xi')|^2 dv(xi) dt,
    with the scaled argument as the integration variable.
    Via |G(t xi, xi')| = |G(t xi', xi)|: the same integral is a comparison
    integral at xi', evaluated from its exact series.
    ``ratio`` is the direct value times h^(d(p-1) + sigma)(xi').
    """
    d = kp.domain
    xq = as_points(d, at)
    _require_interior(d, xq)
    mu = -ec.d * (sp.p - 1)
    fs = focused_sample(d, mu, xq, spec, 0)
    vals = np.zeros(len(fs.points))
    for wk, tX, tY, one in _t_terms(d, fs.points, xq, nodes):
        vals += wk * np.abs(_g_xy(d, kp.sigma, tX, tY, one)) ** 2
    mean, err = fs.mean_and_error(vals)
    direct = MCResult(float(mean), err, fs.total)
    series = lemma2_series(d, kp.sigma, mu, xq)
    h = float(defining_function(d, xq))
    return SymmetryCheck(xq, direct, series, float(mean) * h ** (ec.d * (sp.p - 1) + kp.sigma))


def operator_norm_estimate(d: EggDomain, sp: SpaceParams, family, spec: SamplerSpec,
                           k: int | None = None) -> tuple[float, int, int]:
    """max over the family (and over k unless given) of ||xi_k T_k f|| / ||f|| in A^p_lambda.

    Returns (ratio, family index, k).  All norms share one sample set.
    """
    family = list(family)
    if not family:
        raise ValueError("empty family")
    pts = sample_weighted(d, sp.lam, spec)
    ks = range(d.dim) if k is None else [k]
    best = (-1.0, -1, -1)
    for i, f in enumerate(family):
        base = np.mean(np.abs(evaluate(f, pts)) ** sp.p) ** (1 / sp.p)
        if base == 0:
            continue
        for kk in ks:
            g = TaylorPoly.variable(f.nvars, kk) * leibenson_component(f, kk)
            r = np.mean(np.abs(evaluate(g, pts)) ** sp.p) ** (1 / sp.p) / base
            if r > best[0]:
                best = (float(r), i, kk)
    return best
