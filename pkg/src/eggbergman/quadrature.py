"""Closed-form weighted integrals over Omega_a and a Monte-Carlo integrator.

The closed forms all follow from one computation: integrate the w-block
over the ball of radius (1 - |z|^2)^(a/2) in polar coordinates, then the
z-block over the unit ball.  For a monomial this gives

    int h^s |z^beta w^gamma|^2 dv
        = pi^(n+m) beta! gamma! Gamma(s+1) Gamma(A+1)
          / (Gamma(s+m+|gamma|+1) Gamma(A+n+|beta|+1)),   A = a(s+m+|gamma|).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .domain import EggDomain, as_points, contains, defining_function
from .sampling import BLOCK_SIZE, SamplerSpec, block_generator, iter_blocks, sample_weighted

__all__ = [
    "WeightedMeasure",
    "NonFiniteIntegrand",
    "SeriesTruncationError",
    "weighted_volume",
    "log_weighted_volume",
    "monomial_moment",
    "log_monomial_moment",
    "psi",
    "psi_norm_integral",
    "MCResult",
    "integrate_weighted",
    "integrate_rejection",
    "FocusedSample",
    "focused_sample",
]


class NonFiniteIntegrand(FloatingPointError):
    def __init__(self, point):
        self.point = point
        super().__init__(f"integrand is not finite at {point!r}")


class SeriesTruncationError(RuntimeError):
    pass


@dataclass(frozen=True)
class WeightedMeasure:
    """The measure h^sigma dv on Omega_a."""

    sigma: float

    def __post_init__(self):
        if not self.sigma > -1:
            raise ValueError(f"weight exponent must exceed -1, got {self.sigma!r}")
        object.__setattr__(self, "sigma", float(self.sigma))


def _sigma(mu) -> float:
    return mu.sigma if isinstance(mu, WeightedMeasure) else WeightedMeasure(mu).sigma


def log_weighted_volume(d: EggDomain, mu) -> float:
    s = _sigma(mu)
    n, m, a = d.n, d.m, d.a
    return ((n + m) * math.log(math.pi) + gammaln(s + 1) + gammaln(a * (s + m) + 1)
            - gammaln(s + m + 1) - gammaln(a * (s + m) + n + 1))


def weighted_volume(d: EggDomain, mu) -> float:
    """int_{Omega_a} h^sigma dv."""
    return math.exp(log_weighted_volume(d, mu))


def log_monomial_moment(d: EggDomain, mu, alpha) -> float:
    """log of int h^sigma |xi^alpha|^2 dv for a flat multi-index alpha."""
    s = _sigma(mu)
    alpha = tuple(int(v) for v in alpha)
    if len(alpha) != d.dim or min(alpha) < 0:
        raise ValueError(f"multi-index {alpha} does not fit dimension {d.dim}")
    beta, gam = alpha[: d.n], alpha[d.n:]
    j, l = sum(beta), sum(gam)
    A = d.a * (s + d.m + l)
    fact = sum(gammaln(b + 1) for b in alpha)
    return (d.dim * math.log(math.pi) + fact + gammaln(s + 1) + gammaln(A + 1)
            - gammaln(s + d.m + l + 1) - gammaln(A + d.n + j + 1))


def monomial_moment(d: EggDomain, mu, alpha) -> float:
    return math.exp(log_monomial_moment(d, mu, alpha))


def psi(d: EggDomain, k: int, r: float, at, xi):
    """psi_{k,r}(at, xi) = <w, w'>^k / (1 - <z, z'>)^r with at = (z, w), xi = (z', w')."""
    at = as_points(d, at)
    xi = as_points(d, xi)
    zx = np.sum(at[..., : d.n] * np.conj(xi[..., : d.n]), axis=-1)
    wy = np.sum(at[..., d.n:] * np.conj(xi[..., d.n:]), axis=-1)
    return wy**k / (1.0 - zx) ** r


_TAIL_RTOL = 1e-14


def _log_series_sum(logterm, ratio_bound, start_ok, series_terms, chunk=512):
    """Sum exp(logterm(j)) for j = 0, 1, ... with a ratio-test stopping rule.

    ``ratio_bound(j)`` must bound every later term ratio once ``start_ok(j)``
    holds.  Returns log of the sum.
    """
    total_log = -np.inf
    j0 = 0
    while j0 < series_terms:
        js = np.arange(j0, min(j0 + chunk, series_terms), dtype=float)
        lt = logterm(js)
        total_log = np.logaddexp(total_log, np.logaddexp.reduce(lt))
        last = js[-1]
        q = ratio_bound(last)
        if start_ok(last) and q < 1:
            tail_log = lt[-1] + math.log(q) - math.log1p(-q) if q > 0 else -np.inf
            if tail_log - total_log <= math.log(_TAIL_RTOL):
                return float(total_log)
        j0 += chunk
    raise SeriesTruncationError(f"series not converged within {series_terms} terms")


def psi_norm_integral(d: EggDomain, s: float, k: int, r: float, at, series_terms: int = 200_000) -> float:
    """Closed form of int h^s(xi') |psi_{k,r}(at, xi')|^2 dv(xi')."""
    if not s > -1:
        raise ValueError("need s > -1")
    if not r > 0:
        raise ValueError("need r > 0")
    if int(k) != k or k < 0:
        raise ValueError("k must be a non-negative integer")
    at = as_points(d, at)
    zz = float(np.sum(np.abs(at[: d.n]) ** 2))
    ww = float(np.sum(np.abs(at[d.n:]) ** 2))
    if zz >= 1:
        raise ValueError("need |z| < 1")
    n, m, a = d.n, d.m, d.a
    A = a * (s + k + m)
    if k > 0 and ww == 0:
        return 0.0
    pref = ((n + m) * math.log(math.pi) + gammaln(k + 1) + gammaln(s + 1) + gammaln(A + 1)
            - 2 * gammaln(r) - gammaln(s + k + m + 1))
    if k:
        pref += k * math.log(ww)
    if zz == 0:
        return math.exp(pref + 2 * gammaln(r) - gammaln(A + n + 1))
    B = A + n + 1
    log_zz = math.log(zz)

    def logterm(j):
        return 2 * gammaln(j + r) + j * log_zz - gammaln(B + j) - gammaln(j + 1)

    def ratio(j):
        return zz * (j + r) ** 2 / ((j + B) * (j + 1))

    # d/dj log(ratio) has the sign of (B + 1 - 2r) j + (2B - r - rB): linear in j,
    # so the ratio is monotone beyond its root.
    slope, icpt = B + 1 - 2 * r, 2 * B - r - r * B
    j_crit = -icpt / slope if slope != 0 else 0.0

    def bound(j):
        return max(ratio(j), zz)

    return math.exp(pref + _log_series_sum(logterm, bound, lambda j: j > j_crit, series_terms))


@dataclass(frozen=True)
class MCResult:
    estimate: complex
    std_error: float
    sample_count: int

    def within(self, target, n_se: float = 3.0) -> bool:
        return abs(self.estimate - target) <= n_se * self.std_error


def integrate_weighted(d: EggDomain, mu, f, spec: SamplerSpec, *, importance: bool = False,
                       workers: int = 1) -> MCResult:
    """Monte-Carlo estimate of int h^sigma f dv.

    By default points are uniform and each carries the weight
    vol(Omega_a) h^sigma.  With ``importance=True`` the points are drawn from
    h^sigma dv itself and carry the constant weight int h^sigma dv, which
    keeps the variance finite for negative sigma.

    ``f`` maps an ``(N, n + m)`` array of points to ``N`` complex values.
    """
    sigma = _sigma(mu)
    draw_sigma = sigma if importance else 0.0
    scale = weighted_volume(d, draw_sigma)
    total = 0.0 + 0.0j
    total_sq = 0.0
    count = 0
    for _, pts in iter_blocks(d, draw_sigma, spec, workers):
        vals = np.asarray(f(pts), dtype=complex)
        if vals.shape != (len(pts),):
            raise ValueError(f"integrand returned shape {vals.shape}, expected ({len(pts)},)")
        bad = ~np.isfinite(vals)
        if np.any(bad):
            raise NonFiniteIntegrand(pts[np.argmax(bad)])
        if not importance and sigma != 0.0:
            vals = vals * defining_function(d, pts) ** sigma
        total += vals.sum()
        total_sq += float(np.sum(np.abs(vals) ** 2))
        count += len(pts)
    mean = total / count
    var = max(total_sq / count - abs(mean) ** 2, 0.0) * count / max(count - 1, 1)
    return MCResult(scale * mean, scale * math.sqrt(var / count), count)


def integrate_rejection(d: EggDomain, mu, f, spec: SamplerSpec) -> MCResult:
    """int h^sigma f dv by uniform draws from the unit polydisc, which contains Omega_a.

    Shares nothing with the exact h^sigma sampler, so it serves as an
    independent check of it and of the closed forms.
    """
    sigma = _sigma(mu)
    D = d.dim
    box = math.pi**D
    total = 0.0 + 0.0j
    total_sq = 0.0
    N = spec.sample_count
    for b in range(-(-N // BLOCK_SIZE)):
        size = min(BLOCK_SIZE, N - b * BLOCK_SIZE)
        u = block_generator(spec, b).random((size, 2 * D))
        pts = np.sqrt(u[:, :D]) * np.exp(2j * np.pi * u[:, D:])
        inside = contains(d, pts)
        vals = np.zeros(size, dtype=complex)
        if np.any(inside):
            q = pts[inside]
            vals[inside] = np.asarray(f(q), dtype=complex) * defining_function(d, q) ** sigma
        total += vals.sum()
        total_sq += float(np.sum(np.abs(vals) ** 2))
    mean = total / N
    var = max(total_sq / N - abs(mean) ** 2, 0.0) * N / max(N - 1, 1)
    return MCResult(box * mean, box * math.sqrt(var / N), N)


@dataclass(frozen=True)
class FocusedSample:
    """Weighted points for integrals against h^mu dv that peak near ``center``.

    ``estimate = sum(f(points) * weights) / total``; points that fell outside
    the domain are dropped but still count in ``total``.
    """

    points: np.ndarray
    weights: np.ndarray
    total: int

    def mean_and_error(self, values):
        fw = np.asarray(values) * self.weights
        mean = fw.sum() / self.total
        var = max(float(np.sum(np.abs(fw) ** 2)) / self.total - abs(mean) ** 2, 0.0)
        return mean, math.sqrt(var / max(self.total - 1, 1))


def _from_ball(d: EggDomain, pts):
    """(z, u) in the unit ball -> (z, u (1 - |z|^2)^((a-1)/2)) in Omega_a."""
    g = (1.0 - np.sum(np.abs(pts[..., : d.n]) ** 2, axis=-1)) ** (0.5 * (d.a - 1))
    return np.concatenate([pts[..., : d.n], pts[..., d.n:] * g[..., None]], axis=-1)


def _to_ball(d: EggDomain, pts):
    g = (1.0 - np.sum(np.abs(pts[..., : d.n]) ** 2, axis=-1)) ** (0.5 * (d.a - 1))
    return np.concatenate([pts[..., : d.n], pts[..., d.n:] / g[..., None]], axis=-1)


@dataclass(frozen=True)
class _Box:
    """Koranyi-shaped proposal around a boundary point b with inward normal -nu.

    A scale s is log-uniform in [s_min, s_max]; iota is uniform in [-s, s],
    the tangential offset tau uniform in the ball of radius sqrt(s), and
    the point is b + (-(rho0 + rho) + i iota) nu + tau with rho in [0, s] of
    density proportional to rho^e.  rho0(iota, tau) is where that normal
    line meets the boundary, so rho^e follows the curved boundary.  Any
    deterministic rho0 is a shear with unit Jacobian, so the density below
    is exact whatever ``entry`` returns.

    Offsets rho at or below RHO_MIN are within rounding of the boundary:
    draws there are dropped and the density is zero there, using the same
    computation for both, so the box is a consistent defective proposal.
    """

    RHO_MIN = 16 * np.finfo(float).eps

    b: np.ndarray
    nu: np.ndarray
    s_min: float
    s_max: float
    e: float
    entry: object  # (iota, tau) -> rho0

    def _frame(self):
        D = len(self.nu)
        basis = np.eye(D, dtype=complex)
        basis[:, 0] = self.nu
        Q, _ = np.linalg.qr(basis)
        return Q[:, 1:]

    def draw(self, rng, count: int) -> np.ndarray:
        D = len(self.nu)
        T = 2 * D - 2
        L = math.log(self.s_max / self.s_min)
        s = self.s_min * np.exp(rng.random(count) * L)
        rho = s * rng.random(count) ** (1.0 / (self.e + 1.0))
        iota = s * (2.0 * rng.random(count) - 1.0)
        g = rng.standard_normal((count, T))
        g *= (np.sqrt(s) * rng.random(count) ** (1.0 / T) / np.linalg.norm(g, axis=1))[:, None]
        tau = (g[:, : D - 1] + 1j * g[:, D - 1:]) @ self._frame().T
        rho = rho + self.entry(iota, tau)
        pts = self.b + (-rho + 1j * iota)[:, None] * self.nu + tau
        return pts[self._coords(pts)[0] > self.RHO_MIN]

    def _coords(self, pts):
        off = pts - self.b
        dn = off @ np.conj(self.nu)
        tau = off - dn[:, None] * self.nu
        rho = -dn.real - self.entry(dn.imag, tau)
        return rho, dn.imag, np.linalg.norm(tau, axis=1) ** 2

    def density(self, pts: np.ndarray) -> np.ndarray:
        D = len(self.nu)
        T = 2 * D - 2
        e = self.e
        L = math.log(self.s_max / self.s_min)
        rho, iota, dt2 = self._coords(pts)
        s0 = np.maximum.reduce([rho, np.abs(iota), dt2, np.full(len(pts), self.s_min)])
        vt = math.exp(0.5 * T * math.log(math.pi) - gammaln(0.5 * T + 1))
        # given s: (e+1) rho^e / s^(e+1) * 1/(2s) * 1/(V_T s^(T/2)); s has density 1/(s L)
        pw = D + 1 + e
        with np.errstate(divide="ignore", invalid="ignore"):
            rho_e = np.where(rho > 0, np.abs(rho) ** e, 0.0)
            out = (e + 1) * rho_e * (s0 ** (-pw) - self.s_max ** (-pw)) / (pw * 2.0 * L * vt)
        return np.where((s0 < self.s_max) & (rho > self.RHO_MIN), out, 0.0)


def _sphere_entry(iota, tau):
    # b = nu on the unit sphere: |(1 - rho) nu + i iota nu + tau| = 1
    r2 = iota**2 + np.sum(np.abs(tau) ** 2, axis=-1)
    return np.where(r2 < 1.0, r2 / (1.0 + np.sqrt(np.abs(1.0 - r2))), 0.0)


def _egg_entry(d: EggDomain, b, nu, depth):
    """rho0(iota, tau) for Omega_a by bisection on [0, depth].

    Omega_a is convex for a <= 2, so the real tangent plane at b supports
    it and the normal line enters the domain once; lines whose point at
    ``depth`` is outside get rho0 = 0.
    """

    def inside(pts):
        zz = np.sum(np.abs(pts[:, : d.n]) ** 2, axis=1)
        ww = np.sum(np.abs(pts[:, d.n:]) ** 2, axis=1)
        return zz + ww ** (1.0 / d.a) < 1.0

    def entry(iota, tau):
        base = b + 1j * np.asarray(iota)[:, None] * nu + tau
        lo = np.zeros(len(base))
        hi = np.full(len(base), depth)
        ok = inside(base - depth * nu)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            ins = inside(base - mid[:, None] * nu)
            hi = np.where(ins, mid, hi)
            lo = np.where(ins, lo, mid)
        return np.where(ok, hi, 0.0)

    return entry


def _egg_normal(d: EggDomain, xi: np.ndarray) -> np.ndarray:
    """Unit complex direction in which h decreases fastest at xi."""
    z, w = xi[: d.n], xi[d.n:]
    g = np.concatenate([d.a * (1.0 - np.sum(np.abs(z) ** 2)) ** (d.a - 1) * z, w])
    norm = np.linalg.norm(g)
    if norm == 0:
        g = np.zeros(d.dim, dtype=complex)
        g[0] = 1.0
        return g
    return g / norm


def _boundary_offset(d: EggDomain, x: np.ndarray, nu: np.ndarray) -> float:
    """Real delta > 0 with x + delta nu on the boundary."""
    lo, hi = 0.0, 4.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        y = x + mid * nu
        inside = np.sum(np.abs(y[: d.n]) ** 2) < 1 and defining_function(d, y) > 0
        lo, hi = (mid, hi) if inside else (lo, mid)
    return lo


def focused_sample(d: EggDomain, mu: float, center, spec: SamplerSpec, index: int,
                   scale_max: float = 1.0) -> FocusedSample:
    """Balance-heuristic mixture of h^mu dv and two proposals concentrated near ``center``.

    Half the budget is the shared exact draw from h^mu dv.  The rest is
    split between two Koranyi-shaped boxes (see _Box) at the boundary point
    nearest ``center``:

    * one in ball coordinates, carried to Omega_a by
      (z, u) -> (z, u (1 - |z|^2)^((a-1)/2)); its Jacobian is
      (1 - |z|^2)^(m(a-1)) and it turns h into (1 - |z|^2)^(a-1) times the
      ball's defining function, so it follows the domain's shape where
      one block degenerates;
    * one in the original coordinates along the direction of steepest
      descent of h, which is the complex normal of the kernel denominator.

    rho^min(mu, 0) in the boxes matches the boundary singularity of h^mu.
    All densities are closed-form, so the weights are exact.

    ``index`` selects the counter block of the local draws, so every center
    in a scan gets independent, reproducible points.
    """
    center = np.asarray(center, dtype=complex)
    N = spec.sample_count
    n_glob = N // 2
    n_ball = (N - n_glob) // 2
    n_egg = N - n_glob - n_ball
    e = min(float(mu), 0.0)

    x = _to_ball(d, center)
    r = float(np.linalg.norm(x))
    nu_b = x / r if r > 0 else _egg_normal(d, center)
    ball = _Box(nu_b, nu_b, 0.05 * max(1.0 - r, 1e-300), scale_max, e, _sphere_entry)
    nu_e = _egg_normal(d, center)
    delta = _boundary_offset(d, center, nu_e)
    b_e = center + delta * nu_e
    egg = _Box(b_e, nu_e, 0.05 * max(delta, 1e-300), scale_max, e, _egg_entry(d, b_e, nu_e, delta))

    rng = block_generator(spec, int(index))
    loc_b = ball.draw(rng, n_ball)
    loc_b = _from_ball(d, loc_b[np.sum(np.abs(loc_b) ** 2, axis=1) < 1.0])
    loc_e = egg.draw(rng, n_egg)
    glob = sample_weighted(d, mu, spec.with_count(max(n_glob, 1)))[:n_glob]

    pts = np.concatenate([glob, loc_b, loc_e])
    pts = pts[contains(d, pts)]
    hm = defining_function(d, pts) ** mu
    jac = (1.0 - np.sum(np.abs(pts[:, : d.n]) ** 2, axis=1)) ** (d.m * (d.a - 1))
    q = (n_glob * hm / weighted_volume(d, mu)
         + n_ball * ball.density(_to_ball(d, pts)) / jac
         + n_egg * egg.density(pts))
    return FocusedSample(pts, hm * N / q, N)
