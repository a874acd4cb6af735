"""Weighted Bergman kernel of Omega_a and the comparison function G_sigma.

The kernel has the form

    K(xi, xi') = sum_{k=0}^{n+1} c_k (1 - X)^(ak - n - 1) / ((1 - X)^a - Y)^(sigma + m + k)

with X = <z, z'>, Y = <w, w'>.  The coefficients are recovered here by
requiring that integration against K reproduces monomials, with the
monomial moments taken in closed form.

Powers of D = (1 - X)^a - Y are evaluated as (1 - X)^(a s) (1 - u)^s with
u = Y / (1 - X)^a.  On interior pairs |u| < 1 and Re(1 - X) > 0, so both
factors use the principal branch continuously; D itself may wind past the
negative real axis when a > 1, where the principal power of D would jump.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.special import gammaln

from .domain import DomainError, EggDomain, as_points, block_pairings, defining_function
from .quadrature import (
    MCResult,
    SeriesTruncationError,
    _log_series_sum,
    focused_sample,
    log_monomial_moment,
    weighted_volume,
)
from .sampling import SamplerSpec

__all__ = [
    "KernelSolveError",
    "KernelParams",
    "solve_kernel_coefficients",
    "coefficient_residual",
    "RESIDUAL_TOL",
    "bergman_kernel",
    "weighted_ball_kernel",
    "g_sigma",
    "g_exponents",
    "kernel_gradient",
    "lemma1_ratio",
    "t_quadrature",
    "t_floor",
    "lemma2_integral",
    "lemma2_ratio",
    "lemma2_series",
]

RESIDUAL_TOL = 1e-8
_INTERIOR_TOL = 0.0


class KernelSolveError(RuntimeError):
    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message if residual is None else f"{message} (residual {residual:.3e})")


@dataclass(frozen=True)
class KernelParams:
    domain: EggDomain
    sigma: float
    coeffs: tuple
    c_sigma: float
    residual: float = 0.0

    def __post_init__(self):
        if self.sigma <= -1:
            raise ValueError("sigma must exceed -1")
        if len(self.coeffs) != self.domain.n + 2:
            raise ValueError(f"expected {self.domain.n + 2} coefficients, got {len(self.coeffs)}")
        if not self.c_sigma > 0:
            raise ValueError("C_sigma must be positive")
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    @property
    def base_exponent(self) -> float:
        """a(sigma + m) + n + 1, the common power of (1 - X) after factoring."""
        d = self.domain
        return d.a * (self.sigma + d.m) + d.n + 1

    def to_record(self) -> str:
        d = self.domain
        lines = [
            "# weighted Bergman kernel coefficients",
            f"n {d.n}",
            f"m {d.m}",
            f"a {d.a!r}",
            f"sigma {self.sigma!r}",
        ]
        lines += [f"c {k} {c.real!r} {c.imag!r}" for k, c in enumerate(self.coeffs)]
        lines += [f"C_sigma {self.c_sigma!r}", f"residual {self.residual!r}"]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_record(cls, text: str) -> "KernelParams":
        fields = {}
        coeffs = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, *vals = line.split()
            if key == "c":
                k, re, im = vals
                coeffs[int(k)] = complex(float(re), float(im))
            else:
                (val,) = vals
                fields[key] = val
        try:
            d = EggDomain(int(fields["n"]), int(fields["m"]), float(fields["a"]))
            ordered = [coeffs[k] for k in range(d.n + 2)]
            return cls(d, float(fields["sigma"]), tuple(ordered), float(fields["C_sigma"]),
                       float(fields.get("residual", "0")))
        except (KeyError, ValueError) as exc:
            raise ValueError(f"malformed kernel record: {exc}") from exc


def _row(d: EggDomain, sigma: float, alpha) -> np.ndarray:
    """Coefficient of xi^alpha conj(xi'^alpha) in each basis term, times the moment of xi^alpha."""
    beta, gam = alpha[: d.n], alpha[d.n:]
    j, l = sum(beta), sum(gam)
    E_l = d.a * (sigma + d.m + l) + d.n + 1
    s = sigma + d.m + np.arange(d.n + 2)
    multinom = (gammaln(j + 1) + gammaln(l + 1)
                - sum(gammaln(b + 1) for b in beta) - sum(gammaln(g + 1) for g in gam))
    log_b = (gammaln(s + l) - gammaln(s) - gammaln(l + 1)
             + gammaln(E_l + j) - gammaln(E_l) - gammaln(j + 1))
    return np.exp(log_b + multinom + log_monomial_moment(d, sigma, alpha))


def _system(d: EggDomain, sigma: float, max_degree: int = 3, max_w_degree: int | None = None):
    if max_w_degree is None:
        max_w_degree = 2 * (d.n + 2) + 2
    alphas = [a for a in product(range(max_degree + 1), repeat=d.dim) if sum(a) <= max_degree]
    for l in range(max_degree + 1, max_w_degree + 1):
        alphas.append((0,) * d.n + (l,) + (0,) * (d.m - 1))
    return np.array([_row(d, sigma, a) for a in alphas])


def coefficient_residual(kp: KernelParams, *, max_degree: int = 3,
                         max_w_degree: int | None = None) -> float:
    """Largest violation of the reproducing equations by the stored coefficients."""
    A = _system(kp.domain, kp.sigma, max_degree, max_w_degree)
    return float(np.max(np.abs(A @ np.array(kp.coeffs) - 1.0)))


def solve_kernel_coefficients(d: EggDomain, sigma: float, *, max_degree: int = 3,
                              max_w_degree: int | None = None) -> KernelParams:
    """Recover c_0 .. c_{n+1} from the reproducing property on monomials.

    Each monomial xi^alpha gives one linear equation
    sum_k c_k B_k(alpha) ||xi^alpha||^2 = 1, where B_k(alpha) is the Taylor
    coefficient of the k-th basis term.  Rows come from every alpha with
    |alpha| <= max_degree plus pure w-powers up to ``max_w_degree``; the
    system is over-determined and its residual is checked.
    """
    if sigma <= -1:
        raise ValueError("sigma must exceed -1")
    A = _system(d, sigma, max_degree, max_w_degree)
    rhs = np.ones(len(A))
    scale = np.abs(A).max(axis=0)
    if np.any(scale == 0):
        raise KernelSolveError("singular system: empty column")
    sol, *_ = np.linalg.lstsq(A / scale, rhs, rcond=None)
    coeffs = sol / scale
    residual = float(np.max(np.abs(A @ coeffs - rhs)))
    if not np.all(np.isfinite(coeffs)) or residual > RESIDUAL_TOL:
        raise KernelSolveError("inconsistent reproducing system", residual)
    # int h^sigma K(0, .) dv = (sum c_k) vol_sigma
    c_sigma = 1.0 / (float(np.sum(coeffs)) * weighted_volume(d, sigma))
    return KernelParams(d, float(sigma), tuple(coeffs), c_sigma, residual)


def _require_interior(d: EggDomain, *points):
    for xi in points:
        h = defining_function(d, xi)
        if np.any(h <= _INTERIOR_TOL):
            raise DomainError("kernel evaluation needs interior points")


def _kernel_xy(kp: KernelParams, X, Y, derivatives: bool = False, one=None):
    """K and, optionally, dK/dX and dK/dY as functions of the two pairings.

    ``one`` may carry 1 - X when it is known more accurately than the difference.
    """
    d = kp.domain
    a = d.a
    E0 = kp.base_exponent
    if one is None:
        one = 1.0 - X
    base = one ** (-E0)
    u = Y * one ** (-a)
    omu = 1.0 - u
    s = kp.sigma + d.m + np.arange(d.n + 2)
    K = 0.0
    dX = 0.0
    dY = 0.0
    for c, sk in zip(kp.coeffs, s):
        if c == 0:
            continue
        term = omu ** (-sk)
        K = K + c * term
        if derivatives:
            # d/dX and d/dY of (1-X)^(-E0) (1-u)^(-s)
            dX = dX + c * term * (E0 + a * sk * u / omu)
            dY = dY + c * sk * term / omu
    K = base * K
    if not derivatives:
        return K
    return K, base * dX / one, base * dY * one ** (-a)


def bergman_kernel(kp: KernelParams, p, q):
    d = kp.domain
    p = as_points(d, p)
    q = as_points(d, q)
    _require_interior(d, p, q)
    X, Y = block_pairings(d, p, q)
    return _kernel_xy(kp, X, Y)


def weighted_ball_kernel(N: int, sigma: float, p, q):
    """Gamma(N+sigma+1) / (pi^N Gamma(sigma+1)) (1 - <xi, xi'>)^-(N+1+sigma) on the ball of C^N."""
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    const = math.exp(gammaln(N + sigma + 1) - N * math.log(math.pi) - gammaln(sigma + 1))
    return const * (1.0 - np.sum(p * np.conj(q), axis=-1)) ** (-(N + 1 + sigma))


def g_exponents(d: EggDomain, sigma: float):
    """(power of 1 - X in the numerator, power of D in the denominator) for G_sigma."""
    if d.a <= 1:
        top = (d.a - 1) * (d.n + 2) / 2
    else:
        top = (d.a - 1) * (d.n + 1) / 2
    return top, (sigma + d.m + d.n + 2) / 2


def _g_xy(d: EggDomain, sigma: float, X, Y, one=None):
    top, c = g_exponents(d, sigma)
    if one is None:
        one = 1.0 - X
    u = Y * one ** (-d.a)
    return one ** (top - d.a * c) * (1.0 - u) ** (-c)


def g_sigma(kp: KernelParams, p, q):
    d = kp.domain
    p = as_points(d, p)
    q = as_points(d, q)
    _require_interior(d, p, q)
    X, Y = block_pairings(d, p, q)
    return _g_xy(d, kp.sigma, X, Y)


def _coordinate_factor(d: EggDomain, k: int, q):
    """(d X / d xi_k or d Y / d xi_k, which) for the first argument."""
    if not 0 <= k < d.dim:
        raise IndexError(f"coordinate {k} out of range for dimension {d.dim}")
    return np.conj(q[..., k]), ("X" if k < d.n else "Y")


def kernel_gradient(kp: KernelParams, k: int, p, q):
    """d K(xi, xi') / d xi_k in the first argument, closed form."""
    d = kp.domain
    p = as_points(d, p)
    q = as_points(d, q)
    _require_interior(d, p, q)
    X, Y = block_pairings(d, p, q)
    factor, which = _coordinate_factor(d, k, q)
    _, dX, dY = _kernel_xy(kp, X, Y, derivatives=True)
    return factor * (dX if which == "X" else dY)


def lemma1_ratio(kp: KernelParams, k: int, p, q):
    """|dK/dxi_k (xi, xi')| / |G_sigma(xi, xi')|^2."""
    return np.abs(kernel_gradient(kp, k, p, q)) / np.abs(g_sigma(kp, p, q)) ** 2


def t_quadrature(nodes: int = 32, floor: float = 1e-9, tail: int = 4):
    """Nodes, weights and gaps 1 - t on [0, 1] for integrands that may peak at t = 1.

    ``nodes - tail`` Gauss-Legendre nodes are placed uniformly in log(1 - t)
    between ``floor`` and 1, and ``tail`` more cover 1 - t in [0, floor].
    Integrands of the form (eps + 1 - t)^(-beta) are resolved for every
    eps down to about ``floor``, while smooth integrands keep spectral accuracy.
    The gaps are returned separately because 1 - t loses all precision
    once it drops below the spacing of doubles near 1.
    """
    if not 0 < tail < nodes:
        raise ValueError("need 0 < tail < nodes")
    x, w = np.polynomial.legendre.leggauss(nodes - tail)
    lo = math.log(floor)
    u = np.exp(lo + 0.5 * (x + 1.0) * (-lo))
    wu = 0.5 * w * (-lo) * u
    x2, w2 = np.polynomial.legendre.leggauss(tail)
    gap = np.concatenate([0.5 * (x2 + 1.0) * floor, u])
    return 1.0 - gap, np.concatenate([0.5 * w2 * floor, wu]), gap


def t_floor(d: EggDomain, xi) -> float:
    """Smallest 1 - t the t-rule must resolve when one argument is ``xi``.

    Along t the pairing with xi comes no closer to 1 than about
    min(h(xi), 1 - |z|^2) allows; three decades below that is safe.
    """
    xi = as_points(d, xi)
    zz = float(np.sum(np.abs(xi[: d.n]) ** 2))
    gap = min(float(defining_function(d, xi)), 1.0 - zz)
    return float(np.clip(1e-3 * gap, 1e-18, 1e-9))


def _t_terms(d: EggDomain, p, q, nodes: int = 32):
    """Yield (weight, t X, t Y, 1 - t X) over the t-rule, X, Y the pairings of p and q.

    The rule's floor adapts to whichever of p, q is a single point.
    """
    X, Y = block_pairings(d, p, q)
    single = p if np.ndim(p) == 1 else q
    one = 1.0 - X
    t, wt, gap = t_quadrature(nodes, t_floor(d, single))
    for tk, wk, gk in zip(t, wt, gap):
        yield wk, tk * X, tk * Y, one + gk * X


def _lemma2_values(kp: KernelParams, xi, pts, nodes: int = 32):
    """int_0^1 |G_sigma(t xi, xi')|^2 dt for each xi' in ``pts``."""
    vals = np.zeros(len(pts))
    for wk, tX, tY, one in _t_terms(kp.domain, xi, pts, nodes):
        vals += wk * np.abs(_g_xy(kp.domain, kp.sigma, tX, tY, one)) ** 2
    return vals


def lemma2_integral(kp: KernelParams, mu: float, p, spec: SamplerSpec, nodes: int = 32,
                    index: int = 0) -> MCResult:
    """MC estimate of int_0^1 int h^mu(xi') |G_sigma(t xi, xi')|^2 dv(xi') dt.

    xi' comes from a mixture of h^mu dv and a proposal focused at xi (see
    focused_sample); t is integrated by the graded rule of t_quadrature.
    """
    d = kp.domain
    xi = as_points(d, p)
    _require_interior(d, xi)
    fs = focused_sample(d, mu, xi, spec, index)
    mean, err = fs.mean_and_error(_lemma2_values(kp, xi, fs.points, nodes))
    return MCResult(float(mean), err, fs.total)


def lemma2_ratio(kp: KernelParams, dd: float, p, spec: SamplerSpec, nodes: int = 32) -> float:
    """h^d(xi) times the MC estimate of the double integral with weight h^(sigma - d)."""
    if not 0 < dd < kp.sigma + 1:
        raise ValueError(f"need 0 < d < sigma + 1, got d={dd}")
    d = kp.domain
    est = lemma2_integral(kp, kp.sigma - dd, p, spec, nodes)
    return float(est.estimate.real) * float(defining_function(d, as_points(d, p))) ** dd


def lemma2_series(d: EggDomain, sigma: float, mu: float, p, *, max_terms: int = 100_000) -> float:
    """Exact value of int_0^1 int h^mu(xi') |G_sigma(t xi, xi')|^2 dv(xi') dt.

    Expands G_sigma in the orthogonal family <w,w'>^l / (1 - <z,z'>)^(al+b),
    integrates each squared term in closed form and t^(2(l+j)) over [0, 1].
    The j-sums stop by a ratio-test bound; the l-sum stops once its terms
    have decayed geometrically below 1e-15 of the total.
    """
    if mu <= -1:
        raise ValueError("need mu > -1")
    xi = as_points(d, p)
    zz = float(np.sum(np.abs(xi[: d.n]) ** 2))
    ww = float(np.sum(np.abs(xi[d.n:]) ** 2))
    if float(defining_function(d, xi)) <= 0:
        raise DomainError("series needs an interior point")
    n, m, a = d.n, d.m, d.a
    top, c = g_exponents(d, sigma)
    b = a * c - top
    log_pi = (n + m) * math.log(math.pi)
    log_zz = math.log(zz) if zz > 0 else -np.inf
    log_ww = math.log(ww) if ww > 0 else -np.inf

    def l_term(l):
        r = a * l + b
        A = a * (mu + l + m)
        B = A + n + 1
        pref = (2 * (gammaln(l + c) - gammaln(l + 1) - gammaln(c))
                + log_pi + gammaln(l + 1) + gammaln(mu + 1) + gammaln(A + 1)
                - 2 * gammaln(r) - gammaln(mu + l + m + 1))
        if l:
            pref += l * log_ww
        if zz == 0:
            return pref + 2 * gammaln(r) - gammaln(B) - math.log(2 * l + 1)

        def logterm(j):
            return (2 * gammaln(j + r) + j * log_zz - gammaln(B + j) - gammaln(j + 1)
                    - np.log(2 * (l + j) + 1))

        def ratio(j):
            return zz * (j + r) ** 2 / ((j + B) * (j + 1))

        slope, icpt = B + 1 - 2 * r, 2 * B - r - r * B
        j_crit = -icpt / slope if slope != 0 else 0.0
        return pref + _log_series_sum(logterm, lambda j: max(ratio(j), zz),
                                      lambda j: j > j_crit, max_terms)

    if ww == 0:
        return math.exp(l_term(0))
    total = -np.inf
    prev = None
    shrinking = 0
    for l in range(max_terms):
        lt = l_term(l)
        total = np.logaddexp(total, lt)
        if prev is not None:
            q = math.exp(lt - prev)
            shrinking = shrinking + 1 if q < 1 else 0
            if shrinking >= 5 and q < 1 and lt + math.log(q) - math.log1p(-q) - total < math.log(1e-15):
                return float(math.exp(total))
        prev = lt
    raise SeriesTruncationError(f"l-series not converged within {max_terms} terms")
