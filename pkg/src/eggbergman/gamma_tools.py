"""Log-Gamma helpers and the two Gamma-ratio families behind the weighted
kernel estimate.

All products of Gamma functions are formed in log space; arguments reach
about 1e4 * a in the scans.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "log_gamma",
    "gamma_ratio",
    "Ineq56Params",
    "ineq5_ratio",
    "ineq6_ratio",
    "sup_constant",
    "index_grid",
    "TailProfile",
    "tail_profile",
]


def log_gamma(x):
    """ln Gamma(x) for x > 0 (scalar or array)."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("log_gamma needs x > 0")
    out = gammaln(x)
    return float(out) if out.ndim == 0 else out


def _stirling_tail(u):
    # lnGamma(u) - [(u - 1/2) ln u - u + ln(2 pi)/2]; truncation error < 2e-15 for u >= 20
    r = 1.0 / u
    r2 = r * r
    return r * (1 / 12 - r2 * (1 / 360 - r2 * (1 / 1260 - r2 / 1680)))


_STIRLING_MIN = 20.0


def _log_gamma_ratio(x, t):
    """2 lnGamma(x+t) - lnGamma(t) - lnGamma(2x+t) without cancellation at large t.

    For t >= 20 the Stirling expansion is differenced analytically, leaving
    only terms of size about x; otherwise the log-gammas are small enough
    to subtract directly.
    """
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    direct = 2.0 * gammaln(x + t) - gammaln(t) - gammaln(2.0 * x + t)
    big = t >= _STIRLING_MIN
    tb = np.where(big, t, _STIRLING_MIN)
    h = tb - 0.5
    main = (2.0 * h * np.log1p(x / tb) - h * np.log1p(2.0 * x / tb)
            - 2.0 * x * np.log1p(x / (tb + x)))
    corr = 2.0 * _stirling_tail(tb + x) - _stirling_tail(tb) - _stirling_tail(tb + 2.0 * x)
    return np.where(big, main + corr, direct)


def gamma_ratio(x, t):
    """Gamma(x + t)^2 / (Gamma(t) Gamma(2x + t)); lies in (0, 1] for x >= 0, t > 0."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(x < 0) or np.any(~(t > 0)):
        raise ValueError("gamma_ratio needs x >= 0 and t > 0")
    out = np.exp(_log_gamma_ratio(x, t))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Ineq56Params:
    n: int
    m: int
    a: float
    sigma: float
    d: float

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive")
        if not 0 < self.a <= 2:
            raise ValueError("a must lie in (0, 2]")
        if self.sigma <= -1:
            raise ValueError("sigma must exceed -1")
        if not 0 < self.d < self.sigma + 1:
            raise ValueError(f"need 0 < d < sigma + 1, got d={self.d}, sigma={self.sigma}")

    @property
    def b(self) -> float:
        return (self.a * (self.sigma + self.m) + self.n + 2) / 2

    @property
    def c(self) -> float:
        return (self.sigma + self.m + self.n + 2) / 2

    @property
    def mu(self) -> float:
        return self.sigma - self.d


def _checked(*args):
    for v in args:
        if np.any(~(np.asarray(v) > 0)):
            raise ValueError("Gamma argument <= 0")


def ineq5_ratio(p: Ineq56Params, j, l):
    """Gamma^2(j + la + b) / ((2(l+j)+1) Gamma(a(mu+l+m)+j+n+1) Gamma(j + a(l+d)))."""
    j = np.asarray(j, dtype=float)
    l = np.asarray(l, dtype=float)
    a = p.a
    num = j + l * a + p.b
    den1 = a * (p.mu + l + p.m) + j + p.n + 1
    den2 = j + a * (l + p.d)
    _checked(num, den1, den2)
    out = np.exp(2 * gammaln(num) - np.log(2 * (l + j) + 1) - gammaln(den1) - gammaln(den2))
    return float(out) if out.ndim == 0 else out


def ineq6_ratio(p: Ineq56Params, l):
    """Gamma^2(l+c) Gamma(a(mu+l+m)+1) Gamma(a(l+d)) / (Gamma(l+d) Gamma(mu+l+m+1) Gamma^2(la+b))."""
    l = np.asarray(l, dtype=float)
    a = p.a
    args = (l + p.c, a * (p.mu + l + p.m) + 1, a * (l + p.d), l + p.d, p.mu + l + p.m + 1, l * a + p.b)
    _checked(*args)
    lc, amu, ald, ld, mu1, lab = (gammaln(v) for v in args)
    # pair terms whose arguments coincide at a=1 so they cancel exactly there
    out = np.exp(2 * (lc - lab) + (amu - mu1) + (ald - ld))
    return float(out) if out.ndim == 0 else out


def index_grid(top: int = 10_000, dense: int = 100, per_decade: int = 60) -> np.ndarray:
    """Every index below ``dense`` plus log-spaced integers up to ``top`` (inclusive)."""
    if top < 1:
        raise ValueError("top must be >= 1")
    head = np.arange(min(dense, top + 1))
    if top < dense:
        return head
    decades = np.log10(top) - np.log10(max(dense, 1))
    tail = np.logspace(np.log10(max(dense, 1)), np.log10(top), max(2, int(per_decade * decades) + 1))
    return np.unique(np.concatenate([head, np.round(tail).astype(np.int64), [top]]))


def sup_constant(f, grid):
    """Scan ``f`` over a grid and return ``(max value, index where it occurs)``.

    ``grid`` is a sequence of 1-d index arrays; ``f`` is called once with
    the broadcast meshgrid (``indexing='ij'``) and must return an array of
    the same shape.
    """
    axes = [np.asarray(g) for g in grid]
    if not axes or any(g.size == 0 for g in axes):
        raise ValueError("empty grid")
    mesh = np.meshgrid(*axes, indexing="ij")
    vals = np.asarray(f(*mesh), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("non-finite value in scan")
    flat = int(np.argmax(vals))
    where = np.unravel_index(flat, vals.shape)
    return float(vals[where]), tuple(int(ax[i]) for ax, i in zip(axes, where))


@dataclass(frozen=True)
class TailProfile:
    decade_max: tuple
    monotone: bool        # the decade maxima never increase
    saturating: bool      # the increments between decade maxima never grow
    last_increment: float  # relative change across the final decade

    @property
    def bounded(self) -> bool:
        return self.monotone or (self.saturating and self.last_increment <= 1e-2)


def tail_profile(index, values, top: int | None = None, rtol: float = 1e-9) -> TailProfile:
    """Summarize how a ratio behaves over the last decades of its index range.

    ``index`` holds the controlling index of each value (for a 2-d scan,
    max(j, l)).  Values are grouped by decade [10^k, 10^(k+1)) and the
    maximum per decade is compared across the last three decades.
    Changes below ``rtol`` count as flat: at indices near 1e4 the log-gamma
    differences carry rounding of a few 1e-11 relative.
    """
    index = np.asarray(index).ravel()
    values = np.asarray(values, dtype=float).ravel()
    top = int(index.max()) if top is None else top
    kmax = int(np.floor(np.log10(top)))
    maxima = []
    for k in range(kmax - 3, kmax):
        lo, hi = 10**k, 10 ** (k + 1)
        sel = (index >= lo) & ((index < hi) if k + 1 < kmax else (index <= top))
        maxima.append(float(values[sel].max()))
    inc = np.diff(maxima)
    tol = rtol * max(abs(v) for v in maxima)
    monotone = bool(np.all(inc <= tol))
    saturating = bool(np.all(np.diff(inc) <= tol))
    last = float(inc[-1] / maxima[-1]) if maxima[-1] else 0.0
    return TailProfile(tuple(maxima), monotone, saturating, last)
