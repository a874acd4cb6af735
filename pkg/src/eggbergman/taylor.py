"""Sparse holomorphic polynomials on C^(n+m) and the ray-integral operators.

For f = sum c_alpha xi^alpha the operator

    T_k f(xi) = int_0^1 (d f / d xi_k)(t xi) dt

acts coefficient-wise: c_alpha xi^alpha -> (alpha_k / |alpha|) c_alpha xi^(alpha - e_k),
so sum_k xi_k T_k f = f - f(0).  Iterating gives the order-m decomposition
f = sum_{|alpha| = m} xi^alpha A_alpha f for f vanishing to order m at 0.

Coordinates are 0-based: ``k = 0 .. n+m-1`` with the z-block first.

Coefficients are exact Gaussian rationals when every input coefficient is
an int, Fraction or :class:`GaussRational`; otherwise they are Python
complex numbers.
"""
from __future__ import annotations

import numbers
from fractions import Fraction
from itertools import product

import numpy as np

__all__ = [
    "GaussRational",
    "TaylorPoly",
    "VanishingOrderError",
    "evaluate",
    "partial_derivative",
    "leibenson_component",
    "multiplier_transform",
    "gleason_decompose",
    "reassemble",
    "random_poly",
    "DEGREE_CAP",
]

DEGREE_CAP = 32


class GaussRational:
    """An exact complex number re + i*im with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, x):
        if isinstance(x, GaussRational):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x, 0)
        raise TypeError(f"cannot represent {x!r} exactly")

    def __add__(self, other):
        if isinstance(other, complex | float):
            return complex(self) + other
        o = GaussRational.coerce(other)
        return GaussRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, complex | float):
            return complex(self) * other
        o = GaussRational.coerce(other)
        return GaussRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussRational(self.re / other, self.im / other)
        return complex(self) / other

    def __eq__(self, other):
        if isinstance(other, GaussRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, numbers.Complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        return f"GaussRational({self.re}, {self.im})"


def _is_exact(c) -> bool:
    return isinstance(c, (int, Fraction, GaussRational)) and not isinstance(c, bool)


def _normalize(c, exact: bool):
    if exact:
        return GaussRational.coerce(c)
    return complex(c)


class TaylorPoly:
    """Immutable sparse polynomial: a map multi-index -> coefficient."""

    __slots__ = ("nvars", "terms", "exact")

    def __init__(self, nvars: int, terms=None):
        if nvars < 1:
            raise ValueError("need at least one variable")
        raw = dict(terms or {})
        exact = all(_is_exact(c) for c in raw.values())
        clean = {}
        for alpha, c in raw.items():
            alpha = tuple(int(e) for e in alpha)
            if len(alpha) != nvars or min(alpha) < 0:
                raise ValueError(f"multi-index {alpha} does not have {nvars} non-negative entries")
            if sum(alpha) > DEGREE_CAP:
                raise ValueError(f"degree {sum(alpha)} exceeds cap {DEGREE_CAP}")
            c = _normalize(c, exact)
            if c:
                clean[alpha] = c
        self.nvars = nvars
        self.terms = clean
        self.exact = exact

    # construction helpers

    @classmethod
    def monomial(cls, nvars, alpha, coef=1):
        return cls(nvars, {tuple(alpha): coef})

    @classmethod
    def variable(cls, nvars, k):
        alpha = [0] * nvars
        alpha[k] = 1
        return cls(nvars, {tuple(alpha): 1})

    @classmethod
    def constant(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    @property
    def vanishing_order(self) -> int:
        """Smallest |alpha| with a nonzero coefficient (degree cap + 1 for zero)."""
        return min((sum(a) for a in self.terms), default=DEGREE_CAP + 1)

    def coeff(self, alpha):
        zero = GaussRational() if self.exact else 0j
        return self.terms.get(tuple(alpha), zero)

    def constant_term(self):
        return self.coeff((0,) * self.nvars)

    def is_zero(self) -> bool:
        return not self.terms

    def to_float(self) -> "TaylorPoly":
        return TaylorPoly(self.nvars, {a: complex(c) for a, c in self.terms.items()})

    # arithmetic

    def _check(self, other):
        if other.nvars != self.nvars:
            raise ValueError(f"dimension mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other):
        if not isinstance(other, TaylorPoly):
            other = TaylorPoly.constant(self.nvars, other)
        self._check(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out[a] + c if a in out else c
        return TaylorPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return TaylorPoly(self.nvars, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TaylorPoly):
            return TaylorPoly(self.nvars, {a: c * other for a, c in self.terms.items()})
        self._check(other)
        out = {}
        for (a1, c1), (a2, c2) in product(self.terms.items(), other.terms.items()):
            a = tuple(x + y for x, y in zip(a1, a2))
            out[a] = out[a] + c1 * c2 if a in out else c1 * c2
        return TaylorPoly(self.nvars, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TaylorPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    __hash__ = None

    def max_abs_diff(self, other) -> float:
        self._check(other)
        keys = set(self.terms) | set(other.terms)
        return max((abs(complex(self.coeff(a)) - complex(other.coeff(a))) for a in keys), default=0.0)

    def __call__(self, xi):
        return evaluate(self, xi)

    def __repr__(self):
        body = " + ".join(f"({complex(c):g})*xi^{a}" for a, c in sorted(self.terms.items()))
        return f"TaylorPoly({self.nvars}, {body or '0'})"

    # text format: one term per row, "alpha_1 ... alpha_N re im"

    def to_text(self) -> str:
        rows = []
        for a, c in sorted(self.terms.items()):
            if self.exact:
                re, im = str(c.re), str(c.im)
            else:
                re, im = repr(complex(c).real), repr(complex(c).imag)
            rows.append(" ".join([*map(str, a), re, im]))
        return "\n".join(rows) + ("\n" if rows else "")

    @classmethod
    def from_text(cls, text: str, nvars: int, exact: bool = True) -> "TaylorPoly":
        """Parse the row format; decimal literals are read as exact rationals
        unless ``exact`` is False."""
        terms = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != nvars + 2:
                raise ValueError(f"line {lineno}: expected {nvars + 2} fields, got {len(parts)}")
            alpha = tuple(int(p) for p in parts[:nvars])
            re, im = parts[nvars:]
            c = GaussRational(Fraction(re), Fraction(im)) if exact else complex(float(re), float(im))
            terms[alpha] = terms[alpha] + c if alpha in terms else c
        return cls(nvars, terms)


def evaluate(f: TaylorPoly, xi):
    """sum_alpha c_alpha xi^alpha at one point (shape (N,)) or a batch (shape (..., N))."""
    xi = np.asarray(xi, dtype=complex)
    if xi.shape[-1:] != (f.nvars,):
        raise ValueError(f"point dimension {xi.shape[-1:]} does not match {f.nvars} variables")
    if not f.terms:
        return np.zeros(xi.shape[:-1], dtype=complex) if xi.ndim > 1 else 0j
    deg = f.degree
    # powers[k][e] = xi_k ** e
    powers = [np.stack([xi[..., k] ** e for e in range(deg + 1)]) for k in range(f.nvars)]
    out = np.zeros(xi.shape[:-1], dtype=complex)
    for alpha, c in f.terms.items():
        term = np.full(xi.shape[:-1], complex(c))
        for k, e in enumerate(alpha):
            if e:
                term = term * powers[k][e]
        out = out + term
    return out if xi.ndim > 1 else complex(out)


def _scale(c, num: int, den: int):
    if isinstance(c, GaussRational):
        return c * Fraction(num, den)
    return c * num / den


def partial_derivative(f: TaylorPoly, k: int) -> TaylorPoly:
    if not 0 <= k < f.nvars:
        raise IndexError(f"coordinate {k} out of range for {f.nvars} variables")
    out = {}
    for alpha, c in f.terms.items():
        e = alpha[k]
        if e:
            beta = alpha[:k] + (e - 1,) + alpha[k + 1:]
            out[beta] = _scale(c, e, 1)
    return TaylorPoly(f.nvars, out)


def leibenson_component(f: TaylorPoly, k: int) -> TaylorPoly:
    """T_k f = int_0^1 (d f / d xi_k)(t xi) dt, computed on coefficients."""
    if not 0 <= k < f.nvars:
        raise IndexError(f"coordinate {k} out of range for {f.nvars} variables")
    out = {}
    for alpha, c in f.terms.items():
        e = alpha[k]
        if e:
            beta = alpha[:k] + (e - 1,) + alpha[k + 1:]
            out[beta] = _scale(c, e, sum(alpha))
    return TaylorPoly(f.nvars, out)


def multiplier_transform(f: TaylorPoly, k: int) -> TaylorPoly:
    """c_alpha -> (alpha_k / |alpha|) c_alpha, constant term dropped."""
    if not 0 <= k < f.nvars:
        raise IndexError(f"coordinate {k} out of range for {f.nvars} variables")
    out = {}
    for alpha, c in f.terms.items():
        if alpha[k]:
            out[alpha] = _scale(c, alpha[k], sum(alpha))
    return TaylorPoly(f.nvars, out)


class VanishingOrderError(ValueError):
    def __init__(self, alpha, order):
        self.alpha = alpha
        super().__init__(
            f"coefficient of xi^{alpha} (|alpha| = {sum(alpha)}) is nonzero; "
            f"f must vanish to order {order} at the origin"
        )


def gleason_decompose(f: TaylorPoly, order: int) -> dict:
    """Return {alpha: A_alpha f} over |alpha| = order with sum xi^alpha A_alpha f = f.

    Built by applying T_k ``order`` times.  Each ordered path k_1, ..., k_order
    contributes T_{k_order} ... T_{k_1} f, and paths with the same multiset of
    coordinates are summed into the entry for that multi-index.
    """
    if order < 1:
        raise ValueError("order must be positive")
    for alpha in sorted(f.terms):
        if sum(alpha) < order:
            raise VanishingOrderError(alpha, order)
    level = {(0,) * f.nvars: f}
    for _ in range(order):
        nxt = {}
        for alpha, g in level.items():
            for k in range(f.nvars):
                part = leibenson_component(g, k)
                if part.is_zero():
                    continue
                beta = alpha[:k] + (alpha[k] + 1,) + alpha[k + 1:]
                nxt[beta] = nxt[beta] + part if beta in nxt else part
        level = nxt
    return level


def reassemble(parts: dict, nvars: int) -> TaylorPoly:
    """sum_alpha xi^alpha * parts[alpha]."""
    out = TaylorPoly(nvars)
    for alpha, g in parts.items():
        out = out + TaylorPoly.monomial(nvars, alpha) * g
    return out


def _multi_indices(nvars: int, lo: int, hi: int):
    return [a for a in product(range(hi + 1), repeat=nvars) if lo <= sum(a) <= hi]


def random_poly(rng: np.random.Generator, nvars: int, degree: int, *, nterms: int = 8,
                min_order: int = 0, exact: bool = True, den: int = 12) -> TaylorPoly:
    """Random polynomial with ``nterms`` monomials of total degree in [min_order, degree].

    Exact coefficients are Gaussian rationals with denominators up to ``den``.
    """
    pool = _multi_indices(nvars, min_order, degree)
    picks = rng.choice(len(pool), size=min(nterms, len(pool)), replace=False)
    terms = {}
    for i in picks:
        if exact:
            re = Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, den + 1)))
            im = Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, den + 1)))
            c = GaussRational(re, im)
            if not c:
                c = GaussRational(1, 0)
        else:
            c = complex(rng.normal(), rng.normal())
        terms[pool[int(i)]] = c
    return TaylorPoly(nvars, terms)
