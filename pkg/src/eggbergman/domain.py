"""Geometry of the egg domain

    Omega_a = {(z, w) in C^n x C^m : |z|^2 + |w|^(2/a) < 1},   0 < a <= 2.

Points are stored flat, ``xi = (z_1, ..., z_n, w_1, ..., w_m)``, and every
function here accepts either a single point of shape ``(n + m,)`` or a batch
of shape ``(..., n + m)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "EggDomain",
    "CPoint",
    "as_points",
    "defining_function",
    "contains",
    "pairing",
    "block_pairings",
    "kernel_denominator",
]

# slack allowed when checking that a point lies in the closed domain
_CLOSURE_TOL = 1e-12


class DomainError(ValueError):
    """Raised when a point lies outside the region where a quantity is defined."""


@dataclass(frozen=True)
class EggDomain:
    n: int
    m: int
    a: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m!r}")
        if not 0.0 < self.a <= 2.0:
            raise ValueError(f"a must lie in (0, 2], got {self.a!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "a", float(self.a))

    @property
    def dim(self) -> int:
        return self.n + self.m

    def split(self, xi):
        """Return the (z, w) blocks of a flat point array."""
        xi = as_points(self, xi)
        return xi[..., : self.n], xi[..., self.n:]

    def point(self, z, w) -> np.ndarray:
        return CPoint(z, w).flat(self)


@dataclass(frozen=True)
class CPoint:
    z: tuple
    w: tuple

    def __init__(self, z, w):
        object.__setattr__(self, "z", tuple(complex(v) for v in np.atleast_1d(z)))
        object.__setattr__(self, "w", tuple(complex(v) for v in np.atleast_1d(w)))

    def flat(self, d: EggDomain | None = None) -> np.ndarray:
        if d is not None and (len(self.z), len(self.w)) != (d.n, d.m):
            raise ValueError(
                f"point has blocks of size ({len(self.z)}, {len(self.w)}), "
                f"domain expects ({d.n}, {d.m})"
            )
        return np.array(self.z + self.w, dtype=complex)

    @classmethod
    def from_flat(cls, d: EggDomain, xi) -> "CPoint":
        xi = as_points(d, xi)
        if xi.ndim != 1:
            raise ValueError("from_flat expects a single point")
        return cls(xi[: d.n], xi[d.n:])


def as_points(d: EggDomain, xi) -> np.ndarray:
    if isinstance(xi, CPoint):
        return xi.flat(d)
    xi = np.asarray(xi, dtype=complex)
    if xi.ndim == 0 or xi.shape[-1] != d.dim:
        raise ValueError(f"expected trailing dimension {d.dim}, got shape {xi.shape}")
    return xi


def _sq_norms(d: EggDomain, xi):
    z, w = d.split(xi)
    return np.sum(np.abs(z) ** 2, axis=-1), np.sum(np.abs(w) ** 2, axis=-1)


def defining_function(d: EggDomain, xi):
    """h(z, w) = (1 - |z|^2)^a - |w|^2, positive exactly on the interior."""
    zz, ww = _sq_norms(d, xi)
    if np.any(zz > 1.0):
        raise DomainError("defining function needs |z| <= 1")
    return (1.0 - zz) ** d.a - ww


def _gauge(d: EggDomain, xi):
    zz, ww = _sq_norms(d, xi)
    return zz + ww ** (1.0 / d.a)


def contains(d: EggDomain, xi):
    """Strict membership |z|^2 + |w|^(2/a) < 1."""
    return _gauge(d, xi) < 1.0


def pairing(u, v):
    """Hermitian pairing sum_j u_j conj(v_j) over the last axis."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape[-1:] != v.shape[-1:]:
        raise ValueError(f"length mismatch: {u.shape[-1:]} vs {v.shape[-1:]}")
    return np.sum(u * np.conj(v), axis=-1)


def block_pairings(d: EggDomain, p, q):
    """Return (<z, z'>, <w, w'>) for broadcastable batches of points."""
    z, w = d.split(p)
    zq, wq = d.split(q)
    return pairing(z, zq), pairing(w, wq)


def _require_closed(d: EggDomain, *points):
    for xi in points:
        if np.any(_gauge(d, xi) > 1.0 + _CLOSURE_TOL):
            raise DomainError("point outside the closed egg domain")


def kernel_denominator(d: EggDomain, p, q):
    """(1 - <z, z'>)^a - <w, w'> with the principal power.

    Re(1 - <z, z'>) > 0 whenever both points are interior, so the principal
    branch is continuous there.
    """
    _require_closed(d, p, q)
    zx, wy = block_pairings(d, p, q)
    return (1.0 - zx) ** d.a - wy
