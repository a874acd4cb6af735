"""Reproducible point sets on the egg domain.

Every sample's randomness is a pure function of ``(seed, stream, index)``:
samples are grouped into fixed-size blocks and block ``b`` is drawn from a
Philox generator whose counter starts at ``b``.  Results therefore do not
depend on how blocks are spread over workers, and sums are reduced in block
order so they are bit-identical for any worker count.

Draws from the density proportional to h^sigma on Omega_a are exact:

* s = |z|^2 ~ Beta(n, a(sigma + m) + 1), the z-marginal after integrating
  out the w-ball of radius (1 - |z|^2)^(a/2);
* |w|^2 / (1 - s)^a ~ Beta(m, sigma + 1);
* both directions uniform on their unit spheres.

sigma = 0 gives the uniform volume measure.
"""
from __future__ import annotations

import enum
import functools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import betaincinv

from .domain import EggDomain, defining_function

__all__ = [
    "BLOCK_SIZE",
    "Stratification",
    "SamplerSpec",
    "block_generator",
    "iter_blocks",
    "sample_weighted",
    "sample_uniform",
    "sample_at_levels",
    "points_at_levels",
    "log_levels",
    "check_level",
]

BLOCK_SIZE = 1 << 14
_MASK64 = (1 << 64) - 1


class Stratification(str, enum.Enum):
    NONE = "none"
    RADIAL = "radial"


@dataclass(frozen=True)
class SamplerSpec:
    sample_count: int = 1_000_000
    seed: int = 0
    stratification: Stratification = Stratification.NONE
    stream: int = 0

    def __post_init__(self):
        if int(self.sample_count) != self.sample_count or self.sample_count < 1:
            raise ValueError(f"sample_count must be >= 1, got {self.sample_count!r}")
        if not 0 <= int(self.seed) <= _MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "sample_count", int(self.sample_count))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "stratification", Stratification(self.stratification))

    def substream(self, stream: int) -> "SamplerSpec":
        """Same seed, independent stream of randomness."""
        return replace(self, stream=int(stream) & _MASK64)

    def with_count(self, sample_count: int) -> "SamplerSpec":
        return replace(self, sample_count=sample_count)


def block_generator(spec: SamplerSpec, block: int) -> np.random.Generator:
    key = spec.seed | (spec.stream << 64)
    # The block index sits in the top counter word, far above anything a
    # single block can advance to.
    bitgen = np.random.Philox(key=key, counter=[0, 0, 0, int(block)])
    return np.random.Generator(bitgen)


def _sphere(u1, u2):
    """Uniform directions on the unit sphere of C^k from 2k uniforms (Box-Muller)."""
    r = np.sqrt(-2.0 * np.log1p(-u1))
    g = r * np.exp(2j * np.pi * u2)
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


def _block_points(d: EggDomain, sigma: float, spec: SamplerSpec, block: int, size: int):
    rng = block_generator(spec, block)
    n, m = d.n, d.m
    u = rng.random((size, 2 * n + 2 * m + 2))
    us = u[:, 0]
    if spec.stratification is Stratification.RADIAL:
        idx = block * BLOCK_SIZE + np.arange(size)
        us = (idx + us) / spec.sample_count
    s = betaincinv(n, d.a * (sigma + m) + 1.0, us)
    v = betaincinv(m, sigma + 1.0, u[:, 1])
    zdir = _sphere(u[:, 2: 2 + n], u[:, 2 + n: 2 + 2 * n])
    off = 2 + 2 * n
    wdir = _sphere(u[:, off: off + m], u[:, off + m: off + 2 * m])
    z = np.sqrt(s)[:, None] * zdir
    w = np.sqrt(v * (1.0 - s) ** d.a)[:, None] * wdir
    return np.concatenate([z, w], axis=1)


def iter_blocks(d: EggDomain, sigma: float, spec: SamplerSpec, workers: int = 1):
    """Yield ``(start, points)`` in block order, points drawn from h^sigma dv."""
    if sigma <= -1:
        raise ValueError("weight exponent must exceed -1")
    total = spec.sample_count
    nblocks = -(-total // BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, total - b * BLOCK_SIZE) for b in range(nblocks)]

    def make(b):
        return _block_points(d, sigma, spec, b, sizes[b])

    if workers <= 1 or nblocks == 1:
        for b in range(nblocks):
            yield b * BLOCK_SIZE, make(b)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for b, pts in enumerate(pool.map(make, range(nblocks))):
            yield b * BLOCK_SIZE, pts


def sample_weighted(d: EggDomain, sigma: float, spec: SamplerSpec, workers: int = 1) -> np.ndarray:
    """All ``spec.sample_count`` points from the density proportional to h^sigma.

    The result is read-only and cached: scans reuse one sample set for many
    outer points and integrands.
    """
    return _cached_sample(d, float(sigma), spec, workers)


@functools.lru_cache(maxsize=6)
def _cached_sample(d, sigma, spec, workers):
    pts = np.concatenate([p for _, p in iter_blocks(d, sigma, spec, workers)], axis=0)
    pts.flags.writeable = False
    return pts


def sample_uniform(d: EggDomain, spec: SamplerSpec, workers: int = 1) -> np.ndarray:
    """Points distributed uniformly with respect to volume on Omega_a."""
    return sample_weighted(d, 0.0, spec, workers)


def _radial_scale_for_level(d: EggDomain, xi: np.ndarray, levels: np.ndarray) -> np.ndarray:
    # h(rho * xi) is strictly decreasing in rho; bisect for h(rho * xi) = level.
    zz = np.sum(np.abs(xi[:, : d.n]) ** 2, axis=1)
    ww = np.sum(np.abs(xi[:, d.n:]) ** 2, axis=1)
    lo = np.zeros(len(xi))
    # h <= 0 once rho|z| >= 1 or rho|w| >= 1
    hi = np.minimum(1.0 / np.sqrt(np.maximum(zz, 1e-300)), 1.0 / np.sqrt(np.maximum(ww, 1e-300)))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        h = (1.0 - np.minimum(mid**2 * zz, 1.0)) ** d.a - mid**2 * ww
        above = h > levels
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return lo


def points_at_levels(d: EggDomain, base: np.ndarray, levels) -> np.ndarray:
    """Move each point of ``base`` along its ray until h equals the matching level."""
    levels = np.asarray(levels, dtype=float)
    if np.any((levels <= 0) | (levels > 1)):
        raise ValueError("levels must lie in (0, 1]")
    base = np.asarray(base, dtype=complex)
    if np.any(np.all(base == 0, axis=1) & (levels < 1)):
        raise ValueError("the origin has no ray to move along")
    rho = _radial_scale_for_level(d, base, levels)
    return rho[:, None] * base


def sample_at_levels(d: EggDomain, levels, spec: SamplerSpec) -> np.ndarray:
    """One point per entry of ``levels`` with h(point) equal to that level.

    Directions come from uniform draws; each point is moved along its ray
    until the defining function hits the requested value.  Used to place
    outer points of sup-scans in a controlled boundary layer.
    """
    levels = np.asarray(levels, dtype=float)
    base = sample_uniform(d, spec.with_count(len(levels)))
    return points_at_levels(d, base, levels)


def log_levels(floor: float, count: int) -> np.ndarray:
    """``count`` values of h log-spaced from ``floor`` up to 1."""
    return np.logspace(np.log10(floor), 0.0, count)


def check_level(d: EggDomain, pts: np.ndarray, levels: np.ndarray, rtol=1e-8) -> bool:
    return bool(np.allclose(defining_function(d, pts), levels, rtol=rtol, atol=0))

