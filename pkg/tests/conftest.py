import functools

import numpy as np
import pytest

from eggbergman.domain import EggDomain
from eggbergman.kernel import solve_kernel_coefficients

# lines recorded by the acceptance module, echoed at the end of the run
ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def kernel(a, sigma, n=1, m=1):
    return solve_kernel_coefficients(EggDomain(n, m, a), sigma)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_interior(d, rng, count, shrink=0.95):
    """Interior points by rejection from the polydisc (independent of the package samplers)."""
    out = []
    while len(out) < count:
        u = rng.random((4 * count, 2 * d.dim))
        pts = np.sqrt(u[:, : d.dim]) * np.exp(2j * np.pi * u[:, d.dim:])
        zz = np.sum(np.abs(pts[:, : d.n]) ** 2, axis=1)
        ww = np.sum(np.abs(pts[:, d.n:]) ** 2, axis=1)
        out.extend(pts[zz + ww ** (1 / d.a) < 1])
    return shrink * np.array(out[:count])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
