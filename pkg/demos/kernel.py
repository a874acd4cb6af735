"""Recover the weighted kernel of an egg domain and watch it reproduce polynomials.

    python demos/kernel.py [a] [sigma]
"""
import sys

import numpy as np

from eggbergman import EggDomain, SamplerSpec, TaylorPoly, projection_apply, solve_kernel_coefficients
from eggbergman.kernel import bergman_kernel, weighted_ball_kernel

a = float(sys.argv[1]) if len(sys.argv) > 1 else 0.5
sigma = float(sys.argv[2]) if len(sys.argv) > 2 else 1.0
d = EggDomain(1, 1, a)
kp = solve_kernel_coefficients(d, sigma)
print(f"a={a} sigma={sigma}")
for k, c in enumerate(kp.coeffs):
    print(f"  c_{k} = {c.real:+.10g}")
print(f"  C_sigma = {kp.c_sigma:.10g}   residual = {kp.residual:.2e}")

if a == 1.0:
    p = np.array([[0.3, 0.2j], [0.1 - 0.4j, 0.5]])
    q = np.array([[-0.2j, 0.6], [0.7, 0.1j]])
    ratio = bergman_kernel(kp, p, q) / weighted_ball_kernel(2, sigma, p, q)
    print("  ratio to the ball kernel:", np.round(ratio, 12))

z, w = TaylorPoly.variable(2, 0), TaylorPoly.variable(2, 1)
at = np.array([0.25 + 0.1j, 0.2j])
for name, f in (("1", TaylorPoly.constant(2, 1)), ("z w", z * w), ("z^2 + w^3", z * z + w * w * w)):
    r = projection_apply(kp, f, at, SamplerSpec(400_000, seed=1))
    print(f"  T f({name}) = {r.estimate:.5f} +- {r.std_error:.1e}   exact {f(at):.5f}")
