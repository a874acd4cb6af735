"""Sup-scans toward the boundary for the kernel-gradient and comparison-integral bounds.

The comparison integral is computed two ways at a few points: by Monte
Carlo and from its exact series.  At a=2 it keeps growing as the points
approach the slice w=0, which the scan makes visible.

    python demos/boundary_scans.py
"""
import numpy as np

from eggbergman import EggDomain, SamplerSpec, solve_kernel_coefficients
from eggbergman.analysis import lemma1_scan
from eggbergman.domain import defining_function
from eggbergman.kernel import lemma2_integral, lemma2_series

sigma, dd = 1.0, 0.5
for a in (0.5, 1.0, 2.0):
    d = EggDomain(1, 1, a)
    kp = solve_kernel_coefficients(d, sigma)
    sups = [lemma1_scan(kp, 0, SamplerSpec(1, seed=3), floor=fl, count=20_000).value for fl in (1e-2, 1e-4, 1e-6)]
    print(f"a={a}: gradient ratio sup at floors 1e-2, 1e-4, 1e-6:", " ".join(f"{s:.3g}" for s in sups))
    # points on the slice w = 0 at shrinking distance from the boundary
    for r2 in (0.9, 0.99, 0.999):
        xi = np.array([np.sqrt(r2), 0.0], dtype=complex)
        h = float(defining_function(d, xi))
        exact = lemma2_series(d, sigma, sigma - dd, xi)
        mc = lemma2_integral(kp, sigma - dd, xi, SamplerSpec(50_000, seed=4))
        print(f"    h={h:.2e}  h^d * integral: series {exact * h**dd:.4g}  mc {mc.estimate * h**dd:.4g}")
