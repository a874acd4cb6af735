"""Split a polynomial along coordinate rays and put it back together.

    python demos/decomposition.py
"""
from fractions import Fraction

from eggbergman.taylor import TaylorPoly, gleason_decompose, leibenson_component, multiplier_transform, reassemble

z, w = TaylorPoly.variable(2, 0), TaylorPoly.variable(2, 1)
f = 3 * z * w * w + Fraction(1, 2) * z * z + w + 7

print("f            =", f.to_text().replace("\n", " | "))
parts = [leibenson_component(f, k) for k in range(2)]
for k, g in enumerate(parts):
    print(f"T_{k} f        =", g.to_text().replace("\n", " | "))

# the rays recover f up to its value at the origin
back = z * parts[0] + w * parts[1]
print("z T_0 f + w T_1 f == f - f(0):", back == f - f.constant_term())

# on coefficients xi_k T_k is the multiplier alpha_k / |alpha|
print("multiplier on z w^2 (k=0):", multiplier_transform(z * w * w, 0).to_text().strip())

g = f - f.constant_term() - w
order2 = gleason_decompose(g, 2)
for alpha, A in sorted(order2.items()):
    print(f"A_{alpha} =", A.to_text().replace("\n", " | "))
print("sum xi^alpha A_alpha == g:", reassemble(order2, 2) == g)
