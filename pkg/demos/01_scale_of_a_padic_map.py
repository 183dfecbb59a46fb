"""Computing the scale of alpha = diag(3, 1/3) on Q_3^2.

We start from the lattice Z_3^2, confirm it is tidy, read the scale off the
first index, and compare with the limit of root indices.
"""
from tdlc.catalogue import build_model, entry
from tdlc.core import level
from tdlc.cosetgraph import build_gamma_plus
from tdlc.scale import scale_via_tidy, spectral_estimate
from tdlc.tidiness import index_power_test

M = build_model(entry("P3").config)
U = M.base

print("Is Z_3^2 tidy?", index_power_test(M).status)
print("indices [U : U cap alpha^-n(U)]:", [M.index(U, level(M, U, n)) for n in range(1, 5)])

# tidy subgroups give a regular rooted tree; its level sizes are powers of s
print("Gamma+ level sizes:", build_gamma_plus(M, 4).level_sizes())

rep = scale_via_tidy(M)
print("scale:", rep.scale, "certified:", rep.certified)
for row in spectral_estimate(M, None, 5, orbit=False):
    print(f"  n={row['n']}  a_n={row['a_n']}  root={row['root']:.4f}")
