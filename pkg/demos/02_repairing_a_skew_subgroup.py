"""A subgroup that is not tidy, and the pipeline that fixes it.

U' = {(x, y) in Z_3^2 : x = y mod 3} looks harmless, but its index sequence
grows like 3^(n+1) rather than 3^n. The tidying procedure finds a subgroup V
whose first index is the true scale.
"""
from tdlc.catalogue import build_model, entry
from tdlc.core import level
from tdlc.scale import spectral_estimate
from tdlc.tidiness import index_power_test, tree_test
from tdlc.tidying import run_tidying

M = build_model(entry("E2").config)

v = index_power_test(M)
print("index-power test:", v.status, v.witness)
print("tree test:       ", tree_test(M).status, tree_test(M).witness)

print("root sequence on U' (decreasing towards 3):")
for row in spectral_estimate(M, None, 6, orbit=False):
    print(f"  a_{row['n']} = {row['a_n']:>5}   root = {row['root']:.4f}")

res = run_tidying(M)
print("tidied V:", res.description, "found at stage", res.stage)
print("[V : V cap alpha^-1(V)] =", M.index(res.V, level(M, res.V, 1)))
print("V passes:", index_power_test(M, res.V).status)
