"""When the subgroup is tidy above but not below.

In the compact one-sided shift with U = {f(0) = 0}, vertices of the enlarged
coset graph have two parents. Collapsing the level classes gives a quotient
tree of degree d+/d- = 1, and the stabiliser of the root class is tidy.
"""
from tdlc.catalogue import build_model, entry
from tdlc.cosetgraph import build_gamma_plusplus
from tdlc.tidiness import tidy_below_test
from tdlc.tidying import check_quotient, quotient, run_tidying

M = build_model(entry("E6").config)
print("tidy below?", tidy_below_test(M).status, tidy_below_test(M).witness)

g = build_gamma_plusplus(M, 4, 64)
print("d+ =", g.meta["d_plus"], " d- =", g.meta["d_minus"], " level sizes:", g.level_sizes())
print("quotient check:", check_quotient(quotient(g)))

res = run_tidying(M)
print("V:", res.description, " scale:", res.scale)
