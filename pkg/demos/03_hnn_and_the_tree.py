"""Scale on an HNN extension, then a look at its tree representation.

For the HNN extension over A = Z/3 the scale is |A| = 3. A finite window of the
tree representation has every vertex of valency s + 1 = 4, with the semigroup
fixing one end and the pure elements acting elliptically.
"""
from tdlc.catalogue import build_model, entry
from tdlc.scale import check_power_law, scale_via_tidy
from tdlc.treerep import verify_treerep

M = build_model(entry("H3").config)
print("scale:", scale_via_tidy(M).scale)
print("scales of alpha^k:", [r["scale"] for r in check_power_law(M, 3)["rows"]])

r = verify_treerep(M, n=3)
print("window level sizes:", r["level_sizes"])
print("valency", r["valency"], "everywhere:", r["valency_ok"])
print("end fixed over", r["end_checks"], "checks:", r["end_fixed"])
print("elliptic classification:", r["elliptic_counts"], r["elliptic_ok"])
