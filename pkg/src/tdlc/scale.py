"""Scale of an endomorphism, with the spectral and power-law cross-checks."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import GroupModel, HorizonExhaustedError, ModelError, level, transversal
from .cosetgraph import build_gamma_plus, orbit_cap
from .tidiness import AT_HORIZON, EXACT_YES, index_power_test
from .tidying import TidyResult, run_tidying


class ScaleMismatch(ModelError):
    def __init__(self, message: str, reports=None):
        super().__init__(message)
        self.reports = reports


@dataclass
class ScaleReport:
    scale: int
    methods: list
    subgroup: str
    indices: list  # a_n for n = 1..N
    convergence: list  # {n, a_n, root}
    checks: dict = field(default_factory=dict)
    certified: bool = False
    tidy: Optional[TidyResult] = None

    def to_dict(self) -> dict:
        return {
            "scale": self.scale,
            "certified": self.certified,
            "methods": list(self.methods),
            "subgroup": self.subgroup,
            "indices": list(self.indices),
            "convergence": list(self.convergence),
            "checks": self.checks,
            "tidy": None if self.tidy is None else self.tidy.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"


def spectral_estimate(model: GroupModel, W=None, N: int = 6, orbit: bool = True) -> list[dict]:
    """a_n = [alpha^n(W) : alpha^n(W) cap W] for n <= N.

    a_n is the index [W : W cap alpha^{-n}(W)]; when ``orbit`` is set and the
    transversal is small enough it is recounted as the number of cosets
    alpha^n(x) W, x running over a transversal.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    W = model.base if W is None else W
    cap = orbit_cap()
    rows = []
    for n in range(1, N + 1):
        Ln = level(model, W, n)
        a = model.index(W, Ln)
        row = {"n": n, "a_n": a, "root": a ** (1.0 / n)}
        if orbit and a <= min(cap, 50_000):
            reps = transversal(model, W, Ln, cap=cap)
            row["orbit"] = len({model.coset_key(model.endo_n(x, n), W) for x in reps})
        rows.append(row)
    return rows


def scale_via_tidy(model: GroupModel, N: int = 6, maxN: int = 8, h: int = 64, spectral_n: int = 6) -> ScaleReport:
    res = run_tidying(model, N=N, maxN=maxN, h=h)
    V = res.V
    s = model.index(V, level(model, V, 1))
    methods = ["tidy-pipeline"]
    checks = {}
    if s <= 4096:
        g = build_gamma_plus(model, 1, V)
        root = (0, g.meta["context"].key(model.identity(), 0))
        out = len(g.out_neighbours(root))
        checks["out_valency"] = out
        methods.append("out-valency")
        if out != s:
            raise ScaleMismatch(f"root out-valency {out} differs from index {s}")
    trend = spectral_estimate(model, None, spectral_n, orbit=False)
    methods.append("spectral-limit")
    checks["spectral_envelope"] = all(r["a_n"] >= s ** r["n"] for r in trend)
    checks["verification"] = res.verdict.status
    return ScaleReport(s, methods, res.description, [r["a_n"] for r in trend],
                       [{"n": r["n"], "a_n": r["a_n"], "root": round(r["root"], 12), "root_exact": f"{r['a_n']}^(1/{r['n']})"}
                        for r in trend],
                       checks, res.certified, res)


def check_power_law(model: GroupModel, kmax: int = 4, **kw) -> dict:
    """s(alpha^k) = s(alpha)^k for k <= kmax, each power built by self-composition."""
    if kmax < 2:
        raise ValueError("kmax must be at least 2")
    base = scale_via_tidy(model, **kw)
    rows = [{"k": 1, "scale": base.scale, "certified": base.certified}]
    for k in range(2, kmax + 1):
        r = scale_via_tidy(model.with_power(k), **kw)
        rows.append({"k": k, "scale": r.scale, "certified": r.certified})
        if r.scale != base.scale ** k:
            raise ScaleMismatch(f"s(alpha^{k}) = {r.scale} but s(alpha)^{k} = {base.scale ** k}", rows)
    return {"ok": True, "rows": rows}


def cross_check_tidy_pair(model: GroupModel, V1, V2, N: int = 6) -> dict:
    """Two tidy subgroups have the same first-level index."""
    for V in (V1, V2):
        v = index_power_test(model, V, N)
        if v.status not in (EXACT_YES, AT_HORIZON):
            raise ScaleMismatch(f"{model.describe(V)} is not tidy: {v.witness}")
    i1 = model.index(V1, level(model, V1, 1))
    i2 = model.index(V2, level(model, V2, 1))
    if i1 != i2:
        raise ScaleMismatch(f"first-level indices differ: {i1} vs {i2}")
    return {"ok": True, "indices": [i1, i2]}
