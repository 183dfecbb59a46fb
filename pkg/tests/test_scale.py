import json
import random

import pytest

from tdlc.catalogue import build_model, entry
from tdlc.core import level
from tdlc.lattice import Lattice
from tdlc.scale import ScaleMismatch, check_power_law, cross_check_tidy_pair, scale_via_tidy, spectral_estimate
from tdlc.tidiness import EXACT_NO, index_power_test
from oracles import diag_level_index


def model(key):
    return build_model(entry(key).config)


def test_spectral_sequence_on_skew_subgroup():
    rows = spectral_estimate(model("E2"), None, 6)
    a = [r["a_n"] for r in rows]
    assert a == [3 ** (n + 1) for n in range(1, 7)]
    assert a == [diag_level_index((1, -1), [(1, 1), (0, 3)], 3, n, 1) for n in range(1, 7)]
    roots = [r["root"] for r in rows]
    assert all(x > y for x, y in zip(roots, roots[1:]))
    assert all(r > 3 for r in roots)
    # the orbit recount agrees wherever it ran
    assert all(r["orbit"] == r["a_n"] for r in rows if "orbit" in r)


def test_spectral_needs_two_terms():
    with pytest.raises(ValueError):
        spectral_estimate(model("E1"), None, 1)


def test_report_schema():
    rep = scale_via_tidy(model("E1"))
    d = json.loads(rep.to_json())
    assert d["scale"] == 3 and d["certified"]
    assert {"scale", "methods", "indices", "convergence", "checks"} <= set(d)
    assert d["convergence"][0] == {"n": 1, "a_n": 3, "root": 3.0, "root_exact": "3^(1/1)"}
    assert d["checks"]["out_valency"] == 3


@pytest.mark.parametrize("key", ["E1", "E3", "E6"])
def test_power_law_small(key):
    s = entry(key).scale
    out = check_power_law(model(key), 3)
    assert [r["scale"] for r in out["rows"]] == [s, s ** 2, s ** 3]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_tidy_pair(p):
    M = model(f"P{p}")
    V2 = Lattice.from_generators([(p, 0), (0, 1)], 2, p)
    assert cross_check_tidy_pair(M, M.base, V2)["indices"] == [p, p]


def test_tidy_pair_hnn():
    M = model("E3")
    assert cross_check_tidy_pair(M, M.base, level(M, M.base, 1))["indices"] == [2, 2]


def test_tidy_pair_rejects_untidy():
    M = model("E2")
    with pytest.raises(ScaleMismatch):
        cross_check_tidy_pair(M, M.base, M.base)


@pytest.mark.parametrize("key", ["E1", "E2", "E3", "E5", "P3"])
def test_minimality_on_random_subgroups(key):
    # [W : W cap alpha^{-1}(W)] >= s, with equality exactly for tidy W
    M = model(key)
    s = entry(key).scale
    rng = random.Random(11)
    for _ in range(20):
        W = M.random_subgroup(rng)
        a1 = M.index(W, level(M, W, 1))
        assert a1 >= s
        v = index_power_test(M, W)
        if v.exact:
            assert (v.status != EXACT_NO) == (a1 == s)
        rows = spectral_estimate(M, W, 4, orbit=False)
        assert all(r["a_n"] >= s ** r["n"] for r in rows)
