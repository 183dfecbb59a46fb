import random

import pytest

from tdlc.catalogue import CATALOGUE, build_model, entry
from tdlc.core import level, transversal
from tdlc.cosetgraph import build_gamma_plusplus, rho
from tdlc.tidiness import EXACT_YES, index_power_test
from tdlc.tidying import (
    MARGIN,
    PipelineError,
    check_quotient,
    partition_levels,
    quotient,
    run_tidying,
)


def model(key):
    return build_model(entry(key).config)


@pytest.mark.parametrize("e", CATALOGUE, ids=lambda e: e.key)
def test_pipeline_recovers_catalogue_scale(e):
    M = build_model(e.config)
    res = run_tidying(M)
    assert res.scale == e.scale
    assert res.certified
    assert index_power_test(M, res.V).status == EXACT_YES


def test_skew_subgroup_repaired():
    M = model("E2")
    res = run_tidying(M)
    assert res.stage == "quotient"
    assert M.index(res.V, level(M, res.V, 1)) == 3
    assert res.evidence["degree_law"]
    assert res.evidence["tidy_above"]["n"] == 1


def test_finite_cases_short_circuit():
    assert run_tidying(model("E4")).stage == "finite-case"


def test_two_parent_case():
    M = model("E6")
    res = run_tidying(M)
    assert (res.d_plus, res.d_minus) == (2, 2)
    assert res.scale == 1
    assert res.description == "whole"
    assert res.evidence["quotient"]["violations"] == []


@pytest.fixture(scope="module")
def e6_graph():
    M = model("E6")
    return M, build_gamma_plusplus(M, 5, 64)


def test_classes_have_constant_size(e6_graph):
    _, g = e6_graph
    sizes = set()
    for k in range(g.depth - MARGIN + 1):
        P = partition_levels(g, k)
        if P.certified:
            sizes.update(P.sizes())
    assert len(sizes) == 1


def test_classes_compatible_with_rho(e6_graph):
    M, g = e6_graph
    ctx = g.meta["context"]
    for k in range(1, g.depth - MARGIN):
        P, Q = partition_levels(g, k), partition_levels(g, k + 1)
        verts = [g.vertices[v] for c in P.classes for v in c]
        for a in verts:
            for b in verts:
                same = P.class_of(a.vid) == P.class_of(b.vid)
                ra, rb = rho(ctx, a).vid, rho(ctx, b).vid
                assert same == (Q.class_of(ra) == Q.class_of(rb))


def test_classes_compatible_with_action(e6_graph):
    M, g = e6_graph
    ctx = g.meta["context"]
    W = ctx.W
    gens = transversal(M, W, level(M, W, 3))
    k = 2
    P = partition_levels(g, k)
    verts = [g.vertices[v] for c in P.classes for v in c]
    applied = 0
    for x in gens:
        moved = {v.vid: ctx.vertex(M.mul(x, v.rep), k).vid for v in verts}
        if not all(w in g.vertices for w in moved.values()):
            continue
        applied += 1
        for a in verts:
            for b in verts:
                same = P.class_of(a.vid) == P.class_of(b.vid)
                assert same == (P.class_of(moved[a.vid]) == P.class_of(moved[b.vid]))
    assert applied == len(gens)


def test_quotient_is_regular_forest():
    M = model("E2")
    from tdlc.tidiness import tidy_above_search
    Wa, _ = tidy_above_search(M)
    g = build_gamma_plusplus(M, 4, 64, Wa)
    qt = quotient(g)
    rep = check_quotient(qt)
    assert rep["violations"] == []
    assert rep["degree"] == 3
    assert rep["level_sizes"] == [1, 3, 9]


def test_stabilizer_orbits_match_indices():
    # the orbit of V on the depth-i class has size [V : V cap alpha^{-i}(V)]
    M = model("E2")
    res = run_tidying(M)
    for i in range(1, 4):
        assert M.index(res.V, level(M, res.V, i)) == res.evidence["degree"] ** i


def test_pseudo_nub():
    # elements of U_{++} cap U_{--} lie in U when U is tidy; the unit
    # eigenvalue 2 makes that intersection nontrivial
    from fractions import Fraction
    from tdlc.catalogue import config_from_dict
    M = build_model(config_from_dict({"family": "padic", "params": {"p": 3, "A": [[3, 0], [0, 2]]}}))
    assert index_power_test(M).status == EXACT_YES
    rng = random.Random(3)
    hits = 0
    for _ in range(200):
        a = 0 if rng.random() < 0.5 else Fraction(rng.randrange(1, 40), 3 ** rng.randrange(0, 3))
        x = (Fraction(a), Fraction(rng.randrange(-40, 40), 3 ** rng.randrange(0, 3)))
        if M.member_plusplus(x, 64).is_yes and M.member_minusminus(x, 64).is_yes:
            hits += 1
            assert M.member(x, M.base)
    assert hits >= 10


def test_indivisible_valencies_are_reported():
    M = model("E6")
    g = build_gamma_plusplus(M, 3, 64)
    g.meta["d_plus"] = 3
    with pytest.raises(PipelineError):
        quotient(g)
