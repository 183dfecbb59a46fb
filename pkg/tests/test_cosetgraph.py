import pytest

from tdlc.catalogue import build_model, entry
from tdlc.core import HorizonExhaustedError
from tdlc.cosetgraph import (
    CosetContext,
    build_gamma_plus,
    build_gamma_plusplus,
    export,
    from_json,
    rho,
    rho_inv,
)
from oracles import diag_level_index, tree_level_sizes


def model(key):
    return build_model(entry(key).config)


@pytest.mark.parametrize("key,sizes", [
    ("E1", [1, 3, 9, 27]),
    ("E2", [1, 9, 27, 81]),
    ("E3", [1, 2, 4, 8]),
    ("E4", [1, 1, 1, 1]),
    ("E5", [1, 4, 4, 8]),
])
def test_gamma_plus_level_sizes(key, sizes):
    assert build_gamma_plus(model(key), 3).level_sizes() == sizes


def test_level_sizes_match_enumeration():
    # |Gamma+ level i| = [W : W cap alpha^{-i}(W)]
    sizes = build_gamma_plus(model("E2"), 3).level_sizes()
    assert sizes[1:] == [diag_level_index((1, -1), [(1, 1), (0, 3)], 3, n, 1) for n in (1, 2, 3)]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_padic_tree_levels(p):
    g = build_gamma_plus(model(f"P{p}"), 4)
    assert g.level_sizes() == tree_level_sizes(p, 4)


def test_gamma_plusplus_on_non_tidy_below():
    g = build_gamma_plusplus(model("E6"), 3, 64)
    assert g.level_sizes() == [2, 2, 2, 2]
    assert g.meta["d_plus"] == 2 and g.meta["d_minus"] == 2
    for vid in g.vertices:
        if vid[0] > -3:
            assert len(g.out_neighbours(vid)) == 2
        if vid[0] < 0:
            assert len(g.in_neighbours(vid)) == 2


def test_rho_is_inverse_to_rho_inv():
    M = model("P3")
    ctx = CosetContext(M)
    g = build_gamma_plus(M, 3)
    for vid, v in g.vertices.items():
        if v.depth >= 1:
            assert rho(ctx, rho_inv(ctx, v)).vid == vid
            assert rho_inv(ctx, rho(ctx, v)).vid == vid


def test_export_is_deterministic_and_round_trips():
    g = build_gamma_plus(model("E1"), 3)
    a, b = export(g, "json"), export(build_gamma_plus(model("E1"), 3), "json")
    assert a == b
    assert export(from_json(a), "json") == a
    dot = export(g, "dot").decode()
    assert dot.count("[level=") == 40
    assert dot.startswith("digraph GammaPlus {")
    with pytest.raises(ValueError):
        export(g, "svg")


def test_cap_enforced():
    with pytest.raises(HorizonExhaustedError):
        build_gamma_plus(model("P5"), 4, cap=100)
