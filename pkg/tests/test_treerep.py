import random

import pytest

from tdlc.catalogue import build_model, entry
from tdlc.core import ModelError
from tdlc.tidying import run_tidying
from tdlc.treerep import (
    SemigroupElement,
    WindowExit,
    act,
    build_window,
    compose,
    sample_elements,
    verify_treerep,
)


def model(key):
    return build_model(entry(key).config)


def test_window_shape_e1():
    w = build_window(model("E1"), 2)
    assert w.scale == 3
    assert w.graph.level_sizes() == [81, 27, 9, 3, 1]  # levels -2..2
    for vid in w.graph.vertices:
        if -2 < vid[0] < 2:
            assert len(w.graph.out_neighbours(vid)) == 3
            assert len(w.graph.in_neighbours(vid)) == 1


def test_window_binary_for_hnn():
    w = build_window(model("E3"), 2)
    assert w.graph.level_sizes() == [16, 8, 4, 2, 1]


def test_degenerate_path():
    w = build_window(model("E4"), 3)
    assert w.degenerate
    assert len(w.graph.vertices) == 7
    A = SemigroupElement((), 0, 1)
    assert act(w.model, A, w.ray_vertex(0), w).vid == w.ray_vertex(1).vid
    rep = verify_treerep(model("E4"), 3)
    assert rep["ok"] and rep["elliptic_ok"]


def test_untidy_base_rejected():
    with pytest.raises(ModelError):
        build_window(model("E2"), 2)


def test_alpha_moves_base_ray():
    M = model("P3")
    w = build_window(M, 3)
    A = SemigroupElement(M.identity(), 0, 1)
    for i in range(3):
        assert act(M, A, w.ray_vertex(i), w).vid == w.ray_vertex(i + 1).vid
    with pytest.raises(WindowExit):
        act(M, A, w.ray_vertex(3), w)


def test_pure_elements_fix_ray_beyond_lag():
    M = model("E3")
    w = build_window(M, 3)
    rng = random.Random(4)
    for e in sample_elements(M, w, 30, rng):
        u = SemigroupElement(e.x, e.lag)
        for m in range(e.lag, 4):
            assert act(M, u, w.ray_vertex(m), w).vid == w.ray_vertex(m).vid


def test_composition_law():
    M = model("P2")
    w = build_window(M, 3)
    rng = random.Random(8)
    els = [SemigroupElement(e.x, min(e.lag, 1), min(e.k, 1)) for e in sample_elements(M, w, 20, rng)]
    checked = 0
    for _ in range(300):
        a, b = rng.choice(els), rng.choice(els)
        ab = compose(M, w.ctx.W, a, b)
        assert ab.k == a.k + b.k
        assert M.endo_n(ab.x, ab.lag) == M.mul(a.u(M), M.endo_n(b.u(M), a.k))
        v = w.graph.vertices[rng.choice(list(w.graph.vertices))]
        try:
            seq = act(M, a, act(M, b, v, w), w)
        except WindowExit:
            continue
        assert act(M, ab, v, w).vid == seq.vid
        checked += 1
    assert checked >= 50


@pytest.mark.parametrize("key", ["E1", "E3", "H3", "P2", "P3"])
def test_verify_report(key):
    rep = verify_treerep(model(key), 3)
    assert rep["ok"], rep
    assert rep["valency"] == entry(key).scale + 1
    assert rep["bik_trivial"]
    assert rep["composition_checks"] == 100


def test_bik_recorded_for_compact_shift():
    # finitely supported sequences die under the shift
    rep = verify_treerep(model("E4"), 2)
    assert rep["bik_trivial"] is False


def test_window_on_tidied_subgroup():
    M = model("E2")
    V = run_tidying(M).V
    rep = verify_treerep(M, 2, W=V)
    assert rep["ok"] and rep["scale"] == 3
