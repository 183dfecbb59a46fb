import random
from fractions import Fraction

import pytest

from tdlc.catalogue import build_model, entry
from tdlc.core import ContainmentError, TriBool, chain, index, level, transversal
from tdlc.families.hnn import HnnModel
from tdlc.families.shift import ShiftModel, prime_power

MODELS = ["E1", "E2", "E3", "E4", "E5", "P3", "H3", "E6"]


def model(key):
    return build_model(entry(key).config)


@pytest.mark.parametrize("key", MODELS)
def test_chain_composes(key):
    # U_{-n-m} = (U_{-n})_{-m}
    M = model(key)
    full = chain(M, 5, M.base)
    for n in range(0, 4):
        for m in range(0, 5 - n + 1):
            if n + m > 5:
                continue
            inner = chain(M, m, full.descriptors[n])
            assert inner.descriptors[m] == full.descriptors[n + m]


@pytest.mark.parametrize("key", MODELS)
def test_index_multiplicative_and_transversal_sound(key):
    M = model(key)
    ch = chain(M, 3, M.base)
    K, Mid, H = ch.descriptors[0], ch.descriptors[1], ch.descriptors[3]
    assert M.index(K, H) == M.index(K, Mid) * M.index(Mid, H)
    reps = transversal(M, K, H)
    assert len(reps) == M.index(K, H)
    keys = {M.coset_key(r, H) for r in reps}
    assert len(keys) == len(reps)
    # every coset of a sampled element of K is hit
    rng = random.Random(0)
    for _ in range(20):
        x = M.random_element(K, rng)
        assert M.coset_key(x, H) in keys


def test_index_rejects_non_containment():
    M = model("P3")
    small = level(M, M.base, 1)
    with pytest.raises(ContainmentError):
        index(M, small, M.base)


def test_tribool_monotone_in_horizon():
    M = model("E1")
    rng = random.Random(1)
    for _ in range(20):
        x = M.random_element(M.base, rng)
        seen = None
        for h in (0, 1, 2, 4, 8, 64):
            v = M.member_plus(x, h)
            if v.exact:
                if seen is not None:
                    assert v.status == seen
                seen = v.status


def test_tribool_evidence():
    v = TriBool.yes(5, entry=2)
    assert v.is_yes and v.exact and v.get("entry") == 2
    assert not TriBool.unknown(3).exact


def test_wil_plus_intersection_property():
    # (U_{-n})_+ = U_+ cap U_{-n}, on transversal elements
    for key in ("P3", "E2", "E3"):
        M = model(key)
        U = M.base
        for n in (1, 2):
            Un = chain(M, n, U).descriptors[n]
            for x in transversal(M, U, chain(M, n + 2, U).descriptors[n + 2]):
                lhs = M.member_plus(x, 64, Un)
                rhs_plus = M.member_plus(x, 64, U)
                if lhs.exact and rhs_plus.exact:
                    assert lhs.is_yes == (rhs_plus.is_yes and M.member(x, Un))


def test_padic_regress_round_trip():
    M = model("E1")
    assert M.regress((Fraction(1, 3),)) == (Fraction(1),)
    rng = random.Random(2)
    for _ in range(10):
        x = M.random_element(M.base, rng)
        assert M.endo(M.regress(x)) == x


def test_shift_regress_is_canonical_section():
    S = ShiftModel(2, "compact")
    f = S.make([1, 0, 1])
    assert S.regress(f) == S.make([0, 1, 0, 1])
    assert S.endo(S.regress(f)) == f


def test_prime_power():
    assert prime_power(8) == (2, 3)
    assert prime_power(9) == (3, 2)
    assert prime_power(6) is None


def _random_word(M, rng, length=6):
    x = M.identity()
    for _ in range(length):
        r = rng.random()
        if r < 0.25:
            g = M.t(1)
        elif r < 0.5:
            g = M.t(-1)
        else:
            g = M.pair([rng.randrange(M.m) for _ in range(3)], [rng.randrange(M.m) for _ in range(3)])
        x = M.mul(x, g)
    return x


@pytest.mark.parametrize("m", [2, 3, 4])
def test_hnn_group_axioms_and_homomorphism(m):
    M = HnnModel(m)
    rng = random.Random(m)
    e = M.identity()
    for _ in range(60):
        a, b, c = (_random_word(M, rng) for _ in range(3))
        assert M.mul(M.mul(a, b), c) == M.mul(a, M.mul(b, c))
        assert M.mul(a, M.inv(a)) == e
        assert M.endo(M.mul(a, b)) == M.mul(M.endo(a), M.endo(b))


def test_hnn_relation_and_sample_image():
    M = HnnModel(2)
    # t^{-1} (h1, g2) t = (phi^{-1}(h1), phi(g2))
    lhs = M.mul(M.mul(M.t(-1), M.pair([0, 1], [1])), M.t(1))
    assert lhs == M.pair([1], [0, 1])
    # alpha((1,0,1), (0,1)) = ((0,0,1,0,1), (1))
    assert M.endo(M.pair([1, 0, 1], [0, 1])) == M.pair([0, 0, 1, 0, 1], [1])


def test_hnn_regress_round_trip_in_U():
    M = HnnModel(3)
    rng = random.Random(5)
    for _ in range(30):
        x = M.random_element(M.base, rng)
        y = M.endo(x)
        assert M.endo(M.regress(y)) == y


@pytest.mark.parametrize("m", [2, 3, 4])
def test_hnn_chain_indices(m):
    M = HnnModel(m)
    assert chain(M, 4, M.base).indices == (m,) * 4
