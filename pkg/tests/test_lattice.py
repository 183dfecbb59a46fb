import random
from fractions import Fraction

import pytest

from tdlc.lattice import Lattice, LatticeError, residue, snf_index, val
from oracles import span_mod


def test_valuation_and_residue():
    assert val(Fraction(9, 2), 3) == 2
    assert val(Fraction(2, 27), 3) == -3
    assert val(0, 5) == float("inf")
    r = residue(Fraction(1, 2), 2, 3)
    # 1/2 = 5 mod 9
    assert r == 5
    assert residue(Fraction(1, 3), 1, 3) == Fraction(1, 3)


def test_hermite_form_is_canonical():
    p = 3
    a = Lattice.from_generators([(1, 1), (0, 3)], 2, p)
    b = Lattice.from_generators([(4, 4), (3, 0), (0, 9)], 2, p)
    assert a == b
    assert a.logvol() == 1


def test_rank_deficient_input_rejected():
    with pytest.raises(LatticeError):
        Lattice.from_generators([(1, 1), (2, 2)], 2, 5)


def _random_int_lattice(rng, p, K):
    cols = [(p ** K, 0), (0, p ** K)]
    for _ in range(rng.randint(1, 3)):
        cols.append((rng.randrange(p ** K), rng.randrange(p ** K)))
    return cols


@pytest.mark.parametrize("p", [2, 3, 5])
def test_index_intersection_against_enumeration(p):
    rng = random.Random(p)
    K = 3 if p < 5 else 2
    for _ in range(10):
        g1, g2 = _random_int_lattice(rng, p, K), _random_int_lattice(rng, p, K)
        L1, L2 = (Lattice.from_generators(g, 2, p) for g in (g1, g2))
        S1, S2 = span_mod(g1, p, K), span_mod(g2, p, K)
        assert p ** (2 * K) // len(S1) == p ** L1.logvol()
        meet = L1.intersect(L2)
        assert p ** (2 * K) // len(S1 & S2) == p ** meet.logvol()
        for v in product_box(p ** K):
            assert L1.contains(v) == (v in S1)


def product_box(m):
    return [(a, b) for a in range(m) for b in range(m)]


def test_reduce_is_idempotent_and_class_invariant():
    p = 3
    L = Lattice.from_generators([(1, 1), (0, 3)], 2, p)
    x = (Fraction(7, 2), Fraction(-5))
    r = L.reduce(x)
    assert L.reduce(r) == r
    y = tuple(a + b for a, b in zip(x, (2, 5)))  # 2*(1,1) + (0,3)
    assert L.reduce(y) == r


def test_preimage_under_diagonal_map():
    p = 3
    A = [[Fraction(3), 0], [0, Fraction(1, 3)]]
    U = Lattice.standard(2, p)
    pre = U.preimage(A, U)
    assert pre == Lattice.from_generators([(1, 0), (0, 3)], 2, p)


def test_snf_index_and_witness():
    assert snf_index([[1, 0], [0, 1]], [[3, 0], [0, 9]], 3) == 27
    assert snf_index([[1, 0], [1, 3]], [[3, 0], [0, 3]], 3) == 3
    with pytest.raises(LatticeError) as exc:
        snf_index([[3, 0], [0, 3]], [[1, 0], [0, 1]], 3)
    assert exc.value.witness is not None
