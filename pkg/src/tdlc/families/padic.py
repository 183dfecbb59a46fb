"""Linear endomorphisms of Q_p^d with lattice subgroups.

Elements are tuples of rationals viewed inside Q_p^d.  Compact open
subgroups are lattices.  When the matrix is diagonal, trajectory
questions (U_+, U_{--}, ...) are decided exactly: coordinates that blow
up must vanish, contracting coordinates eventually sink below the
lattice, and unit coordinates cycle modulo a power of p.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from ..core import (
    GroupModel,
    ModelMismatchError,
    TriBool,
    UnsupportedRepresentationError,
)
from ..lattice import INF, Lattice, LatticeError, invert, matvec, residue, val

PERIOD_CAP = 100_000


def _frac_matrix(A) -> tuple:
    return tuple(tuple(Fraction(x) for x in row) for row in A)


class PadicModel(GroupModel):
    family = "padic"

    def __init__(self, p: int, A: Sequence[Sequence], U: Lattice, power: int = 1, name: str = ""):
        self.p = p
        self.A = _frac_matrix(A)
        self.d = len(self.A)
        self.base = U
        self.power = power
        self.name = name
        # alpha^power assembled column by column from the basic map
        cols = []
        for j in range(self.d):
            x = tuple(Fraction(int(i == j)) for i in range(self.d))
            for _ in range(power):
                x = tuple(matvec(self.A, x))
            cols.append(x)
        self.Ak = tuple(tuple(cols[j][i] for j in range(self.d)) for i in range(self.d))
        self.diagonal = all(self.A[i][j] == 0 for i in range(self.d) for j in range(self.d) if i != j)
        self.singular = any(self.A[i][i] == 0 for i in range(self.d)) if self.diagonal else _det_zero(self.A)
        self.Ainv = None if self.singular else _frac_matrix(invert(self.Ak))

    def with_power(self, k: int) -> "PadicModel":
        return PadicModel(self.p, self.A, self.base, self.power * k, self.name)

    def with_base(self, W: Lattice) -> "PadicModel":
        return PadicModel(self.p, self.A, W, self.power, self.name)

    # elements
    def identity(self):
        return (Fraction(0),) * self.d

    def check(self, a) -> None:
        if not isinstance(a, tuple) or len(a) != self.d or not all(isinstance(x, (Fraction, int)) for x in a):
            raise ModelMismatchError(f"not an element of Q_{self.p}^{self.d}: {a!r}")

    def mul(self, a, b):
        self.check(a)
        self.check(b)
        return tuple(Fraction(x) + y for x, y in zip(a, b))

    def inv(self, a):
        self.check(a)
        return tuple(-Fraction(x) for x in a)

    def endo_once(self, a):
        return tuple(matvec(self.A, a))

    def endo(self, a):
        self.check(a)
        return tuple(matvec(self.Ak, a))

    def regress(self, a):
        if self.Ainv is not None:
            return tuple(matvec(self.Ainv, a))
        if not self.diagonal:
            return None
        out = []
        for i, x in enumerate(a):
            lam = self.Ak[i][i]
            if lam == 0:
                if x != 0:
                    return None
                out.append(Fraction(0))
            else:
                out.append(Fraction(x) / lam)
        return tuple(out)

    # descriptors
    def member(self, x, D: Lattice) -> bool:
        return D.contains(x)

    def intersect(self, D1: Lattice, D2: Lattice) -> Lattice:
        return D1.intersect(D2)

    def preimage_in(self, D: Lattice, W: Lattice, n: int = 1) -> Lattice:
        M = self.Ak
        for _ in range(n - 1):
            M = tuple(tuple(r) for r in _mm(self.Ak, M))
        return D.preimage(M, W)

    def full_preimage(self, D: Lattice) -> Optional[Lattice]:
        if self.Ainv is None:
            return None
        return D.image(self.Ainv)

    def image(self, D: Lattice) -> Optional[Lattice]:
        if self.Ainv is None:
            return None
        return D.image(self.Ak)

    def containment_witness(self, K: Lattice, H: Lattice):
        return K.containment_witness(H)

    def index(self, K: Lattice, H: Lattice) -> int:
        return self.p ** (H.logvol() - K.logvol())

    def generators(self, K: Lattice, H: Lattice) -> list:
        return [tuple(c) for c in K.basis]

    def coset_key(self, x, D: Lattice):
        return D.reduce(x)

    def join(self, D: Lattice, elems) -> Lattice:
        return Lattice.from_generators(list(D.basis) + [tuple(e) for e in elems], self.d, self.p)

    def describe(self, D: Lattice) -> str:
        cols = ["(" + ", ".join(str(x) for x in c) + ")" for c in D.basis]
        return "span{" + ", ".join(cols) + "}"

    def element_repr(self, x) -> str:
        return "(" + ", ".join(str(c) for c in x) + ")"

    # trajectories
    def _mults(self, backward: bool):
        out = []
        for i in range(self.d):
            lam = self.Ak[i][i]
            if backward:
                out.append(None if lam == 0 else 1 / lam)
            else:
                out.append(lam)
        return out

    def _K(self, W: Lattice) -> int:
        # least K with p^K Z_p^d inside W
        K = max(0, max(W.exponents()))
        while not all(W.contains([Fraction(self.p) ** K if i == j else 0 for i in range(self.d)]) for j in range(self.d)):
            K += 1
        return K

    def _diag_verdict(self, x, W: Lattice, backward: bool, eventually: bool, h: int) -> TriBool:
        p = self.p
        x = tuple(Fraction(c) for c in x)
        if not any(x):
            return TriBool.yes(h, entry=0, steps=0)
        mults = self._mults(backward)
        for i, (m, c) in enumerate(zip(mults, x)):
            blows_up = m is None or (m != 0 and val(m, p) < 0)
            if blows_up and c != 0:
                if eventually:
                    return TriBool.no(h, coordinate=i, reason="unbounded coordinate")
                step = self._first_escape(x, W, mults, limit=10_000)
                if step is not None and step > h:
                    return TriBool.unknown(h)
                return TriBool.no(h, coordinate=i, step=step)
        K = self._K(W)
        N0 = 0
        for m, c in zip(mults, x):
            if c == 0 or m is None:
                continue
            if m == 0:
                N0 = max(N0, 1)
            elif val(m, p) > 0:
                need = K - val(c, p)
                if need > 0:
                    vm = int(val(m, p))
                    N0 = max(N0, -(-int(need) // vm))
        unit = [i for i, m in enumerate(mults) if m is not None and m != 0 and val(m, p) == 0]
        start = tuple(residue(x[i], K, p) for i in unit)
        P, cur = 1, start
        if unit:
            P = 0
            while True:
                cur = tuple(residue(mults[i] * c, K, p) for i, c in zip(unit, cur))
                P += 1
                if cur == start or P > PERIOD_CAP:
                    break
        length = N0 + P
        traj = [x]
        for _ in range(length - 1):
            traj.append(self._step(traj[-1], mults))
        inside = [W.contains(t) for t in traj]
        if eventually:
            if not all(inside[N0:]):
                return TriBool.no(h, reason="periodic part leaves the subgroup", period=P)
            entry = length
            while entry > 0 and inside[entry - 1]:
                entry -= 1
            if h < max(entry, length):
                return TriBool.unknown(h, needed=max(entry, length))
            return TriBool.yes(h, entry=entry, steps=length)
        if not all(inside):
            step = inside.index(False)
            if step > h:
                return TriBool.unknown(h)
            return TriBool.no(h, step=step)
        if h < length:
            return TriBool.unknown(h, needed=length)
        return TriBool.yes(h, entry=0, steps=length)

    def _step(self, x, mults):
        return tuple(Fraction(0) if m is None else m * c for m, c in zip(mults, x))

    def _first_escape(self, x, W, mults, limit):
        for n in range(limit):
            if not W.contains(x):
                return n
            x = self._step(x, mults)
        return None

    def _general_verdict(self, x, W, backward, eventually, h) -> TriBool:
        if not any(x):
            return TriBool.yes(h, entry=0, steps=0)
        cur = tuple(x)
        for n in range(h + 1):
            if not eventually and not W.contains(cur):
                return TriBool.no(h, step=n)
            nxt = self.regress(cur) if backward else self.endo(cur)
            if nxt is None:
                return TriBool.no(h, step=n + 1, reason="no preimage")
            cur = nxt
        return TriBool.unknown(h)

    def _verdict(self, x, W, backward, eventually, h):
        self.check(x)
        W = self.base if W is None else W
        if self.diagonal:
            return self._diag_verdict(x, W, backward, eventually, h)
        return self._general_verdict(x, W, backward, eventually, h)

    def member_plus(self, x, h, W=None):
        return self._verdict(x, W, True, False, h)

    def member_minus(self, x, h, W=None):
        return self._verdict(x, W, False, False, h)

    def member_plusplus(self, x, h, W=None):
        return self._verdict(x, W, True, True, h)

    def member_minusminus(self, x, h, W=None):
        return self._verdict(x, W, False, True, h)

    def seed_in_neighbours(self, W, h):
        # diagonal case: an element with bounded two-sided orbit has only
        # unit coordinates, and its orbit is a cycle through itself
        return [self.identity()], self.diagonal

    def _split(self):
        p = self.p
        plus, minus, unit = [], [], []
        for i in range(self.d):
            lam = self.Ak[i][i]
            if lam == 0 or val(lam, p) > 0:
                minus.append(i)
            elif val(lam, p) < 0:
                plus.append(i)
            else:
                unit.append(i)
        return plus, minus, unit

    def _part(self, W: Lattice, coords: list, backward: bool) -> Optional[Lattice]:
        """The part of W on the given coordinates whose one-sided orbit stays in W."""
        if not coords:
            return None
        d, p = self.d, self.p
        J = [[Fraction(int(i == c)) for c in coords] for i in range(d)]
        M = max([0] + [-int(val(x, p)) for col in W.basis for x in col if x != 0])
        Y = W.preimage(J, Lattice.standard(len(coords), p, -M))
        sink = Lattice.standard(d, p, self._K(W))
        mults = self._mults(backward)
        Lam = [[Fraction(0)] * len(coords) for _ in coords]
        for a, c in enumerate(coords):
            Lam[a][a] = Fraction(0) if mults[c] is None else mults[c]
        cur = J
        for _ in range(256):
            cur = _mm(cur, Lam)
            Y = W.preimage(cur, Y)
            if all(sink.contains(matvec(cur, col)) for col in Y.basis):
                break
        return Y

    def plus_minus_parts(self, W: Lattice):
        plus, minus, unit = self._split()
        return self._part(W, plus, True), self._part(W, minus, False), plus, minus, unit

    def certify_tidy(self, W: Lattice) -> Optional[bool]:
        if self.preimage_in(W, W, 1) == W:
            return True
        if not self.diagonal:
            return None
        Wp, Wm, plus, minus, unit = self.plus_minus_parts(W)
        if unit:
            return None
        gens = []
        for Y, coords in ((Wp, plus), (Wm, minus)):
            if Y is None:
                continue
            for col in Y.basis:
                v = [Fraction(0)] * self.d
                for a, c in enumerate(coords):
                    v[c] = col[a]
                gens.append(tuple(v))
        try:
            L = Lattice.from_generators(gens, self.d, self.p)
        except LatticeError:
            return False
        return L == W

    def random_element(self, D: Lattice, rng):
        m = self.p ** 3
        x = [Fraction(0)] * self.d
        for col in D.basis:
            c = rng.randrange(m)
            x = [a + c * b for a, b in zip(x, col)]
        return tuple(x)

    def random_subgroup(self, rng, W: Optional[Lattice] = None) -> Lattice:
        W = self.base if W is None else W
        p2 = self.p ** 2
        gens = [tuple(c * p2 for c in col) for col in W.basis]
        for _ in range(rng.randrange(1, 3)):
            x = [Fraction(0)] * self.d
            for col in W.basis:
                c = rng.randrange(p2)
                x = [a + c * b for a, b in zip(x, col)]
            gens.append(tuple(x))
        return Lattice.from_generators(gens, self.d, self.p)

    def sample_plus(self, W, rng):
        W = self.base if W is None else W
        if self.diagonal:
            Wp, _, plus, _, unit = self.plus_minus_parts(W)
            if not unit:
                x = [Fraction(0)] * self.d
                if Wp is not None:
                    for col in Wp.basis:
                        c = rng.randrange(self.p ** 3)
                        for a, i in enumerate(plus):
                            x[i] += c * col[a]
                return tuple(x)
        for _ in range(20):
            x = self.random_element(W, rng)
            if self.member_plus(x, 64, W).is_yes:
                return x
        return self.identity()


def _mm(A, B):
    Bt = list(zip(*B))
    return [[sum((Fraction(a) * b for a, b in zip(row, col)), Fraction(0)) for col in Bt] for row in A]


def _det_zero(A) -> bool:
    try:
        invert(A)
        return False
    except LatticeError:
        return True
