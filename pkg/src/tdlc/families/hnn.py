"""An HNN extension of G1 x G2 with a contracting-expanding endomorphism.

G1 = G2 = prod_{n>=0} A with A = Z/m, and phi is the shift-in embedding
phi(g) = (0, g_0, g_1, ...) onto H = {g : g_0 = 0}.  The group is

    < G1 x G2, t | t^{-1} (h1, g2) t = (phi^{-1}(h1), phi(g2)) >

with beta = phi on G1, identity on G2, beta(t) = t, and alpha = c_t o beta.
On pairs (g1, h2) with h2 in H, alpha is (phi^2(g1), phi^{-1}(h2)).

Elements are Britton normal forms ``(pairs, eps)``: pairs[0] t^eps[0]
pairs[1] ... pairs[-1], where each pair before a t is the canonical
coset representative of the associated subgroup, and no pinch remains.
A pair is itself (g1, g2) with each g a tuple of residues mod m
without trailing zeros.
"""
from __future__ import annotations

from typing import Optional

from ..core import ModelMismatchError, TriBool
from .coords import CoordDesc, CoordinateModel
from .shift import prime_power

T, TINV = 1, -1


def _trim(g) -> tuple:
    g = list(g)
    while g and g[-1] == 0:
        g.pop()
    return tuple(g)


class HnnModel(CoordinateModel):
    family = "hnn"
    naxes = 2
    maps = ((0, 0, -2), (1, 1, 1))
    conds = ((1, 0),)

    def __init__(self, m: int, base: Optional[CoordDesc] = None, power: int = 1, name: str = ""):
        pe = prime_power(m)
        if pe is None:
            raise ValueError(f"|A| = {m} must be a prime power at least 2")
        self.m = m
        self.p, self.e = pe
        self.base = self.whole() if base is None else base
        self.power = power
        self.name = name

    def with_power(self, k: int) -> "HnnModel":
        return HnnModel(self.m, self.base, self.power * k, self.name)

    def with_base(self, W: CoordDesc) -> "HnnModel":
        return HnnModel(self.m, W, self.power, self.name)

    # sequences and pairs -------------------------------------------------
    def seq(self, values) -> tuple:
        return _trim(v % self.m for v in values)

    def _add(self, a, b):
        n = max(len(a), len(b))
        return _trim(((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % self.m for i in range(n))

    def _neg(self, a):
        return tuple((-x) % self.m for x in a)

    @staticmethod
    def phi(g):
        return (0,) + g if g else ()

    @staticmethod
    def phi_inv(g):
        assert not g or g[0] == 0
        return g[1:]

    def _pmul(self, x, y):
        return (self._add(x[0], y[0]), self._add(x[1], y[1]))

    def _pneg(self, x):
        return (self._neg(x[0]), self._neg(x[1]))

    def _theta(self, x):
        # t^{-1} x t for x in H1 x G2
        return (self.phi_inv(x[0]), self.phi(x[1]))

    def _theta_inv(self, x):
        # t x t^{-1} for x in G1 x H2
        return (self.phi(x[0]), self.phi_inv(x[1]))

    # normal forms --------------------------------------------------------
    def pair(self, g1=(), g2=()) -> tuple:
        """The element of G1 x G2 with the given coordinates."""
        return (((self.seq(g1), self.seq(g2)),), ())

    def t(self, power: int = 1) -> tuple:
        return self.britton_reduce([T if power > 0 else TINV] * abs(power))

    def _push(self, pairs: list, eps: list, g) -> None:
        if not isinstance(g, int):
            pairs[-1] = self._pmul(pairs[-1], g)
            return
        last = pairs[-1]
        if eps and eps[-1] == -g:
            if g == T and (not last[0] or last[0][0] == 0):
                pairs.pop()
                eps.pop()
                pairs[-1] = self._pmul(pairs[-1], self._theta(last))
                return
            if g == TINV and (not last[1] or last[1][0] == 0):
                pairs.pop()
                eps.pop()
                pairs[-1] = self._pmul(pairs[-1], self._theta_inv(last))
                return
        if g == T:
            c = (_trim(last[0][:1]), ())
            rest = self._pmul(self._pneg(c), last)
            pairs[-1] = c
            eps.append(T)
            pairs.append(self._theta(rest))
        else:
            c = ((), _trim(last[1][:1]))
            rest = self._pmul(self._pneg(c), last)
            pairs[-1] = c
            eps.append(TINV)
            pairs.append(self._theta_inv(rest))

    def _letters(self, w):
        pairs, eps = w
        yield pairs[0]
        for e, pr in zip(eps, pairs[1:]):
            yield e
            yield pr

    def britton_reduce(self, word) -> tuple:
        """Normal form of a word over t^{+-1} (as +-1) and pairs (g1, g2)."""
        pairs, eps = [((), ())], []
        for g in word:
            if not isinstance(g, int):
                g = (self.seq(g[0]), self.seq(g[1]))
            self._push(pairs, eps, g)
        return (tuple(pairs), tuple(eps))

    def identity(self):
        return (((), ()),), ()

    def check(self, a) -> None:
        try:
            pairs, eps = a
            ok = len(pairs) == len(eps) + 1 and all(e in (T, TINV) for e in eps)
            ok = ok and all(
                len(pr) == 2 and all(isinstance(g, tuple) and g == _trim(g) and all(isinstance(c, int) and 0 <= c < self.m for c in g) for g in pr)
                for pr in pairs
            )
        except (TypeError, ValueError):
            ok = False
        if not ok:
            raise ModelMismatchError(f"not a normal form over A = Z/{self.m}: {a!r}")

    def mul(self, a, b):
        self.check(a)
        self.check(b)
        pairs, eps = list(a[0]), list(a[1])
        for g in self._letters(b):
            self._push(pairs, eps, g)
        return (tuple(pairs), tuple(eps))

    def inv(self, a):
        self.check(a)
        letters = list(self._letters(a))[::-1]
        word = [-g if isinstance(g, int) else self._pneg(g) for g in letters]
        return self.britton_reduce(word)

    def beta(self, a):
        word = [g if isinstance(g, int) else (self.phi(g[0]), g[1]) for g in self._letters(a)]
        return self.britton_reduce(word)

    def conj_t(self, a):
        return self.britton_reduce([T] + list(self._letters(a)) + [TINV])

    def endo_once(self, a):
        return self.conj_t(self.beta(a))

    def in_U(self, a) -> bool:
        return not a[1]

    def regress(self, a):
        """The preimage from the syllable-wise inverse of beta, or None."""
        self.check(a)
        x = a
        for _ in range(self.power):
            z = self.britton_reduce([TINV] + list(self._letters(x)) + [T])
            if any(pr[0] and pr[0][0] != 0 for pr in z[0]):
                return None
            y = self.britton_reduce([g if isinstance(g, int) else (self.phi_inv(g[0]), g[1]) for g in self._letters(z)])
            if self.endo_once(y) != x:
                return None
            x = y
        return x

    def element_repr(self, a) -> str:
        def pr(x):
            return "(" + "".join(map(str, x[0])) + "|" + "".join(map(str, x[1])) + ")"

        out = [pr(a[0][0])]
        for e, x in zip(a[1], a[0][1:]):
            out.append("t" if e == T else "t^-1")
            out.append(pr(x))
        return " ".join(out)

    # coordinates ---------------------------------------------------------
    def split(self, x):
        self.check(x)
        pairs, eps = x
        last = pairs[-1]
        coords = {(a, n): v for a in (0, 1) for n, v in enumerate(last[a]) if v}
        return ((pairs[:-1], eps) if eps else None), coords

    def from_coords(self, coords: dict):
        g = [[0] * (1 + max([n for (b, n) in coords if b == a] + [-1])) for a in (0, 1)]
        for (a, n), v in coords.items():
            g[a][n] = v
        return self.pair(g[0], g[1])

    def descriptor(self, k1: int, k2: int) -> CoordDesc:
        """G1-part free beyond k1 coordinates fixed to zero, same for G2."""
        k = max(k1, k2)
        n = 2 * k
        vecs = []
        for a, ka in ((0, k1), (1, k2)):
            for i in range(ka, k):
                v = [0] * n
                v[a * k + i] = 1
                vecs.append(v)
        return self.desc_from_vectors(k, vecs) if k else self.whole()

    def _known_tidy(self, W: CoordDesc) -> bool:
        # products of a G1 part and a G2 part split as W_+ W_- with W_{--} cap W = W_-
        return any(W == self.descriptor(k1, k2) for k1 in range(W.k + 1) for k2 in range(W.k + 1))

    # trajectories --------------------------------------------------------
    def _walk(self, x, W, step, length):
        inside, cur = [], x
        for _ in range(length):
            if cur is None:
                inside.append(None)
                break
            inside.append(self.member(cur, W))
            cur = step(cur)
        return inside

    def member_plus(self, x, h, W=None):
        self.check(x)
        W = self.base if W is None else W
        if not self.in_U(x):
            return TriBool.no(h, step=0)
        g1 = x[0][0][0]
        length = len(g1) // (2 * self.power) + W.k + 2
        seen = self._walk(x, W, self._regress_in_U, length)
        if all(seen):
            return TriBool.yes(h, entry=0, steps=length) if h >= 0 else TriBool.unknown(h)
        step = next(i for i, s in enumerate(seen) if not s)
        return TriBool.no(h, step=step) if step <= h else TriBool.unknown(h)

    def _regress_in_U(self, x):
        # unique preimage inside U: needs g1 in phi^2(G1)
        (g1, g2), = x[0]
        for _ in range(self.power):
            if any(g1[:2]):
                return None
            g1, g2 = g1[2:], self.phi(g2)
        return self.pair(g1, g2)

    def member_minus(self, x, h, W=None):
        self.check(x)
        W = self.base if W is None else W
        if not self.in_U(x):
            return TriBool.no(h, step=0)
        length = W.k + 2
        seen = self._walk(x, W, self.endo, length)
        if all(seen):
            return TriBool.yes(h, entry=0, steps=length)
        step = next(i for i, s in enumerate(seen) if not s)
        return TriBool.no(h, step=step) if step <= h else TriBool.unknown(h)

    def member_minusminus(self, x, h, W=None):
        self.check(x)
        W = self.base if W is None else W
        cur, n = x, 0
        while not self.in_U(cur):
            if n >= h:
                return TriBool.unknown(h)
            cur, n = self.endo(cur), n + 1
        g2 = cur[0][0][1]
        if g2:
            # the G2 part runs off the front and never returns to U
            return TriBool.no(h, reason="second factor leaves U", step=n)
        entry = n + -(-W.k // (2 * self.power))
        if h < entry:
            return TriBool.unknown(h, needed=entry)
        return TriBool.yes(h, entry=entry, steps=entry)

    def member_plusplus(self, x, h, W=None):
        self.check(x)
        W = self.base if W is None else W
        cur, n = x, 0
        while not self.in_U(cur):
            if n >= h:
                return TriBool.unknown(h)
            cur = self.regress(cur)
            if cur is None:
                return TriBool.unknown(h, reason="no canonical preimage")
            n += 1
        g1 = cur[0][0][0]
        if g1:
            return TriBool.no(h, reason="first factor blocks regression inside U", step=n)
        entry = n + -(-W.k // self.power)
        if h < entry:
            return TriBool.unknown(h, needed=entry)
        return TriBool.yes(h, entry=entry, steps=entry)

    def seed_in_neighbours(self, W, h):
        # inside U the forward-bounded and backward-bounded parts meet trivially
        return [self.identity()], True

    def sample_plus(self, W, rng):
        W = self.base if W is None else W
        for _ in range(50):
            x = self.random_element(W, rng)
            _, c = self.split(x)
            y = self.from_coords({k: v for k, v in c.items() if k[0] == 1})
            for z in (x, y):
                if self.member_plus(z, 64, W).is_yes:
                    return z
        return self.identity()
