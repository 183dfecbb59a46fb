"""Shift endomorphisms on sequences over a cyclic p-group F = Z/p^e.

Two variants share the left shift f(n) -> f(n+1):

* compact: the group is prod_{n>=0} F and U is the whole group;
* restricted: sequences on Z with support bounded below, U the
  sequences supported on n >= 0; the shift is an automorphism.

Elements are stored as sorted tuples of (index, value) pairs with
nonzero values, i.e. finitely supported truncations.
"""
from __future__ import annotations

from itertools import product
from typing import Optional

from ..core import ModelMismatchError, TriBool, transversal
from .coords import CoordDesc, CoordinateModel

AUTOMATON_CAP = 1 << 16


def prime_power(m: int) -> Optional[tuple[int, int]]:
    """(p, e) with m = p^e, or None."""
    if m < 2:
        return None
    p = next(q for q in range(2, m + 1) if m % q == 0)
    e, r = 0, m
    while r % p == 0:
        r //= p
        e += 1
    return (p, e) if r == 1 else None


class ShiftModel(CoordinateModel):
    naxes = 1
    maps = ((0, 0, 1),)

    def __init__(self, m: int, variant: str = "compact", base: Optional[CoordDesc] = None, power: int = 1, name: str = ""):
        pe = prime_power(m)
        if pe is None:
            raise ValueError(f"alphabet order {m} is not a prime power")
        if variant not in ("compact", "restricted"):
            raise ValueError(f"unknown shift variant {variant!r}")
        self.m = m
        self.p, self.e = pe
        self.variant = variant
        self.family = "shift_" + variant
        self.conds = () if variant == "compact" else ((0, 0),)
        self.base = self.whole() if base is None else base
        self.power = power
        self.name = name

    def with_power(self, k: int) -> "ShiftModel":
        return ShiftModel(self.m, self.variant, self.base, self.power * k, self.name)

    def with_base(self, W: CoordDesc) -> "ShiftModel":
        return ShiftModel(self.m, self.variant, W, self.power, self.name)

    # elements
    def _norm(self, d: dict) -> tuple:
        return tuple(sorted((n, v % self.m) for n, v in d.items() if v % self.m))

    def make(self, values, start: int = 0) -> tuple:
        """Element with f(start + i) = values[i]."""
        return self._norm({start + i: v for i, v in enumerate(values)})

    def identity(self):
        return ()

    def check(self, a) -> None:
        ok = isinstance(a, tuple) and all(
            isinstance(t, tuple) and len(t) == 2 and all(isinstance(c, int) for c in t) and 0 < t[1] < self.m
            for t in a
        )
        if ok and self.variant == "compact":
            ok = all(n >= 0 for n, _ in a)
        if not ok:
            raise ModelMismatchError(f"not an element of the {self.family} model over Z/{self.m}: {a!r}")

    def mul(self, a, b):
        self.check(a)
        self.check(b)
        d = dict(a)
        for n, v in b:
            d[n] = d.get(n, 0) + v
        return self._norm(d)

    def inv(self, a):
        self.check(a)
        return self._norm({n: -v for n, v in a})

    def endo_once(self, a):
        if self.variant == "compact":
            return tuple((n - 1, v) for n, v in a if n > 0)
        return tuple((n - 1, v) for n, v in a)

    def regress(self, a):
        self.check(a)
        return tuple((n + self.power, v) for n, v in a)

    # coordinates
    def split(self, x):
        self.check(x)
        neg = tuple(t for t in x if t[0] < 0)
        return (neg or None), {(0, n): v for n, v in x if n >= 0}

    def from_coords(self, coords: dict):
        return self._norm({n: v for (_, n), v in coords.items()})

    def full_preimage(self, D: CoordDesc) -> CoordDesc:
        # preimages of a subgroup of U stay inside U for both variants
        X = D
        for _ in range(self.power):
            X = self._pull_once(X)
        return X

    def element_repr(self, x) -> str:
        if not x:
            return "0"
        return " ".join(f"f({n})={v}" for n, v in x)

    def _known_tidy(self, W: CoordDesc) -> bool:
        # {f : f(0..k-1) = 0} is the image of U under an automorphism power.
        # A window no longer than the shift step gives index m^(qn) exactly:
        # W cap alpha^{-n}(W) = {f(<nq) = 0, window at nq in the same set}.
        if self.variant != "restricted":
            return False
        return W.k <= self.power or W == self.desc_from_vectors(W.k, [])

    # trajectories
    def _window(self, x, k: int) -> tuple:
        d = dict(x)
        return tuple(d.get(n, 0) for n in range(k))

    def _forward(self, x, W, eventually: bool, h: int) -> TriBool:
        top = max([n for n, _ in x] + [-1])
        length = top + 2
        inside = []
        cur = x
        for _ in range(length):
            inside.append(self.member(cur, W))
            cur = self.endo(cur)
        if eventually:
            entry = length
            while entry > 0 and inside[entry - 1]:
                entry -= 1
            if h < entry:
                return TriBool.unknown(h, needed=entry)
            return TriBool.yes(h, entry=entry, steps=length)
        if not all(inside):
            step = inside.index(False)
            return TriBool.no(h, step=step) if step <= h else TriBool.unknown(h)
        return TriBool.yes(h, entry=0, steps=length)

    def _backward_restricted(self, x, W, eventually: bool, h: int) -> TriBool:
        low = min([n for n, _ in x] + [0])
        length = max(W.k - low, 0) // self.power + 2
        inside = []
        cur = x
        for _ in range(length):
            inside.append(self.member(cur, W))
            cur = self.regress(cur)
        if eventually:
            entry = length
            while entry > 0 and inside[entry - 1]:
                entry -= 1
            if h < entry:
                return TriBool.unknown(h, needed=entry)
            return TriBool.yes(h, entry=entry, steps=length)
        if not all(inside):
            step = inside.index(False)
            return TriBool.no(h, step=step) if step <= h else TriBool.unknown(h)
        return TriBool.yes(h, entry=0, steps=length)

    def _surviving_windows(self, W: CoordDesc):
        """Window states in W admitting an infinite chain of preimage windows in W."""
        k, q = W.k, self.power
        states = {s for s in product(range(self.m), repeat=k) if self.member(self.make(s), W)}
        while True:
            keep = {
                s for s in states
                if any((a + s)[:k] in states for a in product(range(self.m), repeat=q))
            }
            if keep == states:
                return states
            states = keep

    def member_plus(self, x, h, W=None):
        self.check(x)
        W = self.base if W is None else W
        if self.variant == "restricted":
            return self._backward_restricted(x, W, False, h)
        if not self.member(x, W):
            return TriBool.no(h, step=0)
        if W.k == 0:
            return TriBool.yes(h, entry=0, steps=0)
        if self.m ** W.k > AUTOMATON_CAP:
            return TriBool.unknown(h, reason="window automaton too large")
        if self._window(x, W.k) in self._surviving_windows(W):
            return TriBool.yes(h, entry=0, steps=W.k, certificate="surviving window automaton")
        return TriBool.no(h, step=1, reason="every preimage chain leaves the subgroup")

    def member_minus(self, x, h, W=None):
        self.check(x)
        return self._forward(x, self.base if W is None else W, False, h)

    def member_plusplus(self, x, h, W=None):
        self.check(x)
        W = self.base if W is None else W
        # zero padding pushes the support past the window
        return self._backward_restricted(x, W, True, h)

    def member_minusminus(self, x, h, W=None):
        self.check(x)
        W = self.base if W is None else W
        if self.variant == "restricted" and x:
            return TriBool.no(h, reason="nonzero orbit of an automorphism drifts below the support bound")
        return self._forward(x, W, True, h)

    def seed_in_neighbours(self, W, h):
        if self.variant == "restricted":
            return [self.identity()], True
        P = self.full_preimage(W)
        return transversal(self, P, self.intersect(P, W)), True

    def sample_plus(self, W, rng):
        W = self.base if W is None else W
        for _ in range(50):
            x = self.random_element(W, rng)
            if self.member_plus(x, 64, W).is_yes:
                return x
        return self.identity()
