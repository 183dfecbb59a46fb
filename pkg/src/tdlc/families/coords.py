"""Subgroups of products of cyclic p-groups described on finite windows.

The ambient compact group is a product of ``naxes`` copies of
prod_{n>=0} Z/p^e.  A descriptor fixes a window of the first k
coordinates on every axis, a subgroup of (Z/p^e)^{naxes*k} on that
window, and leaves all later coordinates free.  Subgroups of
(Z/p^e)^N are stored as lattices between p^e Z_p^N and Z_p^N, which
makes the canonical Hermite form of the lattice module a canonical
form for them too.

The endomorphism, restricted to the ambient group, must be a coordinate
map: target coordinate (a, n) copies source coordinate (b, n + shift),
and a listed set of source coordinates must vanish for the image to
stay in the ambient group.  Families for which leaving the ambient
group is permanent can then compute {x in W : alpha^n(x) in D} by
iterating one-step pullbacks.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Optional

from ..core import GroupModel
from ..lattice import Lattice


@dataclass(frozen=True)
class CoordDesc:
    """Window length k and a lattice on naxes*k coordinates (axis-major)."""

    k: int
    lattice: Optional[Lattice]  # None when k == 0 (whole ambient group)


class CoordinateModel(GroupModel):
    """Shared descriptor machinery; subclasses supply elements and the map."""

    p: int
    e: int
    naxes: int
    maps: tuple = ()  # (target_axis, source_axis, shift)
    conds: tuple = ()  # (axis, n) that must vanish

    # hooks -------------------------------------------------------------
    def split(self, x) -> tuple[Hashable, dict]:
        """(part outside the ambient group or None, coordinates {(axis, n): value})."""
        raise NotImplementedError

    def from_coords(self, coords: dict):
        raise NotImplementedError

    # descriptor helpers --------------------------------------------------
    @property
    def modulus(self) -> int:
        return self.p ** self.e

    def whole(self) -> CoordDesc:
        return CoordDesc(0, None)

    def _memo(self, name: str, key, fn):
        cache = self.__dict__.setdefault("_memo_" + name, {})
        if key not in cache:
            cache[key] = fn()
        return cache[key]

    def _lat(self, D: CoordDesc, k: int) -> Lattice:
        """D's lattice re-expressed on a window of length k >= D.k."""
        return self._memo("lat", (D, k), lambda: self._lat_raw(D, k))

    def _lat_raw(self, D: CoordDesc, k: int) -> Lattice:
        n = self.naxes * k
        gens = []
        if D.k:
            for col in D.lattice.basis:
                v = [Fraction(0)] * n
                for a in range(self.naxes):
                    for i in range(D.k):
                        v[a * k + i] = col[a * D.k + i]
                gens.append(v)
        for a in range(self.naxes):
            for i in range(D.k, k):
                v = [Fraction(0)] * n
                v[a * k + i] = Fraction(1)
                gens.append(v)
        return Lattice.from_generators(gens, n, self.p)

    def _make(self, k: int, L: Lattice) -> CoordDesc:
        """Canonical descriptor: shrink the window while its last layer is free."""
        while k > 0:
            last = [a * k + k - 1 for a in range(self.naxes)]
            unit = lambda j: [Fraction(int(i == j)) for i in range(self.naxes * k)]
            if not all(L.contains(unit(j)) for j in last):
                break
            keep = [a * k + i for a in range(self.naxes) for i in range(k - 1)]
            k -= 1
            if k == 0:
                return CoordDesc(0, None)
            L = Lattice.from_generators([[col[j] for j in keep] for col in L.basis], self.naxes * k, self.p)
        if k == 0:
            return CoordDesc(0, None)
        return CoordDesc(k, L)

    def desc_from_vectors(self, k: int, vectors) -> CoordDesc:
        """Subgroup generated by window vectors (length naxes*k) and p^e on the window."""
        n = self.naxes * k
        gens = [[Fraction(self.modulus) if i == j else 0 for i in range(n)] for j in range(n)]
        gens += [list(map(Fraction, v)) for v in vectors]
        return self._make(k, Lattice.from_generators(gens, n, self.p))

    def _vec(self, coords: dict, k: int) -> list:
        return [Fraction(coords.get((a, i), 0)) for a in range(self.naxes) for i in range(k)]

    def _elem(self, vec, k: int):
        m = self.modulus
        coords = {}
        for a in range(self.naxes):
            for i in range(k):
                c = int(vec[a * k + i]) % m
                if c:
                    coords[(a, i)] = c
        return self.from_coords(coords)

    def _window_of(self, coords: dict) -> int:
        return max([n + 1 for (_, n) in coords] + [0])

    # descriptor operations ----------------------------------------------
    def member(self, x, D: CoordDesc) -> bool:
        out, coords = self.split(x)
        if out is not None:
            return False
        if D.k == 0:
            return True
        return not any(D.lattice.reduce(self._vec(coords, D.k)))

    def coset_key(self, x, D: CoordDesc):
        out, coords = self.split(x)
        if D.k == 0:
            return (out, ())
        r = D.lattice.reduce(self._vec(coords, D.k))
        return (out, tuple(int(c) for c in r))

    def intersect(self, D1: CoordDesc, D2: CoordDesc) -> CoordDesc:
        return self._memo("meet", (D1, D2), lambda: self._intersect_raw(D1, D2))

    def _intersect_raw(self, D1: CoordDesc, D2: CoordDesc) -> CoordDesc:
        k = max(D1.k, D2.k)
        if k == 0:
            return self.whole()
        return self._make(k, self._lat(D1, k).intersect(self._lat(D2, k)))

    def _pull_once(self, X: CoordDesc) -> CoordDesc:
        """{x in ambient : alpha_basic(x) in X} for the basic coordinate map."""
        return self._memo("pull", X, lambda: self._pull_once_raw(X))

    def _pull_once_raw(self, X: CoordDesc) -> CoordDesc:
        shift = max([s for _, _, s in self.maps] + [0])
        K = max(X.k + shift, max([n + 1 for _, n in self.conds] + [0]), 1)
        nt = self.naxes * X.k + len(self.conds)
        rows = []
        for a in range(self.naxes):
            for i in range(X.k):
                row = [Fraction(0)] * (self.naxes * K)
                for ta, sa, s in self.maps:
                    if ta == a and 0 <= i + s < K:
                        row[sa * K + i + s] = Fraction(1)
                rows.append(row)
        for a, n in self.conds:
            row = [Fraction(0)] * (self.naxes * K)
            row[a * K + n] = Fraction(1)
            rows.append(row)
        if nt == 0:
            return self.whole()
        tgens = []
        if X.k:
            for col in X.lattice.basis:
                tgens.append(list(col) + [Fraction(0)] * len(self.conds))
        for j in range(len(self.conds)):
            v = [Fraction(0)] * nt
            v[self.naxes * X.k + j] = Fraction(self.modulus)
            tgens.append(v)
        target = Lattice.from_generators(tgens, nt, self.p)
        within = Lattice.standard(self.naxes * K, self.p)
        return self._make(K, target.preimage(rows, within))

    def preimage_in(self, D: CoordDesc, W: CoordDesc, n: int = 1) -> CoordDesc:
        X = D
        for _ in range(n * self.power):
            X = self._pull_once(X)
        return self.intersect(X, W)

    def certify_tidy(self, W: CoordDesc) -> Optional[bool]:
        # W inside alpha^{-1}(W) means alpha(W) <= W, which is tidy
        if self.preimage_in(W, W, 1) == W:
            return True
        return True if self._known_tidy(W) else None

    def _known_tidy(self, W: CoordDesc) -> bool:
        return False

    def containment_witness(self, K: CoordDesc, H: CoordDesc):
        k = max(K.k, H.k)
        if k == 0:
            return None
        LK, LH = self._lat(K, k), self._lat(H, k)
        w = LK.containment_witness(LH)
        return None if w is None else self._elem(w, k)

    def index(self, K: CoordDesc, H: CoordDesc) -> int:
        k = max(K.k, H.k)
        if k == 0:
            return 1
        return self.p ** (self._lat(H, k).logvol() - self._lat(K, k).logvol())

    def generators(self, K: CoordDesc, H: CoordDesc) -> list:
        k = max(K.k, H.k)
        if k == 0:
            return []
        return [self._elem(col, k) for col in self._lat(K, k).basis]

    def join(self, D: CoordDesc, elems) -> CoordDesc:
        elems = list(elems)
        splits = [self.split(x) for x in elems]
        if any(o is not None for o, _ in splits):
            raise ValueError("join only supports elements of the ambient group")
        k = max([D.k] + [self._window_of(c) for _, c in splits])
        if k == 0:
            return self.whole()
        gens = list(self._lat(D, k).basis) + [self._vec(c, k) for _, c in splits]
        return self._make(k, Lattice.from_generators(gens, self.naxes * k, self.p))

    def describe(self, D: CoordDesc) -> str:
        if D.k == 0:
            return "whole"
        m = self.modulus
        gens = []
        for col in D.lattice.basis:
            v = [int(c) % m for c in col]
            if any(v):
                gens.append("".join(str(c) for c in v))
        return f"window={D.k} mod {m} gens=[{' '.join(gens)}] (+ {m}*everything)"

    def random_subgroup(self, rng, W: Optional[CoordDesc] = None) -> CoordDesc:
        W = self.base if W is None else W
        k = max(W.k, rng.randrange(1, 4))
        base = list(self._lat(W, k).basis)
        vecs = []
        for _ in range(rng.randrange(1, 3)):
            v = [Fraction(0)] * (self.naxes * k)
            for col in base:
                c = rng.randrange(self.modulus)
                v = [a + c * b for a, b in zip(v, col)]
            vecs.append(v)
        n = self.naxes * k
        gens = [[c * self.modulus for c in col] for col in base] + vecs
        return self._make(k, Lattice.from_generators(gens, n, self.p))

    def random_element(self, D: CoordDesc, rng):
        k = D.k + 4  # free coordinates past the window
        v = [Fraction(0)] * (self.naxes * k)
        for col in self._lat(D, k).basis:
            c = rng.randrange(self.modulus)
            v = [a + c * b for a, b in zip(v, col)]
        return self._elem(v, k)
