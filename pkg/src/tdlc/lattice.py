"""Exact lattice arithmetic over the p-local integers.

A lattice is a compact open subgroup of Q_p^d given by a basis whose
entries are rationals.  Every lattice is stored in a canonical lower
triangular Hermite form, so two lattices are equal exactly when their
stored bases agree.  Only rationals are ever manipulated; units of
Z_(p) are rationals with numerator and denominator prime to p.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

INF = float("inf")

Vector = tuple  # tuple of Fraction


class LatticeError(ValueError):
    """Raised for rank deficiency or containment failures."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def val(x, p: int) -> float:
    """p-adic valuation of a rational, +inf for zero."""
    x = Fraction(x)
    if x == 0:
        return INF
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def residue(x, e: int, p: int) -> Fraction:
    """Canonical representative of x modulo p^e Z_p.

    The result lies in Z[1/p] with 0 <= result < p^e.
    """
    x = Fraction(x)
    v = val(x, p)
    if v >= e:
        return Fraction(0)
    k = max(0, -int(v))
    y = x * Fraction(p) ** k  # in Z_(p)
    m = p ** (e + k)
    c = (y.numerator * pow(y.denominator, -1, m)) % m
    return Fraction(c, p ** k)


def _as_vec(xs: Iterable) -> Vector:
    return tuple(Fraction(x) for x in xs)


def echelon(columns: Sequence[Sequence], nrows: int, p: int) -> list[tuple[int, list]]:
    """Column echelon form over Z_(p).

    Returns (pivot_row, column) pairs in increasing pivot order.  Each
    pivot entry is a power of p and the column vanishes above its pivot.
    Rows without a usable entry are skipped, so rank deficient input is
    allowed here.
    """
    cols = [list(_as_vec(c)) for c in columns]
    out = []
    for r in range(nrows):
        best, best_v = None, INF
        for i, c in enumerate(cols):
            vv = val(c[r], p)
            if vv < best_v:
                best, best_v = i, vv
        if best is None:
            continue
        piv = cols.pop(best)
        rest = []
        nz = [i for i, b in enumerate(piv) if b]
        for c in cols:
            if c[r] != 0:
                q = c[r] / piv[r]
                for i in nz:
                    c[i] -= q * piv[i]
            if any(c):
                rest.append(c)
        cols = rest
        scale = Fraction(p) ** int(best_v) / piv[r]
        piv = [a * scale for a in piv]
        out.append((r, piv))
    return out


def _reduce_offdiag(pivots: list[tuple[int, list]], p: int) -> list[tuple[int, list]]:
    # reduce each column against later pivots, in increasing row order
    rows = [r for r, _ in pivots]
    cols = [c for _, c in pivots]
    for j in range(len(cols)):
        for i in range(j + 1, len(cols)):
            r = rows[i]
            e = int(val(cols[i][r], p))
            x = cols[j][r]
            q = (x - residue(x, e, p)) / cols[i][r]
            if q:
                cols[j] = [a - q * b if b else a for a, b in zip(cols[j], cols[i])]
    return list(zip(rows, cols))


@dataclass(frozen=True)
class Lattice:
    """Full rank Z_p-lattice in Q_p^d, stored in canonical Hermite form."""

    p: int
    basis: tuple  # columns; column j has pivot p^{e_j} in row j

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def from_generators(cls, gens: Iterable[Sequence], dim: int, p: int) -> "Lattice":
        piv = echelon(list(gens), dim, p)
        if len(piv) != dim:
            raise LatticeError("generators do not span a full rank lattice")
        piv = _reduce_offdiag(piv, p)
        return cls(p, tuple(tuple(c) for _, c in piv))

    @classmethod
    def standard(cls, dim: int, p: int, shift: int = 0) -> "Lattice":
        """p^shift Z_p^dim."""
        s = Fraction(p) ** shift
        return cls.from_generators(
            [[s if i == j else 0 for i in range(dim)] for j in range(dim)], dim, p
        )

    @classmethod
    def from_integrality(cls, B: Sequence[Sequence], p: int) -> "Lattice":
        """The lattice {x : Bx integral at p} for an invertible rational B."""
        return cls.from_generators(_columns(invert(B)), len(B), p)

    def exponents(self) -> list[int]:
        return [int(val(self.basis[j][j], self.p)) for j in range(self.dim)]

    def logvol(self) -> int:
        return sum(self.exponents())

    def reduce(self, x: Sequence) -> Vector:
        """Canonical representative of the coset x + L."""
        x = list(_as_vec(x))
        for j, col in enumerate(self.basis):
            e = int(val(col[j], self.p))
            r = residue(x[j], e, self.p)
            if r != x[j]:
                q = (x[j] - r) / col[j]
                x = [a - q * b if b else a for a, b in zip(x, col)]
        return tuple(x)

    def contains(self, x: Sequence) -> bool:
        return not any(self.reduce(x))

    def contains_lattice(self, other: "Lattice") -> bool:
        return self.containment_witness(other) is None

    def containment_witness(self, other: "Lattice"):
        """A basis vector of other outside self, or None."""
        for col in other.basis:
            if not self.contains(col):
                return col
        return None

    def __add__(self, other: "Lattice") -> "Lattice":
        return Lattice.from_generators(self.basis + other.basis, self.dim, self.p)

    def intersect(self, other: "Lattice") -> "Lattice":
        d = self.dim
        gens = [tuple(c) + tuple(c) for c in self.basis]
        gens += [tuple(c) + (Fraction(0),) * d for c in other.basis]
        piv = echelon(gens, 2 * d, self.p)
        bottom = [c[d:] for r, c in piv if r >= d]
        return Lattice.from_generators(bottom, d, self.p)

    def preimage(self, A: Sequence[Sequence], within: "Lattice") -> "Lattice":
        """{x in within : A x in self}, A mapping Q_p^m to Q_p^d."""
        d, m = self.dim, within.dim
        gens = [tuple(matvec(A, c)) + tuple(c) for c in within.basis]
        gens += [tuple(c) + (Fraction(0),) * m for c in self.basis]
        piv = echelon(gens, d + m, self.p)
        bottom = [c[d:] for r, c in piv if r >= d]
        return Lattice.from_generators(bottom, m, self.p)

    def image(self, A: Sequence[Sequence]) -> "Lattice":
        return Lattice.from_generators([matvec(A, c) for c in self.basis], len(A), self.p)

    def index_in(self, big: "Lattice") -> int:
        """[big : self]; raises with a witness when self is not inside big."""
        w = big.containment_witness(self)
        if w is not None:
            raise LatticeError("lattice not contained in the larger one", witness=w)
        return self.p ** (self.logvol() - big.logvol())


def matvec(A: Sequence[Sequence], x: Sequence) -> list:
    # skipping zeros matters: coordinate maps are sparse 0/1 matrices
    return [sum((Fraction(a) * b for a, b in zip(row, x) if a), Fraction(0)) for row in A]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    Bt = list(zip(*B))
    return [[sum((Fraction(a) * b for a, b in zip(row, col)), Fraction(0)) for col in Bt] for row in A]


def _columns(M: Sequence[Sequence]) -> list[tuple]:
    return [tuple(c) for c in zip(*M)]


def invert(M: Sequence[Sequence]) -> list[list[Fraction]]:
    """Exact inverse by Gauss-Jordan elimination."""
    n = len(M)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        r = next((r for r in range(c, n) if a[r][c] != 0), None)
        if r is None:
            raise LatticeError("matrix is singular")
        a[c], a[r] = a[r], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def snf_exponents(M: Sequence[Sequence], p: int) -> list[int]:
    """Valuations of the elementary divisors of a square rational matrix over Z_(p)."""
    n = len(M)
    a = [[Fraction(x) for x in row] for row in M]
    out = []
    for k in range(n):
        best, bv = None, INF
        for i in range(k, n):
            for j in range(k, n):
                vv = val(a[i][j], p)
                if vv < bv:
                    best, bv = (i, j), vv
        if best is None:
            raise LatticeError("matrix is singular")
        i, j = best
        a[k], a[i] = a[i], a[k]
        for row in a:
            row[k], row[j] = row[j], row[k]
        piv = a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / piv
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
        for j in range(k + 1, n):
            f = a[k][j] / piv
            if f:
                for row in a:
                    row[j] -= f * row[k]
        out.append(int(bv))
    return out


def snf_index(B1: Sequence[Sequence], B2: Sequence[Sequence], p: int) -> int:
    """Index [B1 Z_p^d : B2 Z_p^d] for invertible rational basis matrices.

    The transition matrix B1^{-1} B2 must be p-integral; otherwise the
    second lattice is not inside the first and the error carries a basis
    vector of the second lattice lying outside the first.
    """
    L1 = Lattice.from_generators(_columns(B1), len(B1), p)
    L2 = Lattice.from_generators(_columns(B2), len(B2), p)
    w = L1.containment_witness(L2)
    if w is not None:
        raise LatticeError("second lattice is not contained in the first", witness=w)
    T = matmul(invert(B1), B2)
    return p ** sum(snf_exponents(T, p))
