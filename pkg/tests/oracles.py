"""Brute-force reference computations on finite quotients.

Nothing here calls the lattice code: subgroups are explicit sets of
residue vectors and the endomorphisms act by direct arithmetic.
"""
from __future__ import annotations

from itertools import product


def span_mod(basis, p: int, K: int) -> set:
    """All Z-combinations of the integer columns, reduced mod p^K."""
    m = p ** K
    d = len(basis[0])
    out = {tuple([0] * d)}
    frontier = list(out)
    while frontier:
        nxt = []
        for v in frontier:
            for col in basis:
                w = tuple((a + b) % m for a, b in zip(v, col))
                if w not in out:
                    out.add(w)
                    nxt.append(w)
        frontier = nxt
    return out


def diag_level_index(exps, basis, p: int, n: int, K: int) -> int:
    """[W : W cap alpha^{-n}(W)] for alpha = diag(p^e_i) on Q_p^d.

    W is spanned by integer columns and contains p^K Z_p^d.  Counting is
    done in a box Z_p^d / prod p^{b_i} Z_p, large enough that both
    subgroups contain the box kernel.
    """
    Wset = span_mod(basis, p, K)
    d = len(exps)
    # coordinate i of alpha^n x is p^{n e_i} x_i; it is determined mod p^K once x_i is known mod p^{K - n e_i}
    bounds = [max(K, K - n * e) for e in exps]
    inW = inBoth = 0
    for x in product(*[range(p ** b) for b in bounds]):
        if tuple(c % p ** K for c in x) not in Wset:
            continue
        inW += 1
        y = []
        ok = True
        for c, e in zip(x, exps):
            s = n * e
            if s >= 0:
                y.append((c * p ** s) % p ** K)
            elif c % p ** (-s):
                ok = False
                break
            else:
                y.append((c // p ** (-s)) % p ** K)
        if ok and tuple(y) in Wset:
            inBoth += 1
    return inW // inBoth


def shift_level_index(m: int, allowed: set, k: int, n: int, variant: str, q: int = 1) -> int:
    """[W : W cap alpha^{-n}(W)] for the shift by q on sequences over Z/m.

    W is {f : (f(0), ..., f(k-1)) in allowed}; restricted sequences vanish
    below 0, so alpha^n(f) stays supported on n >= 0 only when f(0..nq-1) = 0.
    """
    L = k + n * q
    inW = inBoth = 0
    for f in product(range(m), repeat=L):
        if f[:k] not in allowed:
            continue
        inW += 1
        if variant == "restricted" and any(f[: n * q]):
            continue
        if f[n * q: n * q + k] in allowed:
            inBoth += 1
    return inW // inBoth


def window_set(m: int, k: int, generators) -> set:
    """Subgroup of (Z/m)^k generated by the given vectors."""
    out = {tuple([0] * k)}
    frontier = list(out)
    while frontier:
        nxt = []
        for v in frontier:
            for g in generators:
                w = tuple((a + b) % m for a, b in zip(v, g))
                if w not in out:
                    out.add(w)
                    nxt.append(w)
        frontier = nxt
    return out


def tree_level_sizes(s: int, depth: int) -> list[int]:
    return [s ** i for i in range(depth + 1)]
