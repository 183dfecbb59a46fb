"""Tidiness criteria, each returning a verdict with re-checkable evidence."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import GroupModel, HorizonExhaustedError, chain, level, transversal
from .cosetgraph import CosetContext, build_gamma_plus

EXACT_YES, EXACT_NO, AT_HORIZON = "ExactYes", "ExactNo", "AtHorizonYes"

DEFAULT_N = 6
DEFAULT_MAX_N = 8


class SearchFailure(HorizonExhaustedError):
    def __init__(self, message: str, sequences):
        super().__init__(message)
        self.sequences = sequences


@dataclass(frozen=True)
class TidyVerdict:
    status: str
    criterion: str
    horizon: int = 0
    witness: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.status != AT_HORIZON

    @property
    def passed(self) -> bool:
        return self.status != EXACT_NO

    def to_dict(self) -> dict:
        return {"status": self.status, "criterion": self.criterion, "horizon": self.horizon,
                "witness": {k: _plain(v) for k, v in sorted(self.witness.items())}}


def _plain(v):
    if isinstance(v, (int, str, bool)) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return str(v)


def _upgrade(model: GroupModel, W, criterion: str, N: int, witness: dict) -> TidyVerdict:
    if model.certify_tidy(W) is True:
        return TidyVerdict(EXACT_YES, criterion, N, dict(witness, certificate="family stabilization"))
    return TidyVerdict(AT_HORIZON, criterion, N, witness)


def detect_finite_case(model: GroupModel, N: int = DEFAULT_N, W=None):
    """(V, verdict) when {alpha^{-i}(W)} repeats within N steps, else None."""
    if N < 1:
        raise ValueError("N must be at least 1")
    W = model.base if W is None else W
    descs = [W]
    for j in range(1, N + 1):
        nxt = model.full_preimage(descs[-1])
        if nxt is None:
            return None
        if nxt in descs:
            i = descs.index(nxt)
            V = descs[0]
            for D in descs[1:]:
                V = model.intersect(V, D)
            return V, TidyVerdict(EXACT_YES, "finite-case", N, {"repeat": (i, j), "scale": 1})
        descs.append(nxt)
    return None


def index_power_test(model: GroupModel, W=None, N: int = DEFAULT_N) -> TidyVerdict:
    if N < 2:
        raise ValueError("N must be at least 2")
    W = model.base if W is None else W
    a1 = model.index(W, level(model, W, 1))
    seq = [a1]
    for n in range(2, N + 1):
        an = model.index(W, level(model, W, n))
        seq.append(an)
        if an != a1 ** n:
            return TidyVerdict(EXACT_NO, "index-power", N, {"n": n, "index": an, "expected": a1 ** n, "indices": seq})
    return _upgrade(model, W, "index-power", N, {"indices": seq})


def tree_test(model: GroupModel, W=None, N: int = DEFAULT_N, explicit: bool = False) -> TidyVerdict:
    """Check that Gamma+ of W is a rooted tree with constant out-valency.

    W acts on each level of Gamma+ transitively by graph automorphisms, so
    valencies are read off at the vertices v_{-i}; ``explicit`` builds the
    whole truncated graph and inspects every vertex instead.
    """
    W = model.base if W is None else W
    if explicit:
        return _tree_test_explicit(model, W, N)
    ctx = CosetContext(model, W)
    outs = []
    for i in range(N):
        Li, Lj = ctx.L(i), ctx.L(i + 1)
        both = model.intersect(Li, Lj)
        n_in = model.index(Lj, both)
        n_out = model.index(Li, both)
        if n_in != 1:
            ys = transversal(model, Lj, both, cap=64)
            parents = sorted({repr(ctx.key(y, i)) for y in ys})
            return TidyVerdict(EXACT_NO, "tree", N, {"vertex_depth": i + 1, "in_valency": n_in, "parents": parents[:8]})
        outs.append(n_out)
        if n_out != outs[0]:
            return TidyVerdict(EXACT_NO, "tree", N, {"vertex_depth": i, "out_valency": n_out, "root_out_valency": outs[0]})
    return _upgrade(model, W, "tree", N, {"out_valency": outs[0] if outs else None})


def _tree_test_explicit(model, W, N) -> TidyVerdict:
    g = build_gamma_plus(model, N, W)
    root = (0, g.meta["context"].key(model.identity(), 0))
    base_out = len(g.out_neighbours(root))
    for vid in g.ordered():
        depth = -vid[0]
        if depth > 0 and len(g.in_neighbours(vid)) != 1:
            return TidyVerdict(EXACT_NO, "tree", N, {"vertex_depth": depth, "in_valency": len(g.in_neighbours(vid)),
                                                     "vertex": repr(vid[1])})
        if depth < N and len(g.out_neighbours(vid)) != base_out:
            return TidyVerdict(EXACT_NO, "tree", N, {"vertex_depth": depth, "out_valency": len(g.out_neighbours(vid)),
                                                     "root_out_valency": base_out, "vertex": repr(vid[1])})
    return _upgrade(model, W, "tree", N, {"out_valency": base_out})


def tidy_above_search(model: GroupModel, maxN: int = DEFAULT_MAX_N, window: int = DEFAULT_N, W=None):
    """First W_{-n} whose own index sequence is constant over the window."""
    if maxN < 1:
        raise ValueError("maxN must be at least 1")
    W = model.base if W is None else W
    outer = chain(model, maxN, W)
    seqs = []
    for n in range(maxN + 1):
        V = outer.descriptors[n]
        idx = chain(model, window, V).indices
        seqs.append(idx)
        if len(set(idx)) <= 1:
            return V, {"n": n, "indices": list(idx), "window": window}
    raise SearchFailure(f"no W_-n with constant index sequence for n <= {maxN}", seqs)


def tidy_below_test(model: GroupModel, W=None, h: int = 3, horizon: int = 64, cap: int = 4096) -> TidyVerdict:
    """Look for u in (W_{--} cap W) minus W_-, or in (W_{++} cap W) minus W_+."""
    W = model.base if W is None else W
    bottom = chain(model, h, W).descriptors[-1]
    try:
        reps = transversal(model, W, bottom, cap=cap)
    except HorizonExhaustedError:
        reps = transversal(model, W, chain(model, 1, W).descriptors[-1], cap=cap)
    for u in reps:
        mm = model.member_minusminus(u, horizon, W)
        if mm.is_yes and model.member_minus(u, horizon, W).is_no:
            return TidyVerdict(EXACT_NO, "tidy-below", h, {"element": model.element_repr(u), "part": "minus"})
        pp = model.member_plusplus(u, horizon, W)
        if pp.is_yes and model.member_plus(u, horizon, W).is_no:
            return TidyVerdict(EXACT_NO, "tidy-below", h, {"element": model.element_repr(u), "part": "plus"})
    return _upgrade(model, W, "tidy-below", h, {"checked": len(reps)})
