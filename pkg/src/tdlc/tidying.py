"""Geometric tidying: level partitions of the enlarged graph, its quotient
tree, and the setwise stabilizer of the root class."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .core import GroupModel, HorizonExhaustedError, ModelError, chain, level
from .cosetgraph import CosetGraph, build_gamma_plusplus, orbit_cap
from .tidiness import (
    DEFAULT_MAX_N,
    DEFAULT_N,
    EXACT_NO,
    EXACT_YES,
    TidyVerdict,
    detect_finite_case,
    index_power_test,
    tidy_above_search,
)

MARGIN = 2
GRAPH_BUDGET = 20_000


class PipelineError(ModelError):
    def __init__(self, stage: str, message: str, artifacts: Optional[dict] = None):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.artifacts = artifacts or {}


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb, key=repr)] = min(ra, rb, key=repr)


@dataclass(frozen=True)
class LevelPartition:
    k: int
    classes: tuple  # tuple of sorted tuples of vids, sorted
    certified: bool

    def class_of(self, vid) -> tuple:
        return next(c for c in self.classes if vid in c)

    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]


def partition_levels(graph: CosetGraph, k: int) -> LevelPartition:
    """Classes on depth k: components of the graph without edges entering depth k."""
    if graph.depth < k:
        raise ValueError("graph too shallow for this level")
    uf = _UnionFind()
    for vid in graph.vertices:
        uf.find(vid)
    for a, b in graph.edges:
        if k >= 1 and -b[0] == k:
            continue
        uf.union(a, b)
    groups: dict = {}
    for vid in graph.vertices:
        if -vid[0] == k:
            groups.setdefault(uf.find(vid), []).append(vid)
    classes = tuple(sorted((tuple(sorted(c, key=repr)) for c in groups.values()), key=repr))
    certified = graph.depth >= k + MARGIN and all(graph.certified.get(v, False) or -v[0] == graph.depth for c in classes for v in c)
    return LevelPartition(k, classes, certified)


@dataclass
class QuotientTree:
    graph: CosetGraph  # kind "Quotient"
    class_map: dict  # vid -> quotient vid
    d_plus: int
    d_minus: int
    root: tuple
    levels: int

    @property
    def degree(self) -> int:
        return self.d_plus // self.d_minus


def quotient(graph: CosetGraph, levels: Optional[int] = None) -> QuotientTree:
    """Quotient forest on depths 0..levels (default: graph depth minus the margin)."""
    K = max(graph.depth - MARGIN, 0) if levels is None else levels
    parts = [partition_levels(graph, k) for k in range(K + 1)]
    cmap = {}
    T = CosetGraph("Quotient", K)
    for P in parts:
        for c in P.classes:
            qv = (-P.k, c[0][1])
            for vid in c:
                cmap[vid] = qv
            T.vertices[qv] = None
            T.certified[qv] = P.certified
    for a, b in graph.edges:
        if a in cmap and b in cmap:
            T.edges.add((cmap[a], cmap[b]))
    d_plus = graph.meta["d_plus"]
    d_minus = graph.meta["d_minus"]
    if d_plus % d_minus:
        raise PipelineError("quotient", f"d+ = {d_plus} is not divisible by d- = {d_minus}")
    root_vid = min((v for v in graph.vertices if v[0] == 0), key=repr)
    return QuotientTree(T, cmap, d_plus, d_minus, cmap[root_vid], K)


def check_quotient(qt: QuotientTree) -> dict:
    """Out-valency d+/d- and in-valency 1 off the roots, on certified quotient vertices."""
    T, d = qt.graph, qt.degree
    bad = []
    for v in sorted(T.vertices, key=repr):
        if not T.certified.get(v):
            continue
        depth = -v[0]
        if depth < qt.levels and len(T.out_neighbours(v)) != d:
            bad.append(("out", repr(v), len(T.out_neighbours(v))))
        if depth > 0 and len(T.in_neighbours(v)) != 1:
            bad.append(("in", repr(v), len(T.in_neighbours(v))))
    return {"degree": d, "violations": bad, "level_sizes": T.level_sizes()}


@dataclass
class TidyResult:
    V: object
    description: str
    X0: tuple  # representatives u_j with X_0 = {u_j v_0}
    scale: int
    verdict: TidyVerdict
    stage: str
    certified: bool
    d_plus: int = 1
    d_minus: int = 1
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "subgroup": self.description,
            "scale": self.scale,
            "stage": self.stage,
            "certified": self.certified,
            "d_plus": self.d_plus,
            "d_minus": self.d_minus,
            "X0_size": len(self.X0),
            "verification": self.verdict.to_dict(),
        }


def _fit(d_plus: int) -> int:
    """Largest truncation depth whose levels stay within the budget."""
    if d_plus <= 1:
        return 64
    return int(math.log(GRAPH_BUDGET) / math.log(d_plus))


def _graph_depth(d_plus: int, requested: int) -> int:
    # deepest truncation (requested + margin + 1) that stays within budget
    if d_plus <= 1:
        return requested
    fit = int(math.log(GRAPH_BUDGET) / math.log(d_plus)) - MARGIN - 1
    return max(0, min(requested, fit))


def extract_tidy(model: GroupModel, W, graph: CosetGraph, qt: QuotientTree, certified: bool, N: int = DEFAULT_N) -> TidyResult:
    x0 = [graph.vertices[v] for v in graph.vertices if v[0] == 0]
    x0.sort(key=lambda v: repr(v.key))
    reps = tuple(v.rep for v in x0)
    V = model.join(W, reps)
    if model.index(V, W) != len(reps):
        raise PipelineError("extract", f"[V : W] = {model.index(V, W)} but |X_0| = {len(reps)}")
    verdict = index_power_test(model, V, N)
    s = model.index(V, level(model, V, 1))
    status_ok = verdict.status != EXACT_NO
    if not status_ok:
        raise PipelineError("verify", "extracted subgroup fails the index power test", {"verdict": verdict.to_dict()})
    law = [model.index(V, level(model, V, n)) == qt.degree ** n for n in range(1, min(N, 4) + 1)]
    return TidyResult(V, model.describe(V), reps, s, verdict, "quotient", certified and verdict.status == EXACT_YES,
                      qt.d_plus, qt.d_minus, {"quotient": check_quotient(qt), "degree_law": all(law), "degree": qt.degree})


def run_tidying(model: GroupModel, W=None, N: int = DEFAULT_N, maxN: int = DEFAULT_MAX_N, h: int = 64,
                depth: int = 2) -> TidyResult:
    W = model.base if W is None else W
    fin = detect_finite_case(model, N, W)
    if fin is not None:
        V, verdict = fin
        return TidyResult(V, model.describe(V), (model.identity(),), 1, verdict, "finite-case", True,
                          evidence={"repeat": verdict.witness["repeat"]})
    ch = chain(model, maxN, W)
    if ch.stabilized:
        V = ch.descriptors[ch.stabilized_at]
        verdict = TidyVerdict(EXACT_YES, "finite-case", maxN, {"stable_from": ch.stabilized_at, "scale": 1})
        return TidyResult(V, model.describe(V), (model.identity(),), 1, verdict, "finite-case", True,
                          evidence={"stable_from": ch.stabilized_at})
    try:
        Wa, ev = tidy_above_search(model, maxN, N, W)
    except HorizonExhaustedError as exc:
        raise PipelineError("tidy-above", str(exc), {"sequences": getattr(exc, "sequences", None)}) from exc
    d_plus = ev["indices"][0] if ev["indices"] else 1
    seeds, exact = model.seed_in_neighbours(Wa, h)
    # trivial exact seeds make the enlarged graph a forest: classes are singletons
    forest = exact and len(seeds) == 1
    try:
        if forest:
            t = max(1, min(depth + MARGIN, _fit(d_plus)))
            g = build_gamma_plusplus(model, t, h, Wa)
            qt = quotient(g, max(0, t - MARGIN))
            same = None
        else:
            D = _graph_depth(d_plus, depth)
            if _fit(d_plus) < D + MARGIN + 1:
                raise HorizonExhaustedError(f"out-valency {d_plus} leaves no room for the class-closure margin")
            g = build_gamma_plusplus(model, D + MARGIN, h, Wa)
            g2 = build_gamma_plusplus(model, D + MARGIN + 1, h, Wa)
            qt = quotient(g, D)
            # classes must not change when the truncation grows by one level
            same = qt.class_map == quotient(g2, D).class_map
    except HorizonExhaustedError as exc:
        raise PipelineError("gamma++", str(exc)) from exc
    certified = bool(exact) and (forest or bool(same))
    res = extract_tidy(model, Wa, g, qt, certified, N)
    res.evidence.update(tidy_above=ev, graph_depth=g.depth, deepening_stable=same, forest=forest)
    return res
