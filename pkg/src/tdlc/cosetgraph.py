"""Truncated coset graphs on vertices u * alpha^{-i}(W).

A vertex at depth i is identified by (i, key) where key is the family's
canonical key of the coset u * alpha^{-i}(W).  Edges run from depth i to
depth i+1.  ``level`` stores the signed level, -depth for the graphs
below v_0 and +i for the upper half of the bilateral window.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Any, Optional

from .core import GroupModel, HorizonExhaustedError, level, transversal

DEFAULT_CAP = 1_000_000


def orbit_cap() -> int:
    return int(os.environ.get("TDLC_MAX_ORBIT", DEFAULT_CAP))


@dataclass(frozen=True)
class CosetVertex:
    level: int
    key: Any
    rep: Any = field(compare=False, hash=False, default=None)

    @property
    def depth(self) -> int:
        return -self.level

    @property
    def vid(self) -> tuple:
        return (self.level, self.key)


@dataclass
class CosetGraph:
    kind: str  # Gamma | GammaPlus | GammaPlusPlus | GammaBar | Quotient
    depth: int
    vertices: dict = field(default_factory=dict)  # vid -> CosetVertex
    edges: set = field(default_factory=set)  # (vid, vid)
    certified: dict = field(default_factory=dict)  # vid -> bool
    meta: dict = field(default_factory=dict)

    def add_vertex(self, v: CosetVertex, certified: bool = True) -> CosetVertex:
        old = self.vertices.get(v.vid)
        if old is None:
            self.vertices[v.vid] = v
            self.certified[v.vid] = certified
            return v
        return old

    def add_edge(self, a: CosetVertex, b: CosetVertex) -> None:
        self.edges.add((a.vid, b.vid))

    def _adj(self):
        if getattr(self, "_cache", None) is None or self._cache[0] != len(self.edges):
            out, inn = {}, {}
            for a, b in self.edges:
                out.setdefault(a, set()).add(b)
                inn.setdefault(b, set()).add(a)
            self._cache = (len(self.edges), out, inn)
        return self._cache[1], self._cache[2]

    def out_neighbours(self, vid) -> set:
        return self._adj()[0].get(vid, set())

    def in_neighbours(self, vid) -> set:
        return self._adj()[1].get(vid, set())

    def levels(self) -> dict:
        out: dict = {}
        for vid in self.vertices:
            out.setdefault(vid[0], []).append(vid)
        return out

    def level_sizes(self) -> list[int]:
        lv = self.levels()
        return [len(lv[k]) for k in sorted(lv, reverse=True)] if self.kind != "GammaBar" else [len(lv[k]) for k in sorted(lv)]

    def ordered(self) -> list:
        return sorted(self.vertices, key=lambda vid: (vid[0] * (1 if self.kind == "GammaBar" else -1), repr(vid[1])))


class CosetContext:
    """Coset keys for u * alpha^{-i}(W), built lazily per depth."""

    def __init__(self, model: GroupModel, W=None):
        self.model = model
        self.W = model.base if W is None else W
        self._levels = {0: self.W}
        self._full = {0: self.W}
        self.has_full = model.full_preimage(self.W) is not None

    def L(self, i: int):
        """W cap alpha^{-i}(W)."""
        if i not in self._levels:
            self._levels[i] = level(self.model, self.W, i)
        return self._levels[i]

    def full(self, i: int):
        if i not in self._full:
            self._full[i] = self.model.full_preimage(self.full(i - 1))
        return self._full[i]

    def key(self, u, i: int):
        if self.has_full:
            return self.model.coset_key(u, self.full(i))
        if not self.model.member(u, self.W):
            raise HorizonExhaustedError("representative outside W without a full preimage descriptor")
        return self.model.coset_key(u, self.L(i))

    def vertex(self, u, i: int) -> CosetVertex:
        return CosetVertex(-i, self.key(u, i), u)


def _check_cap(n: int, cap: int, what: str) -> None:
    if n > cap:
        raise HorizonExhaustedError(f"{what} exceeds the cap of {cap} vertices")


def build_gamma_plus(model: GroupModel, n: int, W=None, cap: Optional[int] = None) -> CosetGraph:
    """Vertices u v_{-i} for u in W and i <= n, with edges (u v_{-i}, u v_{-i-1})."""
    if n < 0:
        raise ValueError("depth must be non-negative")
    cap = orbit_cap() if cap is None else cap
    ctx = CosetContext(model, W)
    g = CosetGraph("GammaPlus", n)
    g.meta["context"] = ctx
    total = 0
    reps = {}
    for i in range(n + 1):
        _check_cap(total + model.index(ctx.W, ctx.L(i)), cap, "Gamma+")
        reps[i] = transversal(model, ctx.W, ctx.L(i), cap=cap)
        total += len(reps[i])
        for u in reps[i]:
            g.add_vertex(ctx.vertex(u, i))
    for i in range(n):
        # parents of u v_{-i-1} are u y v_{-i} with y in W cap alpha^{-i-1}(W)
        ys = transversal(model, ctx.L(i + 1), model.intersect(ctx.L(i + 1), ctx.L(i)), cap=cap)
        for u in reps[i + 1]:
            child = ctx.vertex(u, i + 1)
            for y in ys:
                uy = model.mul(u, y)
                g.add_edge(ctx.vertex(uy, i), child)
    return g


def build_gamma_plusplus(model: GroupModel, n: int, h: int, W=None, cap: Optional[int] = None) -> CosetGraph:
    """Component of v_0 in the truncation to depth n of the enlarged graph.

    In-neighbours of v_{-1} come from the family's seed enumeration, those
    of v_{-i} from regressing the seeds, and everything else from the
    action of the representatives.
    """
    cap = orbit_cap() if cap is None else cap
    ctx = CosetContext(model, W)
    seeds, exact = model.seed_in_neighbours(ctx.W, h)
    parents = {1: list(seeds)}
    for i in range(2, n + 1):
        nxt = []
        for s in parents[i - 1]:
            r = model.regress(s)
            if r is None:
                raise HorizonExhaustedError("seed has no canonical preimage")
            nxt.append(r)
        parents[i] = nxt
    children = {}
    for i in range(n):
        children[i] = transversal(model, ctx.L(i), model.intersect(ctx.L(i), ctx.L(i + 1)), cap=cap)

    g = CosetGraph("GammaPlusPlus", n)
    g.meta.update(context=ctx, seeds_exact=exact, d_minus=len(seeds), d_plus=len(children.get(0, [])))
    root = g.add_vertex(ctx.vertex(model.identity(), 0), certified=exact)
    todo = [root]
    while todo:
        v = todo.pop()
        i, u = v.depth, v.rep
        nbrs = []
        if i < n:
            for y in children[i]:
                w = ctx.vertex(model.mul(u, y), i + 1)
                nbrs.append(w)
                g.edges.add((v.vid, w.vid))
        if i >= 1:
            for r in parents[i]:
                w = ctx.vertex(model.mul(u, r), i - 1)
                nbrs.append(w)
                g.edges.add((w.vid, v.vid))
        for w in nbrs:
            if w.vid not in g.vertices:
                g.add_vertex(w, certified=exact and w.depth < n)
                todo.append(w)
                _check_cap(len(g.vertices), cap, "Gamma++")
    return g


def rho(ctx: CosetContext, v: CosetVertex) -> CosetVertex:
    """u v_{-i} -> u' v_{-i-1} with alpha(u') = u."""
    u = ctx.model.regress(v.rep)
    if u is None:
        raise HorizonExhaustedError("no canonical preimage for rho")
    return ctx.vertex(u, v.depth + 1)


def rho_inv(ctx: CosetContext, v: CosetVertex) -> CosetVertex:
    """u v_{-i} -> alpha(u) v_{-i+1} for i >= 1."""
    if v.depth < 1:
        raise ValueError("rho inverse leaves the lower half")
    return ctx.vertex(ctx.model.endo(v.rep), v.depth - 1)


# export ---------------------------------------------------------------------


def _key_str(key) -> str:
    return repr(key)


def to_json_dict(g: CosetGraph) -> dict:
    order = g.ordered()
    index = {vid: i for i, vid in enumerate(order)}
    edges = sorted([index[a], index[b]] for a, b in g.edges)
    return {
        "kind": g.kind,
        "depth": g.depth,
        "vertices": [{"key": _key_str(vid[1]), "level": vid[0], "certified": bool(g.certified.get(vid, True))} for vid in order],
        "edges": edges,
    }


def export(g: CosetGraph, fmt: str) -> bytes:
    if fmt == "json":
        return (json.dumps(to_json_dict(g), indent=1, sort_keys=True) + "\n").encode()
    if fmt != "dot":
        raise ValueError(f"unknown export format {fmt!r}")
    d = to_json_dict(g)
    lines = [f"digraph {d['kind']} {{", "  rankdir=TB;", "  node [shape=point];"]
    by_level: dict = {}
    for i, v in enumerate(d["vertices"]):
        style = "" if v["certified"] else ", color=gray"
        lines.append(f"  n{i} [level={v['level']}{style}];")
        by_level.setdefault(v["level"], []).append(f"n{i}")
    for lv in sorted(by_level, reverse=g.kind != "GammaBar"):
        lines.append("  { rank=same; " + " ".join(by_level[lv]) + "; }")
    for a, b in d["edges"]:
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode()


class RawKey(str):
    """A coset key read back from an export; prints as itself."""

    def __repr__(self) -> str:
        return str(self)


def from_json(data: bytes) -> CosetGraph:
    d = json.loads(data)
    g = CosetGraph(d["kind"], d["depth"])
    vids = []
    for v in d["vertices"]:
        cv = CosetVertex(v["level"], RawKey(v["key"]))
        g.add_vertex(cv, v["certified"])
        vids.append(cv.vid)
    for a, b in d["edges"]:
        g.edges.add((vids[a], vids[b]))
    return g
