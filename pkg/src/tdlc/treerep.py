"""A finite window on the tree representation of U_{++} x| <alpha>.

The window is the subtree of the bilateral graph hanging below v_n, cut
off at level -n.  Through rho^{-n} it is the rooted graph Gamma+ of U to
depth 2n: the window vertex stored at depth j with representative w in U
stands for alpha^n(w) v_{n-j}.  Its level in the bilateral graph is n - j.

An element u of U_{++} is carried as (x, m) with x in U_+ and
u = alpha^m(x); on the window it acts through its lift regress^{n-m}(x),
an element of U with alpha^n(lift) = u.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .core import GroupModel, HorizonExhaustedError, ModelError
from .cosetgraph import CosetContext, CosetGraph, CosetVertex, build_gamma_plus
from .tidiness import EXACT_YES, index_power_test

MAX_WINDOW = 16


class WindowExit(HorizonExhaustedError):
    """The image of a vertex lies outside the window."""


@dataclass(frozen=True)
class SemigroupElement:
    """(u, alpha^k) with u = alpha^lag(x) and x in U_+."""

    x: object
    lag: int = 0
    k: int = 0

    def u(self, model: GroupModel):
        return model.endo_n(self.x, self.lag)

    def lift(self, model: GroupModel, W, n: int):
        """An element of W mapped onto u by alpha^n."""
        if n < self.lag:
            raise WindowExit(f"element needs a window of size at least {self.lag}")
        y = self.x
        for _ in range(n - self.lag):
            y = model.regress(y)
            if y is None or not model.member(y, W):
                raise WindowExit("regressive trajectory leaves the base subgroup")
        return y


def compose(model: GroupModel, W, a: SemigroupElement, b: SemigroupElement) -> SemigroupElement:
    """(u0, a^k0)(u1, a^k1) = (u0 alpha^k0(u1), alpha^(k0+k1))."""
    M = max(a.lag, b.lag + a.k)
    x0 = a.lift(model, W, M)
    # b.u shifted by alpha^k0 is alpha^(b.lag + a.k)(b.x)
    x1 = SemigroupElement(b.x, b.lag + a.k).lift(model, W, M)
    return SemigroupElement(model.mul(x0, x1), M, a.k + b.k)


@dataclass
class WindowTree:
    model: GroupModel
    n: int
    scale: int
    graph: CosetGraph  # kind GammaBar, levels -n..n
    ray: list  # vids of v_0, v_1, ..., v_n
    ctx: Optional[CosetContext] = None
    degenerate: bool = False
    stats: dict = field(default_factory=dict)

    def vertex_at(self, level: int, rep) -> CosetVertex:
        if self.degenerate:
            if abs(level) > self.n:
                raise WindowExit(f"level {level} outside the window")
            return self.graph.vertices[(level, level)]
        j = self.n - level
        if not 0 <= j <= 2 * self.n:
            raise WindowExit(f"level {level} outside the window")
        return CosetVertex(level, self.ctx.key(rep, j), rep)

    def ray_vertex(self, i: int) -> CosetVertex:
        """v_i for -n <= i <= n."""
        if self.degenerate:
            return self.graph.vertices[(i, i)]
        return self.vertex_at(i, self.model.identity())


def build_window(model: GroupModel, n: int, W=None) -> WindowTree:
    if not 0 <= n <= MAX_WINDOW:
        raise ValueError(f"window size must lie in [0, {MAX_WINDOW}]")
    W = model.base if W is None else W
    verdict = index_power_test(model, W, max(2, min(6, 2 * n)))
    if verdict.status != EXACT_YES:
        raise ModelError(f"base subgroup is not certified tidy ({verdict.status}); tidy it first")
    s = verdict.witness["indices"][0]
    g = CosetGraph("GammaBar", n)
    if s == 1:
        # the bilateral graph collapses; the tree is the line on Z
        for i in range(-n, n + 1):
            g.add_vertex(CosetVertex(i, i))
        for i in range(-n + 1, n + 1):
            g.edges.add(((i, i), (i - 1, i - 1)))
        ray = [(i, i) for i in range(n + 1)]
        return WindowTree(model, n, 1, g, ray, None, True, {"level_sizes": g.level_sizes()})
    gp = build_gamma_plus(model, 2 * n, W)
    ctx = gp.meta["context"]
    for (lv, key), v in gp.vertices.items():
        g.add_vertex(CosetVertex(n + lv, key, v.rep))
    for a, b in gp.edges:
        g.edges.add(((n + a[0], a[1]), (n + b[0], b[1])))
    wt = WindowTree(model, n, s, g, [], ctx)
    wt.ray = [wt.ray_vertex(i).vid for i in range(n + 1)]
    wt.stats["level_sizes"] = g.level_sizes()
    return wt


def act(model: GroupModel, s: SemigroupElement, v: CosetVertex, window: WindowTree) -> CosetVertex:
    """phi(u) phi(alpha)^k applied to a window vertex."""
    if window.degenerate:
        return window.vertex_at(v.level + s.k, None)
    W, n = window.ctx.W, window.n
    j, w = n - v.level, v.rep
    if s.k:
        # rho^{-k} keeps the window only below v_{n-k}
        if j < s.k or not model.member(w, window.ctx.L(s.k)):
            raise WindowExit("rho^-k leaves the window")
        w = model.endo_n(w, s.k)
        j -= s.k
    w = model.mul(s.lift(model, W, n), w)
    return window.vertex_at(n - j, w)


def rho(model: GroupModel, v: CosetVertex, window: WindowTree) -> CosetVertex:
    """One level down along rho; raises when no preimage stays in U."""
    if window.degenerate:
        return window.vertex_at(v.level - 1, None)
    y = model.regress(v.rep)
    if y is None or not model.member(y, window.ctx.W):
        raise WindowExit("no preimage of the representative in U")
    return window.vertex_at(v.level - 1, y)


def sample_elements(model: GroupModel, window: WindowTree, count: int, rng: random.Random, kmax: int = 2) -> list:
    W = model.base if window.ctx is None else window.ctx.W
    out = []
    for _ in range(count):
        x = model.sample_plus(W, rng)
        out.append(SemigroupElement(x, rng.randint(0, window.n), rng.randint(0, kmax)))
    return out


def _upper(window: WindowTree) -> list:
    # vertices at levels >= 0, where fixed-point searches are cheap
    return [window.graph.vertices[vid] for vid in window.graph.ordered() if vid[0] >= 0]


def _try(f):
    try:
        return f()
    except WindowExit:
        return None


def verify_treerep(model: GroupModel, n: int = 3, samples: int = 50, seed: int = 0, W=None,
                   bik_horizon: int = 16) -> dict:
    """Finite-window checks of the tree representation; report only."""
    rng = random.Random(seed)
    win = build_window(model, n, W)
    g, s = win.graph, win.scale
    report: dict = {"n": n, "scale": s, "degenerate": win.degenerate, "level_sizes": win.stats["level_sizes"]}

    bad_val = []
    for vid in g.ordered():
        lv = vid[0]
        outs, ins = len(g.out_neighbours(vid)), len(g.in_neighbours(vid))
        if lv > -n and outs != s:
            bad_val.append(("out", lv, outs))
        if lv < n and ins != 1:
            bad_val.append(("in", lv, ins))
    report["valency_ok"] = not bad_val
    report["valency"] = s + 1
    report["valency_violations"] = bad_val[:8]
    # v_i = v_j forces alpha^{-|i-j|}(U) = U, impossible while [U : U cap alpha^{-d}(U)] > 1
    report["distinct_ray"] = win.degenerate or all(
        model.index(win.ctx.W, win.ctx.L(d)) > 1 for d in range(1, 2 * n + 1))

    elems = sample_elements(model, win, samples, rng)
    pure = [SemigroupElement(e.x, e.lag, 0) for e in elems]

    # the ray toward the fixed end: phi(u, alpha^k) v_i = v_{i+k} once i >= lag
    end_bad, end_checked = [], 0
    for idx, e in enumerate(elems):
        for i in range(e.lag, n - e.k + 1):
            img = act(model, e, win.ray_vertex(i), win)
            end_checked += 1
            if img.vid != win.ray_vertex(i + e.k).vid:
                end_bad.append((idx, i))
    report["end_fixed"] = not end_bad
    report["end_checks"] = end_checked

    # transitivity surrogate: orbits of the sampled pure elements on each upper level
    if win.degenerate:
        report["transitive_samples"] = True
    else:
        gens = [e for e in pure if e.lag == n] + [SemigroupElement(model.sample_plus(win.ctx.W, rng), n) for _ in range(8)]
        ok = True
        for lv in range(n, -1, -1):
            start = win.ray_vertex(lv)
            seen, todo = {start.vid}, [start]
            while todo:
                v = todo.pop()
                for e in gens:
                    w = act(model, e, v, win)
                    if w.vid not in seen:
                        seen.add(w.vid)
                        todo.append(w)
            ok = ok and len(seen) == len(win.graph.levels()[lv])
        report["transitive_samples"] = ok

    # elliptic elements are exactly the pure ones
    upper = _upper(win)
    ell_bad = []
    for idx, e in enumerate(elems):
        fixed = any(
            (img := _try(lambda v=v: act(model, e, v, win))) is not None and img.vid == v.vid for v in upper
        )
        if fixed != (e.k == 0):
            ell_bad.append(idx)
    report["elliptic_ok"] = not ell_bad
    report["elliptic_counts"] = {"pure": sum(e.k == 0 for e in elems), "shifting": sum(e.k > 0 for e in elems)}

    # phi(alpha) phi(u) = phi(alpha(u)) phi(alpha), pointwise where both sides stay in the window
    A = SemigroupElement(model.identity(), 0, 1)
    conj_bad = conj_checked = 0
    for e in pure[:10]:
        au = SemigroupElement(e.x, e.lag + 1)
        for v in upper:
            lhs = _try(lambda: act(model, A, act(model, e, v, win), win))
            rhs = _try(lambda: act(model, au, act(model, A, v, win), win))
            if lhs is None or rhs is None:
                continue
            conj_checked += 1
            conj_bad += lhs.vid != rhs.vid
    report["conjugation_ok"] = conj_bad == 0
    report["conjugation_checks"] = conj_checked

    # composition law against sequential action, and associativity
    W0 = win.ctx.W if win.ctx is not None else model.base
    comp_bad = comp_checked = 0
    small = [SemigroupElement(e.x, min(e.lag, 1), min(e.k, 1)) for e in elems]
    every = [g.vertices[vid] for vid in g.ordered()]
    for _ in range(4000):
        if comp_checked >= 100:
            break
        a, b, c = (rng.choice(small) for _ in range(3))
        v = rng.choice(every)
        seq = _try(lambda: act(model, a, act(model, b, act(model, c, v, win), win), win))
        if seq is None:
            continue
        ab, bc = compose(model, W0, a, b), compose(model, W0, b, c)
        imgs = [_try(lambda p=p: act(model, p, v, win)) for p in (compose(model, W0, ab, c), compose(model, W0, a, bc))]
        if None in imgs:
            continue
        comp_checked += 1
        comp_bad += any(img.vid != seq.vid for img in imgs)
    report["composition_ok"] = comp_bad == 0
    report["composition_checks"] = comp_checked

    # rho and rho^{-1} are mutually inverse where both are defined
    rho_bad = rho_checked = 0
    for v in upper:
        if v.level == -n:
            continue
        w = _try(lambda: rho(model, v, win))
        if w is None:
            continue
        back = act(model, A, w, win)
        rho_checked += 1
        rho_bad += back.vid != v.vid
    report["rho_inverse_ok"] = rho_bad == 0
    report["rho_checks"] = rho_checked

    # no sampled nonidentity element of U_{++} is killed by a power of alpha
    bik = True
    for e in elems:
        u = e.u(model)
        if u == model.identity():
            continue
        y = u
        for _ in range(bik_horizon):
            y = model.endo(y)
            if y == model.identity():
                bik = False
                break
    report["bik_trivial"] = bik
    report["bik_horizon"] = bik_horizon

    # elements of alpha^i(U) in U_{++} have a canonical preimage in alpha^{i-1}(U)
    pre_bad = pre_checked = 0
    for e in elems:
        if e.lag < 1 or win.degenerate:
            continue
        u = e.u(model)
        r = model.regress(u)
        ok = r is not None and model.endo(r) == u
        y = r
        for _ in range(e.lag - 1):
            if not ok:
                break
            y = model.regress(y)
            ok = y is not None
        ok = ok and model.member(y, W0)
        pre_checked += 1
        pre_bad += not ok
    report["precise_preimage_ok"] = pre_bad == 0
    report["precise_preimage_checks"] = pre_checked

    keys = ["valency_ok", "distinct_ray", "end_fixed", "transitive_samples", "elliptic_ok", "conjugation_ok",
            "composition_ok", "rho_inverse_ok", "precise_preimage_ok"]
    # bik triviality is recorded, not required: it only licenses skipping the kernel statement
    report["ok"] = all(report[k] for k in keys)
    return report
