"""Command line front end.

Exit codes: 0 certified, 2 certified only up to the horizon, 1 error.
A CONFIG argument is a path to a JSON model document or a catalogue key.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

from . import __version__
from .catalogue import CATALOGUE, ConfigError, ModelConfig, build_model, entry, list_catalogue, load_config
from .core import ModelError, level
from .cosetgraph import build_gamma_plus, build_gamma_plusplus, export
from .scale import check_power_law, cross_check_tidy_pair, scale_via_tidy
from .tidiness import (
    AT_HORIZON,
    EXACT_NO,
    EXACT_YES,
    index_power_test,
    tidy_above_search,
    tidy_below_test,
    tree_test,
)
from .tidying import MARGIN, PipelineError, quotient, run_tidying
from .treerep import build_window, verify_treerep

EXIT_OK, EXIT_ERROR, EXIT_HORIZON = 0, 1, 2
KINDS = ("gamma+", "gamma++", "quotient", "window")


@dataclass
class RunManifest:
    config: dict
    seed: int
    version: str = __version__
    timings: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)

    def stage(self, name: str):
        return _Timer(self, name)


class _Timer:
    def __init__(self, manifest: RunManifest, name: str):
        self.m, self.name = manifest, name

    def __enter__(self):
        self.t = time.perf_counter()

    def __exit__(self, *exc):
        self.m.timings[self.name] = round(time.perf_counter() - self.t, 4)


def write_atomic(path: str, data: bytes) -> None:
    """Write to a sibling temporary file, then rename over the target."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tdlc-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(obj) -> bytes:
    return (json.dumps(obj, indent=1, sort_keys=True, default=str) + "\n").encode()


def _emit(path: Optional[str], data: bytes, manifest: RunManifest) -> None:
    if path in (None, "-"):
        sys.stdout.write(data.decode())
        return
    write_atomic(path, data)
    manifest.outputs.append(path)


def resolve_config(arg: str) -> ModelConfig:
    if os.path.exists(arg):
        return load_config(arg)
    try:
        return entry(arg).config
    except KeyError:
        raise ConfigError("$", f"no such file or catalogue key: {arg!r}") from None


def _certified_within(certified: bool, horizon: int) -> bool:
    # every certificate inspects at least one application of the endomorphism
    return certified and horizon >= 1


# commands -------------------------------------------------------------------


def cmd_catalogue(args) -> int:
    if args.json:
        rows = [{"key": e.key, "title": e.title, "scale": e.scale, "provenance": e.provenance,
                 "headline": e.headline(), "config": e.config.to_dict()} for e in CATALOGUE]
        sys.stdout.write(_dump(rows).decode())
    else:
        print("\n".join(list_catalogue()))
    return EXIT_OK


def cmd_scale(args) -> int:
    cfg = resolve_config(args.config)
    N, H = _depth(args, cfg), _horizon(args, cfg)
    man = RunManifest(cfg.to_dict(), args.seed)
    model = build_model(cfg)
    with man.stage("scale"):
        rep = scale_via_tidy(model, N=N, maxN=cfg.horizon("max_n"), h=H, spectral_n=N)
        pair = cross_check_tidy_pair(model, rep.tidy.V, level(model, rep.tidy.V, 1), N)
        rep.checks["pair_agreement"] = pair["indices"]
    if args.powers >= 2:
        with man.stage("power_law"):
            pl = check_power_law(model, args.powers, N=N, maxN=cfg.horizon("max_n"), h=H)
        rep.checks["power_law"] = [r["scale"] for r in pl["rows"]]
        rep.certified = rep.certified and all(r["certified"] for r in pl["rows"])
    certified = _certified_within(rep.certified, H)
    doc = rep.to_dict()
    doc["certified"] = certified
    doc["status"] = EXACT_YES if certified else AT_HORIZON
    doc["horizon"] = H
    _emit(args.json, _dump(doc), man)
    if args.json not in (None, "-"):
        print(f"scale {rep.scale} ({doc['status']})")
    _manifest(args, man)
    return EXIT_OK if certified else EXIT_HORIZON


def cmd_tidy(args) -> int:
    cfg = resolve_config(args.config)
    N, H = _depth(args, cfg), _horizon(args, cfg)
    man = RunManifest(cfg.to_dict(), args.seed)
    model = build_model(cfg)
    with man.stage("tidy"):
        res = run_tidying(model, N=N, maxN=cfg.horizon("max_n"), h=H)
    certified = _certified_within(res.certified, H)
    doc = dict(res.to_dict(), certified=certified, horizon=H)
    if args.json:
        _emit(args.json, _dump(doc), man)
    if args.json != "-":
        print(f"V: {res.description}")
        print(f"index [V : V cap alpha^-1(V)] = {res.scale}")
        print(f"stage: {res.stage}; {'certified' if certified else 'at horizon'}")
    _manifest(args, man)
    return EXIT_OK if certified else EXIT_HORIZON


def build_graph(model, kind: str, depth: int, h: int, max_n: int = 8):
    if kind == "gamma+":
        return build_gamma_plus(model, depth)
    if kind == "gamma++":
        return build_gamma_plusplus(model, depth, h)
    if kind == "quotient":
        Wa, _ = tidy_above_search(model, max_n, 6)
        return quotient(build_gamma_plusplus(model, depth + MARGIN, h, Wa), depth).graph
    if kind == "window":
        V = run_tidying(model, maxN=max_n, h=h).V
        return build_window(model.with_base(V), depth).graph
    raise ValueError(f"unknown graph kind {kind!r}")


def cmd_graph(args) -> int:
    cfg = resolve_config(args.config)
    depth = cfg.horizon("graph_depth") if args.depth is None else args.depth
    man = RunManifest(cfg.to_dict(), args.seed)
    with man.stage("graph"):
        g = build_graph(build_model(cfg), args.kind, depth, _horizon(args, cfg), cfg.horizon("max_n"))
    _emit(args.out, export(g, args.format), man)
    _manifest(args, man)
    return EXIT_OK


def run_verify(cfg: ModelConfig, seed: int = 0, N: Optional[int] = None, window: int = 2) -> dict:
    """Every property check for one configuration; statuses per check."""
    model = build_model(cfg)
    N = cfg.horizon("chain_depth") if N is None else N
    checks: dict = {}

    ip, tr = index_power_test(model, None, N), tree_test(model, None, N)
    both_exact = ip.exact and tr.exact
    checks["criteria_agree"] = {"ok": not both_exact or ip.passed == tr.passed, "exact": both_exact,
                                "index_power": ip.status, "tree": tr.status}
    tb = tidy_below_test(model, None)
    checks["tidy_below"] = {"ok": True, "exact": tb.exact, "status": tb.status}

    res = run_tidying(model, N=N, maxN=cfg.horizon("max_n"), h=cfg.horizon("horizon"))
    V = res.V
    vv = index_power_test(model, V, N)
    checks["tidied"] = {"ok": vv.status != EXACT_NO, "exact": res.certified, "status": vv.status,
                        "stage": res.stage, "scale": res.scale}
    expected = next((e.scale for e in CATALOGUE if e.config == cfg), None)
    if expected is not None:
        checks["catalogue_scale"] = {"ok": res.scale == expected, "exact": True, "expected": expected}

    pl = check_power_law(model, 3, N=N)
    checks["power_law"] = {"ok": pl["ok"], "exact": all(r["certified"] for r in pl["rows"]),
                           "scales": [r["scale"] for r in pl["rows"]]}
    try:
        V1 = level(model, V, 1)
        pair = cross_check_tidy_pair(model, V, V1, N)
        checks["pair_agreement"] = {"ok": True, "exact": True, "indices": pair["indices"]}
    except ModelError as exc:
        checks["pair_agreement"] = {"ok": False, "exact": True, "error": str(exc)}

    tr_rep = verify_treerep(model, window, 50, seed, W=V)
    checks["tree_representation"] = {"ok": tr_rep["ok"], "exact": False,
                                     **{k: tr_rep[k] for k in sorted(tr_rep) if k.endswith("_ok") or k == "bik_trivial"}}
    return checks


def cmd_verify(args) -> int:
    cfg = resolve_config(args.config)
    man = RunManifest(cfg.to_dict(), args.seed)
    with man.stage("verify"):
        checks = run_verify(cfg, args.seed, args.depth)
    ok = all(c["ok"] for c in checks.values())
    doc = {"ok": ok, "checks": checks}
    if args.json:
        _emit(args.json, _dump(doc), man)
    if args.json != "-":
        for name, c in checks.items():
            print(f"{'PASS' if c['ok'] else 'FAIL'} {name}")
    _manifest(args, man)
    return EXIT_OK if ok else EXIT_ERROR


def _depth(args, cfg: ModelConfig) -> int:
    return cfg.horizon("chain_depth") if args.depth is None else args.depth


def _horizon(args, cfg: ModelConfig) -> int:
    return cfg.horizon("horizon") if getattr(args, "horizon", None) is None else args.horizon


def _manifest(args, man: RunManifest) -> None:
    if getattr(args, "manifest", None):
        write_atomic(args.manifest, _dump(asdict(man)))


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tdlc", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("catalogue", help="list built-in example models")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_catalogue)

    def common(p):
        p.add_argument("config", help="model JSON file or catalogue key")
        p.add_argument("--depth", type=int, default=None, help="chain or graph depth (default from config)")
        p.add_argument("--horizon", type=int, default=None, help="regression horizon; 0 never certifies")
        p.add_argument("--seed", type=int, default=0, help="seed for random sampling")
        p.add_argument("--manifest", default=None, help="write a run manifest here")

    for name, fn, helptext in (("scale", cmd_scale, "compute the scale"),
                               ("tidy", cmd_tidy, "find a tidy subgroup"),
                               ("verify", cmd_verify, "run the property suite")):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.add_argument("--json", default=None, metavar="OUT", help="report path, or - for stdout")
        p.set_defaults(func=fn)
        if name == "scale":
            p.add_argument("--powers", type=int, default=0, metavar="K",
                           help="also check s(alpha^k) = s(alpha)^k for k <= K")

    p = sub.add_parser("graph", help="export a coset graph")
    common(p)
    p.add_argument("--kind", choices=KINDS, default="gamma+")
    p.add_argument("--format", choices=("dot", "json"), default="dot")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_graph)
    return ap


def main(argv: Optional[list] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: config {exc}", file=sys.stderr)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (ModelError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
