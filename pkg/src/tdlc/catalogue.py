"""Model configurations, validation, and the built-in example catalogue.

A configuration is a JSON document::

    {"name": "E1", "family": "padic",
     "params": {"p": 3, "A": [["1/3"]], "U": {"basis": [[1]]}},
     "horizons": {"chain_depth": 6, "horizon": 64, "graph_depth": 3},
     "orientation": "forward"}

Rationals are written as "num/den" strings or plain integers.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .core import GroupModel
from .families.coords import CoordDesc
from .families.hnn import HnnModel
from .families.padic import PadicModel
from .families.shift import ShiftModel, prime_power
from .lattice import Lattice, LatticeError, invert

FAMILIES = ("padic", "hnn", "shift_compact", "shift_restricted")

DEFAULT_HORIZONS = {"chain_depth": 6, "horizon": 64, "graph_depth": 3, "max_n": 8}


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str, line: Optional[int] = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{path}: {message}{where}")
        self.path = path
        self.line = line


@dataclass(frozen=True)
class ModelConfig:
    family: str
    params: dict
    horizons: dict = field(default_factory=lambda: dict(DEFAULT_HORIZONS))
    orientation: str = "forward"
    name: str = ""

    def horizon(self, key: str) -> int:
        return int(self.horizons.get(key, DEFAULT_HORIZONS[key]))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "family": self.family,
            "params": self.params,
            "horizons": dict(self.horizons),
            "orientation": self.orientation,
        }


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % q for q in range(2, int(n ** 0.5) + 1))


def parse_rational(x, path: str) -> Fraction:
    if isinstance(x, bool):
        raise ConfigError(path, "expected a rational, got a boolean")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise ConfigError(path, f"expected an integer or 'num/den' string, got {x!r}")


def _matrix(M, path: str, square: Optional[int] = None) -> list[list[Fraction]]:
    if not isinstance(M, list) or not M or not all(isinstance(r, list) for r in M):
        raise ConfigError(path, "expected a non-empty list of rows")
    n = len(M[0])
    if any(len(r) != n for r in M):
        raise ConfigError(path, "rows have unequal lengths")
    if square is not None and (len(M) != square or n != square):
        raise ConfigError(path, f"expected a {square}x{square} matrix")
    return [[parse_rational(x, f"{path}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(M)]


def _positive_int(x, path: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or x < 1:
        raise ConfigError(path, f"expected a positive integer, got {x!r}")
    return x


def config_from_dict(doc: Any) -> ModelConfig:
    if not isinstance(doc, dict):
        raise ConfigError("$", "configuration must be an object")
    family = doc.get("family")
    if family not in FAMILIES:
        raise ConfigError("family", f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params", "expected an object")
    horizons = dict(DEFAULT_HORIZONS)
    hz = doc.get("horizons", {})
    if not isinstance(hz, dict):
        raise ConfigError("horizons", "expected an object")
    for k, v in hz.items():
        if k not in DEFAULT_HORIZONS:
            raise ConfigError(f"horizons.{k}", "unknown horizon")
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise ConfigError(f"horizons.{k}", f"expected a non-negative integer, got {v!r}")
        horizons[k] = v
    orientation = doc.get("orientation", "forward")
    if orientation not in ("forward", "inverse"):
        raise ConfigError("orientation", "expected 'forward' or 'inverse'")
    cfg = ModelConfig(family, params, horizons, orientation, str(doc.get("name", "")))
    build_model(cfg)  # validates
    return cfg


def load_config(path: str) -> ModelConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"malformed JSON: {exc.msg}", line=exc.lineno) from None
    return config_from_dict(doc)


def _window_base(params: dict, naxes: int, model, path: str) -> Optional[CoordDesc]:
    doc = params.get("base")
    if doc is None:
        return None
    if not isinstance(doc, dict):
        raise ConfigError(path, "expected an object with 'window' and 'generators'")
    k = doc.get("window", 0)
    if isinstance(k, bool) or not isinstance(k, int) or k < 0:
        raise ConfigError(f"{path}.window", "expected a non-negative integer")
    gens = doc.get("generators", [])
    if not isinstance(gens, list):
        raise ConfigError(f"{path}.generators", "expected a list of vectors")
    vecs = []
    for i, v in enumerate(gens):
        if not isinstance(v, list) or len(v) != naxes * k or not all(isinstance(c, int) for c in v):
            raise ConfigError(f"{path}.generators[{i}]", f"expected {naxes * k} integers")
        vecs.append(v)
    if k == 0:
        return model.whole()
    return model.desc_from_vectors(k, vecs)


def build_model(cfg: ModelConfig) -> GroupModel:
    P = cfg.params
    name = cfg.name
    if cfg.family == "padic":
        p = P.get("p")
        if isinstance(p, bool) or not isinstance(p, int) or not _is_prime(p):
            raise ConfigError("params.p", f"{p!r} is not a prime")
        A = _matrix(P.get("A"), "params.A")
        d = len(A)
        if len(A[0]) != d:
            raise ConfigError("params.A", "endomorphism matrix must be square")
        if cfg.orientation == "inverse":
            try:
                A = invert(A)
            except LatticeError:
                raise ConfigError("orientation", "inverse orientation needs an invertible matrix") from None
        U = P.get("U", {"basis": [[int(i == j) for j in range(d)] for i in range(d)]})
        if not isinstance(U, dict) or not ({"B", "basis"} & set(U)):
            raise ConfigError("params.U", "expected an object with 'B' or 'basis'")
        key = "B" if "B" in U else "basis"
        M = _matrix(U[key], f"params.U.{key}", square=d)
        try:
            if key == "B":
                L = Lattice.from_integrality(M, p)
            else:
                L = Lattice.from_generators([list(c) for c in zip(*M)], d, p)
        except LatticeError:
            raise ConfigError(f"params.U.{key}", "matrix is singular") from None
        return PadicModel(p, A, L, name=name)

    if cfg.orientation != "forward":
        raise ConfigError("orientation", f"family {cfg.family} only supports the forward orientation")

    if cfg.family == "hnn":
        m = P.get("A")
        if isinstance(m, bool) or not isinstance(m, int) or m < 2:
            raise ConfigError("params.A", f"|A| must be an integer at least 2, got {m!r}")
        if prime_power(m) is None:
            raise ConfigError("params.A", f"|A| = {m} is not a prime power")
        model = HnnModel(m, name=name)
        base = _window_base(P, 2, model, "params.base")
        return model if base is None else model.with_base(base)

    m = P.get("F")
    if isinstance(m, bool) or not isinstance(m, int) or m < 2:
        raise ConfigError("params.F", f"|F| must be an integer at least 2, got {m!r}")
    if prime_power(m) is None:
        raise ConfigError("params.F", f"|F| = {m} is not a prime power")
    model = ShiftModel(m, cfg.family.split("_")[1], name=name)
    base = _window_base(P, 1, model, "params.base")
    return model if base is None else model.with_base(base)


# built-in examples ---------------------------------------------------------


@dataclass(frozen=True)
class CatalogueEntry:
    key: str
    title: str
    config: ModelConfig
    scale: int
    provenance: str  # TRIVIAL | DERIVED | PAPER
    note: str = ""

    def headline(self) -> str:
        return f"s={self.scale} [{self.provenance}]"


def _cfg(name, family, params, **kw) -> ModelConfig:
    return ModelConfig(family, params, dict(DEFAULT_HORIZONS, **kw.pop("horizons", {})), name=name, **kw)


def padic_diag(p: int, basis=None, name: str = "") -> ModelConfig:
    """alpha = diag(p, 1/p) on Q_p^2 with U spanned by the given columns."""
    basis = basis or [[1, 0], [0, 1]]
    return _cfg(name, "padic", {"p": p, "A": [[p, 0], [0, f"1/{p}"]], "U": {"basis": basis}})


def padic_skew(p: int, name: str = "") -> ModelConfig:
    """U' = {(x, y) : x = y mod p} for alpha = diag(p, 1/p)."""
    return padic_diag(p, [[1, 0], [1, p]], name)


def hnn(m: int, name: str = "") -> ModelConfig:
    return _cfg(name, "hnn", {"A": m})


def shift(m: int, variant: str, window: int = 0, generators=(), name: str = "") -> ModelConfig:
    params: dict = {"F": m}
    if window:
        params["base"] = {"window": window, "generators": [list(g) for g in generators]}
    return _cfg(name, "shift_" + variant, params)


CATALOGUE: tuple[CatalogueEntry, ...] = (
    CatalogueEntry("E1", "Q_3, alpha = multiplication by 1/3, U = Z_3",
                   _cfg("E1", "padic", {"p": 3, "A": [["1/3"]], "U": {"basis": [[1]]}}), 3, "DERIVED"),
    CatalogueEntry("E2", "Q_3^2, alpha = diag(3, 1/3), skew U' = {x = y mod 3}", padic_skew(3, "E2"), 3, "DERIVED",
                   "U' is not tidy; tidied subgroup has index 3"),
    CatalogueEntry("E3", "HNN extension over A = Z/2", hnn(2, "E3"), 2, "PAPER"),
    CatalogueEntry("E4", "compact one-sided shift over Z/2, U = G", shift(2, "compact", name="E4"), 1, "TRIVIAL"),
    CatalogueEntry("E5", "restricted shift over Z/2, skew U = {f(0) = f(1)}",
                   shift(2, "restricted", 2, [[1, 1]], name="E5"), 2, "DERIVED"),
    CatalogueEntry("P2", "Q_2^2, alpha = diag(2, 1/2), U = Z_2^2", padic_diag(2, name="P2"), 2, "DERIVED"),
    CatalogueEntry("P3", "Q_3^2, alpha = diag(3, 1/3), U = Z_3^2", padic_diag(3, name="P3"), 3, "DERIVED"),
    CatalogueEntry("P5", "Q_5^2, alpha = diag(5, 1/5), U = Z_5^2", padic_diag(5, name="P5"), 5, "DERIVED"),
    CatalogueEntry("H3", "HNN extension over A = Z/3", hnn(3, "H3"), 3, "PAPER"),
    CatalogueEntry("H4", "HNN extension over A = Z/4", hnn(4, "H4"), 4, "PAPER"),
    CatalogueEntry("E6", "compact one-sided shift over Z/2, U = {f(0) = 0}",
                   shift(2, "compact", 1, [], name="E6"), 1, "DERIVED",
                   "tidy above but not tidy below; in-valency 2 in the enlarged graph"),
)


def entry(key: str) -> CatalogueEntry:
    for e in CATALOGUE:
        if e.key == key:
            return e
    raise KeyError(key)


def list_catalogue() -> list[str]:
    return [f"{e.key:<3} {e.headline():<14} {e.title}" + (f"  ({e.note})" if e.note else "") for e in CATALOGUE]
