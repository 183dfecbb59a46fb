"""Group models, subgroup chains, indices and horizon-bounded membership.

Every family implements :class:`GroupModel`.  Subgroup descriptors are
opaque, hashable, and canonical: equal subgroups have equal descriptors.
All operations are pure; nothing is mutated after construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Optional


class ModelError(Exception):
    """Base class for model-level failures."""


class ModelMismatchError(ModelError):
    pass


class ContainmentError(ModelError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class UnsupportedRepresentationError(ModelError):
    pass


class HorizonExhaustedError(ModelError):
    pass


@dataclass(frozen=True)
class TriBool:
    """Yes/No with evidence, or Unknown at a horizon."""

    status: str  # "yes" | "no" | "unknown"
    horizon: int
    certificate: tuple = ()

    @classmethod
    def yes(cls, h: int, **cert) -> "TriBool":
        return cls("yes", h, tuple(sorted(cert.items())))

    @classmethod
    def no(cls, h: int, **cert) -> "TriBool":
        return cls("no", h, tuple(sorted(cert.items())))

    @classmethod
    def unknown(cls, h: int, **cert) -> "TriBool":
        return cls("unknown", h, tuple(sorted(cert.items())))

    @property
    def is_yes(self) -> bool:
        return self.status == "yes"

    @property
    def is_no(self) -> bool:
        return self.status == "no"

    @property
    def exact(self) -> bool:
        return self.status != "unknown"

    def get(self, key, default=None):
        return dict(self.certificate).get(key, default)


@dataclass(frozen=True)
class ChainReport:
    depth: int
    descriptors: tuple
    indices: tuple  # [U_{-k} : U_{-k-1}] for k < depth
    stabilized: bool
    stabilized_at: Optional[int]


class GroupModel:
    """Contract shared by all families.

    Subclasses provide element arithmetic, the endomorphism, and
    descriptor operations.  ``power`` records that the endomorphism is
    the ``power``-fold composite of the family's basic map.
    """

    family: str = "abstract"
    power: int = 1
    base: Hashable = None
    name: str = ""

    # elements
    def identity(self):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def check(self, a) -> None:
        """Raise ModelMismatchError unless a is an element of this model."""
        raise NotImplementedError

    def endo_once(self, a):
        raise NotImplementedError

    def endo(self, a):
        self.check(a)
        for _ in range(self.power):
            a = self.endo_once(a)
        return a

    def endo_n(self, a, n: int):
        for _ in range(n):
            a = self.endo(a)
        return a

    def regress(self, a):
        """Canonical preimage under the endomorphism, or None."""
        raise NotImplementedError

    def with_power(self, k: int) -> "GroupModel":
        raise NotImplementedError

    # descriptors
    def member(self, x, D) -> bool:
        raise NotImplementedError

    def intersect(self, D1, D2):
        raise NotImplementedError

    def preimage_in(self, D, W, n: int = 1):
        """{x in W : alpha^n(x) in D}."""
        raise NotImplementedError

    def full_preimage(self, D):
        """alpha^{-1}(D) as a descriptor, or None when not compact/representable."""
        return None

    def image(self, D):
        """alpha(D) as a descriptor, or None when not representable."""
        return None

    def contains(self, K, H) -> bool:
        return self.containment_witness(K, H) is None

    def containment_witness(self, K, H):
        raise NotImplementedError

    def index(self, K, H) -> int:
        raise NotImplementedError

    def generators(self, K, H) -> list:
        """Elements of K generating K modulo H."""
        raise NotImplementedError

    def coset_key(self, x, D) -> Hashable:
        """Canonical key of the left coset xD."""
        raise NotImplementedError

    def join(self, D, elems: Iterable):
        """Subgroup generated by D and elems."""
        raise NotImplementedError

    def describe(self, D) -> str:
        return repr(D)

    # trajectories; W defaults to the base subgroup
    def member_plus(self, x, h: int, W=None) -> TriBool:
        raise NotImplementedError

    def member_minus(self, x, h: int, W=None) -> TriBool:
        raise NotImplementedError

    def member_plusplus(self, x, h: int, W=None) -> TriBool:
        raise NotImplementedError

    def member_minusminus(self, x, h: int, W=None) -> TriBool:
        raise NotImplementedError

    def seed_in_neighbours(self, W, h: int):
        """Representatives of W_{++} cap W_{--} cap alpha^{-1}(W) modulo W.

        Returns (reps, exact).  reps always starts with the identity.
        """
        raise NotImplementedError

    def certify_tidy(self, W) -> Optional[bool]:
        """Exact tidiness decision when the family has one, else None."""
        return None

    def random_subgroup(self, rng):
        raise NotImplementedError

    def random_element(self, D, rng):
        raise NotImplementedError

    def sample_plus(self, W, rng):
        """A random element certified in W_+, or None."""
        raise NotImplementedError

    def element_repr(self, x) -> str:
        return repr(x)


# generic machinery -------------------------------------------------------


def level(model: GroupModel, W, i: int):
    """W cap alpha^{-i}(W)."""
    return W if i == 0 else model.preimage_in(W, W, i)


def chain(model: GroupModel, n: int, W=None) -> ChainReport:
    """The nested chain W_0 >= W_{-1} >= ... >= W_{-n}."""
    if n < 0:
        raise ValueError("depth must be non-negative")
    W = model.base if W is None else W
    descs = [W]
    for _ in range(n):
        descs.append(model.preimage_in(descs[-1], W, 1))
    idx = tuple(model.index(descs[k], descs[k + 1]) for k in range(n))
    stab = next((k for k in range(n) if descs[k] == descs[k + 1]), None)
    return ChainReport(n, tuple(descs), idx, stab is not None, stab)


def index(model: GroupModel, K, H) -> int:
    w = model.containment_witness(K, H)
    if w is not None:
        raise ContainmentError("H is not contained in K", witness=w)
    return model.index(K, H)


def transversal(model: GroupModel, K, H, cap: Optional[int] = None) -> list:
    """Left transversal of H in K, identity first, in breadth-first order."""
    w = model.containment_witness(K, H)
    if w is not None:
        raise ContainmentError("H is not contained in K", witness=w)
    e = model.identity()
    gens = model.generators(K, H)
    seen = {model.coset_key(e, H)}
    out = [e]
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = model.mul(x, g)
                k = model.coset_key(y, H)
                if k not in seen:
                    seen.add(k)
                    out.append(y)
                    nxt.append(y)
                    if cap is not None and len(out) > cap:
                        raise HorizonExhaustedError(f"transversal exceeds cap {cap}")
        frontier = nxt
    return out


def regress(model: GroupModel, e, h: int):
    """Canonical preimage of e, required to lie in U_{++} at horizon h."""
    v = model.member_plusplus(e, h)
    if not v.is_yes:
        raise HorizonExhaustedError(f"no certified regressive trajectory within horizon {h}")
    u = model.regress(e)
    if u is None:
        raise HorizonExhaustedError("no preimage available")
    return u


def regress_n(model: GroupModel, e, n: int):
    for _ in range(n):
        e = model.regress(e)
        if e is None:
            raise HorizonExhaustedError("no preimage available")
    return e


def member_plus(model, e, h, W=None):
    return model.member_plus(e, h, W)


def member_plusplus(model, e, h, W=None):
    return model.member_plusplus(e, h, W)


def member_minusminus(model, e, h, W=None):
    return model.member_minusminus(e, h, W)
