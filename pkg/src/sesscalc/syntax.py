"""Abstract syntax of the three calculi and the binding operations on it.

Every process constructor declares its *shape*: which fields are free name
occurrences, which fields bind names over which sub-terms, and which fields
are plain sub-terms.  ``free_names``, ``substitute``, ``normalize`` and
``alpha_eq`` are written once against the shape and work for all calculi.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Iterable, Optional, Union

from .names import Name, Supply

# --------------------------------------------------------------------------
# Session types (pi-S)


@dataclass(frozen=True)
class SEnd:
    pass


@dataclass(frozen=True)
class SLin:
    """``lin ?T.S`` (dir ``?``) or ``lin !T.S`` (dir ``!``)."""

    dir: str
    payload: "SType"
    cont: "SType"


@dataclass(frozen=True)
class SServer:
    """``*?T``: the replicated input type ``mu a. un ?T.a``."""

    payload: "SType"


@dataclass(frozen=True)
class SClient:
    """``*!T``: the replicated output type ``mu a. un !T.a``."""

    payload: "SType"


SType = Union[SEnd, SLin, SServer, SClient]

# --------------------------------------------------------------------------
# Link types (pi-W).  Levels are positive integers; during constraint
# generation a level may instead be a Name acting as a level variable.

Level = Union[int, Name]


@dataclass(frozen=True)
class TUnit:
    pass


@dataclass(frozen=True)
class TIn:
    level: Level
    p1: "WType"
    p2: "WType"


@dataclass(frozen=True)
class TOut:
    level: Level
    p1: "WType"
    p2: "WType"


@dataclass(frozen=True)
class TSrv:
    level: Level
    p: "WType"


@dataclass(frozen=True)
class TCli:
    level: Level
    p: "WType"


WType = Union[TUnit, TIn, TOut, TSrv, TCli]

# --------------------------------------------------------------------------
# Propositions (pi-DILL)


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Bang:
    inner: "DType"


@dataclass(frozen=True)
class Lolli:
    arg: "DType"
    res: "DType"


@dataclass(frozen=True)
class Tensor:
    arg: "DType"
    res: "DType"


@dataclass(frozen=True)
class Plus:
    left: "DType"
    right: "DType"


@dataclass(frozen=True)
class With:
    left: "DType"
    right: "DType"


DType = Union[One, Bang, Lolli, Tensor, Plus, With]

# --------------------------------------------------------------------------
# Processes.  ``_occ`` lists free-occurrence fields, ``_binds`` lists
# (binder fields, scope fields) pairs, ``_kids`` lists unscoped sub-terms.


class Proc:
    _occ: tuple = ()
    _binds: tuple = ()
    _kids: tuple = ()
    _calc: str = ""


# pi-S


@dataclass(frozen=True)
class SNil(Proc):
    _calc = "s"


@dataclass(frozen=True)
class SOut(Proc):
    subject: Name
    value: Name
    cont: Proc
    _occ = ("subject", "value")
    _kids = ("cont",)
    _calc = "s"


@dataclass(frozen=True)
class SIn(Proc):
    qual: str  # "lin" or "un"
    subject: Name
    binder: Name
    body: Proc
    _occ = ("subject",)
    _binds = ((("binder",), ("body",)),)
    _calc = "s"


@dataclass(frozen=True)
class SPar(Proc):
    left: Proc
    right: Proc
    _kids = ("left", "right")
    _calc = "s"


@dataclass(frozen=True)
class SRes(Proc):
    """``new a b. body``; ``types`` optionally records (type of a, type of b)."""

    a: Name
    b: Name
    body: Proc
    types: Optional[tuple] = None
    _binds = ((("a", "b"), ("body",)),)
    _calc = "s"


# pi-W


@dataclass(frozen=True)
class WNil(Proc):
    _calc = "w"


@dataclass(frozen=True)
class WOut(Proc):
    subject: Name
    p1: Name
    p2: Name
    cont: Proc
    _occ = ("subject", "p1", "p2")
    _kids = ("cont",)
    _calc = "w"


@dataclass(frozen=True)
class WIn(Proc):
    subject: Name
    b1: Name
    b2: Name
    body: Proc
    _occ = ("subject",)
    _binds = ((("b1", "b2"), ("body",)),)
    _calc = "w"


@dataclass(frozen=True)
class WServer(Proc):
    subject: Name
    b1: Name
    b2: Name
    body: Proc
    _occ = ("subject",)
    _binds = ((("b1", "b2"), ("body",)),)
    _calc = "w"


@dataclass(frozen=True)
class WPar(Proc):
    left: Proc
    right: Proc
    _kids = ("left", "right")
    _calc = "w"


@dataclass(frozen=True)
class WRes(Proc):
    """``new x. body``; ``annot`` is the dual-join type of x when known."""

    name: Name
    body: Proc
    annot: Optional[WType] = None
    _binds = ((("name",), ("body",)),)
    _calc = "w"


# pi-DILL


@dataclass(frozen=True)
class DNil(Proc):
    _calc = "dill"


@dataclass(frozen=True)
class DBOut(Proc):
    """Bound output ``x!(z).P``, i.e. ``new z. x<z>.P``."""

    subject: Name
    binder: Name
    cont: Proc
    _occ = ("subject",)
    _binds = ((("binder",), ("cont",)),)
    _calc = "dill"


@dataclass(frozen=True)
class DIn(Proc):
    subject: Name
    binder: Name
    body: Proc
    _occ = ("subject",)
    _binds = ((("binder",), ("body",)),)
    _calc = "dill"


@dataclass(frozen=True)
class DServer(Proc):
    subject: Name
    binder: Name
    body: Proc
    _occ = ("subject",)
    _binds = ((("binder",), ("body",)),)
    _calc = "dill"


@dataclass(frozen=True)
class DPar(Proc):
    left: Proc
    right: Proc
    _kids = ("left", "right")
    _calc = "dill"


@dataclass(frozen=True)
class DRes(Proc):
    name: Name
    annot: Optional[DType]
    body: Proc
    _binds = ((("name",), ("body",)),)
    _calc = "dill"


@dataclass(frozen=True)
class DFwd(Proc):
    """Forwarder ``[a <-> b]``: uses a, provides b."""

    a: Name
    b: Name
    _occ = ("a", "b")
    _calc = "dill"


@dataclass(frozen=True)
class DSelL(Proc):
    subject: Name
    cont: Proc
    _occ = ("subject",)
    _kids = ("cont",)
    _calc = "dill"


@dataclass(frozen=True)
class DSelR(Proc):
    subject: Name
    cont: Proc
    _occ = ("subject",)
    _kids = ("cont",)
    _calc = "dill"


@dataclass(frozen=True)
class DCase(Proc):
    subject: Name
    left: Proc
    right: Proc
    _occ = ("subject",)
    _kids = ("left", "right")
    _calc = "dill"


SProc = Union[SNil, SOut, SIn, SPar, SRes]
WProc = Union[WNil, WOut, WIn, WServer, WPar, WRes]
DProc = Union[DNil, DBOut, DIn, DServer, DPar, DRes, DFwd, DSelL, DSelR, DCase]

NIL = {"s": SNil(), "w": WNil(), "dill": DNil()}
PAR = {"s": SPar, "w": WPar, "dill": DPar}


def calculus_of(p: Proc) -> str:
    return p._calc


# --------------------------------------------------------------------------
# Generic traversals


def free_names(p: Proc) -> set[Name]:
    """Names with a free occurrence in ``p``."""
    out = {getattr(p, f) for f in p._occ}
    for k in p._kids:
        out |= free_names(getattr(p, k))
    for binders, scope in p._binds:
        inner: set[Name] = set()
        for k in scope:
            inner |= free_names(getattr(p, k))
        out |= inner - {getattr(p, b) for b in binders}
    return out


def all_names(p: Proc) -> set[Name]:
    """Every name occurring in ``p``, free or bound."""
    out = {getattr(p, f) for f in p._occ}
    for binders, scope in p._binds:
        out |= {getattr(p, b) for b in binders}
        for k in scope:
            out |= all_names(getattr(p, k))
    for k in p._kids:
        out |= all_names(getattr(p, k))
    return out


def bound_names(p: Proc) -> list[Name]:
    """Binders of ``p`` in pre-order (with repetition if shadowed)."""
    out: list[Name] = []
    for binders, scope in p._binds:
        out.extend(getattr(p, b) for b in binders)
        for k in scope:
            out.extend(bound_names(getattr(p, k)))
    for k in p._kids:
        out.extend(bound_names(getattr(p, k)))
    return out


def size(p: Proc) -> int:
    """Number of constructor nodes."""
    n = 1
    for k in p._kids:
        n += size(getattr(p, k))
    for _, scope in p._binds:
        for k in scope:
            n += size(getattr(p, k))
    return n


def rename(p: Proc, mapping: dict[Name, Name], supply: Optional[Supply] = None) -> Proc:
    """Simultaneous capture-avoiding renaming of free names."""
    if not mapping:
        return p
    if supply is None:
        supply = Supply(all_names(p) | set(mapping) | set(mapping.values()))
    changes = {}
    for f in p._occ:
        v = getattr(p, f)
        if v in mapping:
            changes[f] = mapping[v]
    for k in p._kids:
        changes[k] = rename(getattr(p, k), mapping, supply)
    for binders, scope in p._binds:
        inner = {m: v for m, v in mapping.items()}
        for b in binders:
            bn = getattr(p, b)
            inner.pop(bn, None)
        scope_fn: set[Name] = set()
        for k in scope:
            scope_fn |= free_names(getattr(p, k))
        live = {m: v for m, v in inner.items() if m in scope_fn}
        for b in binders:
            bn = getattr(p, b)
            if bn in {v for v in live.values()}:
                nb = supply(bn.base)
                live[bn] = nb
                changes[b] = nb
        for k in scope:
            changes[k] = rename(getattr(p, k), live, supply)
    return replace(p, **changes) if changes else p


def substitute(p: Proc, value: Name, variable: Name) -> Proc:
    """``p{value/variable}`` without capture."""
    if variable not in free_names(p):
        return p
    return rename(p, {variable: value})


def normalize(p: Proc, avoid: Iterable[Name] = ()) -> Proc:
    """Barendregt normal form: binders pairwise distinct and disjoint from
    the free names of ``p`` and from ``avoid``.  Binders keep their surface
    name where possible."""
    used = free_names(p) | set(avoid)
    supply = Supply(all_names(p) | used)

    def go(q: Proc) -> Proc:
        changes = {}
        for k in q._kids:
            changes[k] = go(getattr(q, k))
        for binders, scope in q._binds:
            mapping = {}
            for b in binders:
                bn = getattr(q, b)
                if bn in used:
                    nb = supply(bn.base)
                    mapping[bn] = nb
                    changes[b] = nb
                    used.add(nb)
                else:
                    used.add(bn)
            for k in scope:
                body = getattr(q, k)
                if mapping:
                    body = rename(body, mapping, supply)
                changes[k] = go(body)
        return replace(q, **changes) if changes else q

    return go(p)


def is_normal(p: Proc) -> bool:
    """True when all binders are distinct and none is also free."""
    bs = bound_names(p)
    return len(bs) == len(set(bs)) and not (set(bs) & free_names(p))


_ANNOT_FIELDS = {"types", "annot"}


def strip_annotations(p: Proc) -> Proc:
    changes = {}
    for f in fields(p):
        if f.name in _ANNOT_FIELDS and getattr(p, f.name) is not None:
            changes[f.name] = None
    for k in p._kids:
        changes[k] = strip_annotations(getattr(p, k))
    for _, scope in p._binds:
        for k in scope:
            changes[k] = strip_annotations(getattr(p, k))
    return replace(p, **changes) if changes else p


def debruijn(p: Proc) -> Proc:
    """Rename bound names to ``%b0, %b1, ...`` in pre-order."""
    counter = [0]

    def go(q: Proc, env: dict[Name, Name]) -> Proc:
        changes = {}
        for f in q._occ:
            v = getattr(q, f)
            if v in env:
                changes[f] = env[v]
        for k in q._kids:
            changes[k] = go(getattr(q, k), env)
        for binders, scope in q._binds:
            inner = dict(env)
            for b in binders:
                nb = Name("%b", counter[0])
                counter[0] += 1
                inner[getattr(q, b)] = nb
                changes[b] = nb
            for k in scope:
                changes[k] = go(getattr(q, k), inner)
        return replace(q, **changes) if changes else q

    return go(p, {})


def alpha_eq(a: Proc, b: Proc, annotations: bool = True) -> bool:
    """Equality up to consistent renaming of bound names."""
    if not annotations:
        a, b = strip_annotations(a), strip_annotations(b)
    return debruijn(a) == debruijn(b)


def par_components(p: Proc) -> list[Proc]:
    """Flatten nested parallel composition."""
    if isinstance(p, (SPar, WPar, DPar)):
        return par_components(p.left) + par_components(p.right)
    return [p]


def par_of(calc: str, comps: list[Proc]) -> Proc:
    """Left-nested parallel composition; empty list gives 0."""
    if not comps:
        return NIL[calc]
    out = comps[0]
    for c in comps[1:]:
        out = PAR[calc](out, c)
    return out
