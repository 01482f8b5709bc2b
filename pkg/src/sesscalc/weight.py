"""Level-annotated typing for pi-W and the weight measure.

Contexts map names to ``(mode, type)`` with mode ``:`` (plain) or ``::``
(dual-join: both complementary protocols of a restricted name, stored in
the orientation whose head is an input or a server).

One checker serves two purposes.  With integer levels it decides
``g |-w p``.  With level variables (Names in the level position of types) it
records the level side conditions as constraints instead of checking them;
``solve_levels`` then finds a minimal satisfying assignment.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import networkx as nx
from networkx.utils import UnionFind

from .errors import (
    LeftoverLinear, LevelViolation, MissingLevel, ModeMismatch, TypeMismatch,
    UnknownName, Unsatisfiable,
)
from .names import Name
from .syntax import (
    Proc, TCli, TIn, TOut, TSrv, TUnit, WIn, WNil, WOut, WPar, WRes, WServer,
)

WCtx = dict  # Name -> (mode, WType)

# --------------------------------------------------------------------------
# Types


def dual_w(v):
    """Complement of a link type.  The transmitted name keeps its type; the
    continuation carried in the second slot of a linear type is dualised."""
    match v:
        case TUnit():
            return v
        case TIn(n, a, b):
            return TOut(n, a, dual_w(b))
        case TOut(n, a, b):
            return TIn(n, a, dual_w(b))
        case TSrv(n, a):
            return TCli(n, a)
        case TCli(n, a):
            return TSrv(n, a)
    raise TypeError(v)


def un_w(v) -> bool:
    return isinstance(v, (TUnit, TSrv, TCli))


def join_type(v):
    """Canonical stored orientation of a dual-join: input or server head."""
    return dual_w(v) if isinstance(v, (TOut, TCli)) else v


def level_of(v) -> Optional[Union[int, Name]]:
    return None if isinstance(v, TUnit) else v.level


def map_levels(v, f):
    match v:
        case TUnit():
            return v
        case TIn(n, a, b):
            return TIn(f(n), map_levels(a, f), map_levels(b, f))
        case TOut(n, a, b):
            return TOut(f(n), map_levels(a, f), map_levels(b, f))
        case TSrv(n, a):
            return TSrv(f(n), map_levels(a, f))
        case TCli(n, a):
            return TCli(f(n), map_levels(a, f))
    raise TypeError(v)


def type_levels(v) -> list:
    out: list = []
    map_levels(v, lambda n: out.append(n) or n)
    return out


def _pairs(a, b) -> Optional[list]:
    """Level pairs of two types with the same shape, or None."""
    if type(a) is not type(b):
        return None
    match a:
        case TUnit():
            return []
        case TIn() | TOut():
            x, y = _pairs(a.p1, b.p1), _pairs(a.p2, b.p2)
            return None if x is None or y is None else [(a.level, b.level)] + x + y
        case TSrv() | TCli():
            x = _pairs(a.p, b.p)
            return None if x is None else [(a.level, b.level)] + x
    raise TypeError(a)


# --------------------------------------------------------------------------
# Active outputs, weights, vector order


def active_outputs(p: Proc) -> set[Name]:
    match p:
        case WOut(x, _, _, c):
            return {x} | active_outputs(c)
        case WIn(_, _, _, b):
            return active_outputs(b)
        case WPar(l, r):
            return active_outputs(l) | active_outputs(r)
        case WRes(_, b, _):
            return active_outputs(b)
        case WNil() | WServer():
            return set()
    raise TypeError(p)


WeightVector = dict  # level -> positive count


def weight(p: Proc, l: dict) -> WeightVector:
    """Multiset of levels of the active output prefixes of ``p``."""
    acc: Counter = Counter()

    def go(q: Proc) -> None:
        match q:
            case WOut(x, _, _, c):
                if x not in l:
                    raise MissingLevel(f"no level for output subject {x}", name=x)
                acc[l[x]] += 1
                go(c)
            case WIn(_, _, _, b) | WRes(_, b, _):
                go(b)
            case WPar(a, b):
                go(a)
                go(b)

    go(p)
    return {k: v for k, v in sorted(acc.items()) if v}


def weight_less(a: WeightVector, b: WeightVector) -> bool:
    """Strict order: compare counts from the highest level downwards."""
    for lvl in sorted(set(a) | set(b), reverse=True):
        x, y = a.get(lvl, 0), b.get(lvl, 0)
        if x != y:
            return x < y
    return False


# --------------------------------------------------------------------------
# Constraints and solving


@dataclass(frozen=True)
class Eq:
    a: Name
    b: Name


@dataclass(frozen=True)
class Lt:
    """level(a) < level(b)"""

    a: Name
    b: Name


LevelConstraint = Union[Eq, Lt]


def solve_levels(cs) -> dict:
    """Minimal positive levels satisfying all constraints.

    Eq constraints are merged with union-find; Lt edges between the classes
    must form a DAG, and each class gets 1 + the longest chain below it."""
    cs = list(cs)
    uf = UnionFind()
    names: list[Name] = []
    for c in cs:
        for n in (c.a, c.b):
            if n not in names:
                names.append(n)
            uf[n]
    for c in cs:
        if isinstance(c, Eq):
            uf.union(c.a, c.b)
    g = nx.DiGraph()
    for n in names:
        g.add_node(uf[n])
    members: dict = {}
    for n in names:
        members.setdefault(uf[n], []).append(n)
    for c in cs:
        if isinstance(c, Lt):
            ra, rb = uf[c.a], uf[c.b]
            if ra == rb:
                raise Unsatisfiable(_witness(cs, uf, [ra], members))
            g.add_edge(ra, rb, via=(c.a, c.b))
    try:
        order = list(nx.topological_sort(g))
    except nx.NetworkXUnfeasible:
        cyc = nx.find_cycle(g)
        raise Unsatisfiable(_witness(cs, uf, [e[0] for e in cyc], members, g, cyc)) from None
    lvl: dict = {}
    for r in order:
        preds = [lvl[q] for q in g.predecessors(r)]
        lvl[r] = 1 + max(preds, default=0)
    return {n: lvl[uf[n]] for n in names}


def _witness(cs, uf, roots, members, g=None, cyc=None) -> list:
    if cyc is None:
        r = roots[0]
        for c in cs:
            if isinstance(c, Lt) and uf[c.a] == r and uf[c.b] == r:
                return sorted({c.a, c.b}, key=str)
        return [r]
    out: list = []
    for u, v in cyc:
        a, b = g.edges[u, v]["via"]
        for n in (a, b):
            if n not in out:
                out.append(n)
    return out


def satisfies(l: dict, cs) -> bool:
    for c in cs:
        if c.a not in l or c.b not in l:
            return False
        if isinstance(c, Eq) and l[c.a] != l[c.b]:
            return False
        if isinstance(c, Lt) and not l[c.a] < l[c.b]:
            return False
    return True


# --------------------------------------------------------------------------
# Typing


@dataclass
class WDerivation:
    rule: str
    term: object
    premises: list = field(default_factory=list)

    def rules(self) -> list[str]:
        out = [self.rule]
        for p in self.premises:
            out += p.rules()
        return out

    def render(self, indent: int = 0) -> str:
        from .printer import show
        pad = "  " * indent
        head = f"{pad}[{self.rule}] {show(self.term)}"
        return "\n".join([head] + [p.render(indent + 1) for p in self.premises])


@dataclass(frozen=True)
class _Entry:
    mode: str  # ":" or "::"
    type: object
    optional: bool = False  # remainder of a dual-join that may be dropped

    @property
    def un(self) -> bool:
        return un_w(self.type)


class _WChecker:
    def __init__(self, symbolic: bool):
        self.symbolic = symbolic
        self.constraints: set = set()
        self.outputs: list[list] = []  # collectors of (subject, level)
        self.levels: dict = {}

    # -- level side conditions
    def same(self, a, b, what: str) -> None:
        ps = _pairs(a, b)
        if ps is None:
            raise TypeMismatch(f"{what}: {_w(a)} vs {_w(b)}")
        for x, y in ps:
            self.eq(x, y, what)

    def eq(self, x, y, what: str) -> None:
        if x == y:
            return
        if self.symbolic and isinstance(x, Name) and isinstance(y, Name):
            self.constraints.add(Eq(x, y))
            return
        raise LevelViolation(f"{what}: level {x} differs from {y}")

    def lt(self, b: Name, lb, x: Name, lx) -> None:
        if self.symbolic and isinstance(lb, Name) and isinstance(lx, Name):
            self.constraints.add(Lt(lb, lx))
            return
        if isinstance(lb, Name) or isinstance(lx, Name) or not lb < lx:
            raise LevelViolation(f"active output {b} (level {lb}) is not below server {x} (level {lx})",
                                 name=b, subject=x)

    def note(self, x: Name, v) -> None:
        lv = level_of(v)
        if lv is not None:
            self.levels[x] = lv

    # -- context operations
    def lookup(self, g: dict, x: Name) -> _Entry:
        if x not in g:
            raise UnknownName(f"{x} is not in the typing context", name=x)
        return g[x]

    def linear_subject(self, g: dict, x: Name, head) -> tuple:
        """Plain use of a linear subject with the given head constructor."""
        e = self.lookup(g, x)
        g2 = {k: v for k, v in g.items() if k != x}
        if e.mode == ":":
            if not isinstance(e.type, head):
                raise TypeMismatch(f"{x} has type {_w(e.type)}, expected {head.__name__[1:].lower()}")
            return e.type, g2
        if e.un:
            raise ModeMismatch(f"{x} is an unrestricted dual-join, not a linear {head.__name__[1:].lower()}")
        v = e.type if isinstance(e.type, head) else dual_w(e.type)
        if not isinstance(v, head):
            raise TypeMismatch(f"{x} has no {head.__name__[1:].lower()} side")
        g2[x] = _Entry(":", dual_w(v), False)
        return v, g2

    def value(self, g: dict, y: Name, want) -> dict:
        """Var judgment ``y : want``; returns the remaining context."""
        e = self.lookup(g, y)
        if e.mode == ":":
            self.same(e.type, want, f"value {y}")
            return g if e.un else {k: v for k, v in g.items() if k != y}
        cands = [e.type, dual_w(e.type)]
        pick = next((c for c in cands if _pairs(c, want) is not None), None)
        if pick is None:
            raise TypeMismatch(f"value {y}: neither side of {_w(e.type)} matches {_w(want)}")
        self.same(pick, want, f"value {y}")
        if e.un:
            return g
        g2 = {k: v for k, v in g.items() if k != y}
        g2[y] = _Entry(":", dual_w(pick), True)
        return g2

    def unres_subject(self, g: dict, x: Name, head) -> tuple:
        """Server or client use of ``x`` (Lin-In2/3, Un-Out1/2, Un-In1/2)."""
        e = self.lookup(g, x)
        if e.mode == ":":
            if not isinstance(e.type, head):
                raise TypeMismatch(f"{x} has type {_w(e.type)}, expected {head.__name__[1:].lower()}")
            return e.type, "1"
        v = e.type if isinstance(e.type, head) else dual_w(e.type)
        if not isinstance(v, head):
            raise TypeMismatch(f"{x} has no {head.__name__[1:].lower()} side")
        return v, "2"

    def close(self, rest: dict, names) -> dict:
        for n in names:
            e = rest.get(n)
            if e is not None and not e.un and not e.optional:
                raise LeftoverLinear(f"linear {n} is not used up", name=n)
        return {k: v for k, v in rest.items() if k not in names}

    # -- processes
    def check(self, g: dict, p: Proc) -> tuple:
        match p:
            case WNil():
                return WDerivation("Nil", p), g
            case WPar(l, r):
                d1, rest = self.check(g, l)
                d2, rest2 = self.check(rest, r)
                return WDerivation("Par", p, [d1, d2]), rest2
            case WRes(x, body, annot):
                if annot is None:
                    raise UnknownName(f"restriction {x} carries no type annotation", name=x)
                v = join_type(annot)
                self.note(x, v)
                d, rest = self.check({**g, x: _Entry("::", v)}, body)
                return WDerivation("Res", p, [d]), self.close(rest, [x])
            case WIn(x, y1, y2, body):
                e = self.lookup(g, x)
                if (e.mode == ":" and isinstance(e.type, TSrv)) or (e.mode == "::" and e.un):
                    v, k = self.unres_subject(g, x, TSrv)
                    inner = {**g, y1: _Entry(":", v.p), y2: _Entry(":", TUnit())}
                    self.note(y1, v.p)
                    d, rest = self.check(inner, body)
                    return WDerivation(f"Lin-In{1 + int(k)}", p, [d]), self.close(rest, [y1, y2])
                v, g2 = self.linear_subject(g, x, TIn)
                self.note(y1, v.p1)
                self.note(y2, v.p2)
                lv2 = level_of(v.p2)
                if lv2 is not None:
                    self.eq(v.level, lv2, f"continuation of {x}")
                d, rest = self.check({**g2, y1: _Entry(":", v.p1), y2: _Entry(":", v.p2)}, body)
                return WDerivation("Lin-In1", p, [d]), self.close(rest, [y1, y2])
            case WOut(x, y1, y2, cont):
                return self.output(g, p)
            case WServer(x, y1, y2, body):
                v, k = self.unres_subject(g, x, TSrv)
                ug = {n: e for n, e in g.items() if e.un}
                inner = {**ug, y1: _Entry(":", v.p), y2: _Entry(":", TUnit())}
                self.note(y1, v.p)
                self.outputs.append([])
                d, rest = self.check(inner, body)
                outs = self.outputs.pop()
                self.close(rest, [y1, y2])
                for n, e in rest.items():
                    if not e.un and not e.optional and n not in (y1, y2):
                        raise LeftoverLinear(f"linear {n} is not used up", name=n)
                for b, lb in outs:
                    self.lt(b, lb, x, v.level)
                return WDerivation(f"Un-In{k}", p, [d]), g
        raise TypeError(p)

    def output(self, g: dict, p: WOut):
        x, y1, y2, cont = p.subject, p.p1, p.p2, p.cont
        e = self.lookup(g, x)
        if (e.mode == ":" and isinstance(e.type, TCli)) or (e.mode == "::" and e.un):
            v, k = self.unres_subject(g, x, TCli)
            self._emit(x, v)
            g2 = self.value(g, y1, v.p)
            e2 = self.lookup(g2, y2) if y2 in g2 else self.lookup(g, y2)
            if not isinstance(e2.type, TUnit):
                raise TypeMismatch(f"second payload {y2} of a client output must be unit")
            d, rest = self.check(g2, cont)
            return WDerivation(f"Un-Out{k}", p, [d]), rest
        v, g1 = self.linear_subject(g, x, TOut)
        self._emit(x, v)
        g2 = self.value(g1, y1, v.p1)
        e2 = self.lookup(g2, y2)
        if e2.mode != "::":
            raise ModeMismatch(f"continuation {y2} must be a restricted dual-join name", name=y2)
        cands = [e2.type, dual_w(e2.type)]
        pick = next((c for c in cands if _pairs(c, v.p2) is not None), None)
        if pick is None:
            raise TypeMismatch(f"continuation {y2}: {_w(e2.type)} does not match {_w(v.p2)}")
        self.same(pick, v.p2, f"continuation {y2}")
        lv2 = level_of(v.p2)
        if lv2 is not None:
            self.eq(v.level, lv2, f"continuation of {x}")
        g3 = {k: w for k, w in g2.items() if k != y2}
        g3[y2] = _Entry(":", v.p2)
        d, rest = self.check(g3, cont)
        rest = self.close(rest, [y2])
        if e2.un:
            rest = {**rest, y2: e2}
        return WDerivation("Lin-Out", p, [d]), rest

    def _emit(self, x: Name, v) -> None:
        if self.outputs:
            self.outputs[-1].append((x, v.level))


def _w(v) -> str:
    from .printer import show_wtype
    return show_wtype(v)


def _entries(g: WCtx) -> dict:
    out = {}
    for x, (mode, v) in g.items():
        out[x] = _Entry(mode, join_type(v) if mode == "::" else v)
    return out


def instantiate(v, l: dict):
    """Replace level variables in a type by their assigned levels."""
    def f(n):
        if isinstance(n, Name):
            if n not in l:
                raise MissingLevel(f"no level for variable {n}", name=n)
            return l[n]
        return n
    return map_levels(v, f)


def instantiate_ctx(g: WCtx, l: dict) -> WCtx:
    return {x: (m, instantiate(v, l)) for x, (m, v) in g.items()}


def instantiate_proc(p: Proc, l: dict) -> Proc:
    changes = {}
    if isinstance(p, WRes) and p.annot is not None:
        changes["annot"] = instantiate(p.annot, l)
    for _, scope in p._binds:
        for k in scope:
            changes[k] = instantiate_proc(getattr(p, k), l)
    for k in p._kids:
        changes[k] = instantiate_proc(getattr(p, k), l)
    return replace(p, **changes) if changes else p


def level_vars(g: WCtx, p: Proc) -> list:
    """Level variables occurring in the context and restriction annotations."""
    out: list = []

    def add(v):
        for n in type_levels(v):
            if isinstance(n, Name) and n not in out:
                out.append(n)

    for _, (_, v) in g.items():
        add(v)

    def go(q):
        if isinstance(q, WRes) and q.annot is not None:
            add(q.annot)
        for _, scope in q._binds:
            for k in scope:
                go(getattr(q, k))
        for k in q._kids:
            go(getattr(q, k))

    go(p)
    return out


def _run(g: WCtx, p: Proc, symbolic: bool) -> _WChecker:
    c = _WChecker(symbolic)
    ent = _entries(g)
    for x, e in ent.items():
        c.note(x, e.type)
    d, rest = c.check(ent, p)
    for n, e in rest.items():
        if not e.un and not e.optional:
            raise LeftoverLinear(f"linear {n} is not used up", name=n)
    c.derivation = d
    return c


def check_w(g: WCtx, p: Proc, l: Optional[dict] = None) -> WDerivation:
    """Derive ``g |-w p`` under level assignment ``l``.

    Level variables in types are resolved through ``l``; names that ``l``
    also maps must agree with the level of their type."""
    l = dict(l or {})
    gi = instantiate_ctx(g, l)
    pi = instantiate_proc(p, l)
    c = _run(gi, pi, symbolic=False)
    for x, n in c.levels.items():
        if x in l and l[x] != n:
            raise LevelViolation(f"level of {x} is {l[x]} but its type has level {n}", name=x)
    return c.derivation


def level_map(g: WCtx, p: Proc, l: Optional[dict] = None) -> dict:
    """Levels of every non-unit name of ``p`` (free and bound) as typed."""
    l = dict(l or {})
    c = _run(instantiate_ctx(g, l), instantiate_proc(p, l), symbolic=False)
    return dict(c.levels)


def gen_constraints(g: WCtx, p: Proc) -> set:
    """Level constraints of a judgment whose types carry level variables."""
    return set(_run(g, p, symbolic=True).constraints)


def typable_w(g: WCtx, p: Proc, l: Optional[dict] = None) -> bool:
    try:
        check_w(g, p, l)
        return True
    except TypeError:
        raise
    except Exception:  # noqa: BLE001
        return False
