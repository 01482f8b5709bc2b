"""Reduction for pi-S and pi-DILL, the labelled transitions of pi-W,
structural congruence by canonical forms, and a bounded executor."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

from .names import Name, Supply
from .printer import show
from .syntax import (
    DBOut, DCase, DFwd, DIn, DNil, DPar, DRes, DSelL, DSelR, DServer, Lolli,
    Bang, NIL, Plus, Proc, SIn, SLin, SNil, SOut, SPar, SRes, Tensor, WIn,
    WNil, WOut, WPar, WRes, WServer, With, all_names, calculus_of, debruijn,
    free_names, normalize, par_of, rename, strip_annotations,
)

# --------------------------------------------------------------------------
# Restrictions as data


@dataclass(frozen=True)
class _Res:
    names: tuple  # one name, or the two co-variables of pi-S
    annot: object = None


_RES = (SRes, WRes, DRes)
_PAR = (SPar, WPar, DPar)


def _res_of(p: Proc) -> tuple[_Res, Proc]:
    match p:
        case SRes(a, b, body, types):
            return _Res((a, b), types), body
        case WRes(x, body, annot):
            return _Res((x,), annot), body
        case DRes(x, annot, body):
            return _Res((x,), annot), body
    raise TypeError(p)


def _mk_res(calc: str, r: _Res, body: Proc) -> Proc:
    if calc == "s":
        return SRes(r.names[0], r.names[1], body, r.annot)
    if calc == "w":
        return WRes(r.names[0], body, r.annot)
    return DRes(r.names[0], r.annot, body)


def _flatten(p: Proc) -> tuple[list[_Res], list[Proc]]:
    """Top-level restrictions and parallel components (``p`` must satisfy
    the Barendregt convention so that extrusion cannot capture)."""
    if isinstance(p, _PAR):
        r1, c1 = _flatten(p.left)
        r2, c2 = _flatten(p.right)
        return r1 + r2, c1 + c2
    if isinstance(p, _RES):
        r, body = _res_of(p)
        rs, cs = _flatten(body)
        return [r] + rs, cs
    return [], [p]


def _build(calc: str, rs: list[_Res], cs: list[Proc]) -> Proc:
    out = par_of(calc, cs)
    for r in reversed(rs):
        out = _mk_res(calc, r, out)
    return out


def _occurrences(p: Proc) -> list[Name]:
    """Free names in left-to-right textual order, first occurrence only."""
    seen: list[Name] = []

    def go(q: Proc, bound: frozenset) -> None:
        for f in q._occ:
            n = getattr(q, f)
            if n not in bound and n not in seen:
                seen.append(n)
        for binders, scope in q._binds:
            inner = bound | {getattr(q, b) for b in binders}
            for k in scope:
                go(getattr(q, k), inner)
        for k in q._kids:
            go(getattr(q, k), bound)

    go(p, frozenset())
    return seen


def _is_nil(p: Proc) -> bool:
    return isinstance(p, (SNil, WNil, DNil))


def _canon_prefix(p: Proc, collect: bool) -> Proc:
    changes = {}
    for _, scope in p._binds:
        for k in scope:
            changes[k] = _canon(getattr(p, k), collect)
    for k in p._kids:
        changes[k] = _canon(getattr(p, k), collect)
    return replace(p, **changes) if changes else p


_PLACEHOLDER = Name("%r")
_PERMUTATION_CAP = 720


def _canon(p: Proc, collect: bool) -> Proc:
    calc = calculus_of(p)
    rs, cs = _flatten(p)
    cs = [_canon_prefix(c, collect) for c in cs if not _is_nil(c)]
    cs = [c for c in cs if not _is_nil(c)]
    live: set[Name] = set()
    for c in cs:
        live |= free_names(c)
    if collect or not cs:
        rs = [r for r in rs if any(n in live for n in r.names)]
    if not rs and len(cs) <= 1:
        return cs[0] if cs else NIL[calc]
    hidden = {n: _PLACEHOLDER for r in rs for n in r.names}
    keyed = sorted(((show(debruijn(rename(c, hidden))), c) for c in cs), key=lambda kc: kc[0])
    groups = [[c for _, c in g] for _, g in itertools.groupby(keyed, key=lambda kc: kc[0])]
    n_orders = math.prod(math.factorial(len(g)) for g in groups)
    if n_orders > _PERMUTATION_CAP:
        candidates = [[c for g in groups for c in g]]
    else:
        candidates = [
            [c for g in choice for c in g]
            for choice in itertools.product(*(itertools.permutations(g) for g in groups))
        ]
    best: Optional[tuple[str, Proc]] = None
    for order in candidates:
        q = _arrange(calc, rs, order)
        k = show(debruijn(q))
        if best is None or k < best[0]:
            best = (k, q)
    return best[1]


def _arrange(calc: str, rs: list[_Res], cs: list[Proc]) -> Proc:
    body = par_of(calc, cs)
    occ = _occurrences(body)
    pos = {n: i for i, n in enumerate(occ)}

    def first(r: _Res) -> float:
        return min((pos[n] for n in r.names if n in pos), default=math.inf)

    oriented = []
    for r in rs:
        if calc == "s":
            a, b = r.names
            if pos.get(b, math.inf) < pos.get(a, math.inf):
                ann = None if r.annot is None else (r.annot[1], r.annot[0])
                r = _Res((b, a), ann)
        oriented.append(r)
    oriented.sort(key=first)
    return _build(calc, oriented, cs)


def canonical(p: Proc, collect: Optional[bool] = None) -> Proc:
    """Canonical representative of the structural congruence class of ``p``.

    Parallel composition is flattened, 0 components dropped, unused
    restrictions collected, scopes maximally extruded, and components put
    in a deterministic order (also inside prefixes).

    By default pi-DILL keeps an unused restriction unless nothing is left
    under it.  Collecting it is sound for the congruence but can turn a
    cut into a bare parallel composition, which the logic cannot type, so
    reducts keep the restriction their rule created."""
    if collect is None:
        collect = calculus_of(p) != "dill"
    return _canon(normalize(p), collect)


def canonical_key(p: Proc, annotations: bool = False, collect: Optional[bool] = None) -> str:
    if not annotations:
        p = strip_annotations(p)
    return show(debruijn(canonical(p, collect)))


def congruent(p: Proc, q: Proc) -> bool:
    return canonical_key(p, collect=True) == canonical_key(q, collect=True)


def congruent_s(p: Proc, q: Proc) -> bool:
    return congruent(p, q)


# --------------------------------------------------------------------------
# pi-S reduction


def _restrict(calc: str, rs: list[_Res], cs: list[Proc]) -> Proc:
    return canonical(_build(calc, rs, cs))


def _after_lin(t):
    return t.cont if isinstance(t, SLin) else t


def successors_s(p: Proc) -> list[tuple[str, Proc]]:
    """One-step reducts of ``p`` with their rule tags, in redex order."""
    c = canonical(p)
    rs, cs = _flatten(c)
    out: list[tuple[str, Proc]] = []
    seen: set[str] = set()
    for ri, r in enumerate(rs):
        a, b = r.names
        for i, o in enumerate(cs):
            if not isinstance(o, SOut) or o.subject not in (a, b):
                continue
            other = b if o.subject == a else a
            for j, inp in enumerate(cs):
                if j == i or not isinstance(inp, SIn) or inp.subject != other:
                    continue
                rest = [x for k, x in enumerate(cs) if k not in (i, j)]
                got = rename(inp.body, {inp.binder: o.value})
                if inp.qual == "un":
                    rule, new = "R-UnCom", [o.cont, got, inp]
                    r2 = r
                else:
                    rule, new = "R-LinCom", [o.cont, got]
                    r2 = r if r.annot is None else _Res(r.names, tuple(_after_lin(t) for t in r.annot))
                rs2 = rs[:ri] + [r2] + rs[ri + 1:]
                q = _restrict("s", rs2, new + rest)
                k = canonical_key(q, annotations=True)
                if k not in seen:
                    seen.add(k)
                    out.append((rule, q))
    return out


def reduce_s(p: Proc) -> set:
    return {q for _, q in successors_s(p)}


# --------------------------------------------------------------------------
# pi-W labelled transitions


@dataclass(frozen=True)
class Tau:
    def __str__(self) -> str:
        return "tau"


@dataclass(frozen=True)
class In:
    subject: Name
    values: tuple

    def __str__(self) -> str:
        return f"{self.subject}({self.values[0]},{self.values[1]})"


@dataclass(frozen=True)
class Out:
    subject: Name
    values: tuple

    def __str__(self) -> str:
        return f"{self.subject}!({self.values[0]},{self.values[1]})"


@dataclass(frozen=True)
class BoundOut:
    subject: Name
    values: tuple
    extruded: frozenset
    annots: tuple = ()  # (name, annotation) of the extruded restrictions

    def __str__(self) -> str:
        ex = " ".join(str(n) for n in sorted(self.extruded))
        return f"(new {ex}){self.subject}!({self.values[0]},{self.values[1]})"


WLabel = Union[Tau, In, Out, BoundOut]


def _outputs(p: Proc) -> list[tuple]:
    match p:
        case WOut(x, a, b, c):
            return [(Out(x, (a, b)), c)]
        case WPar(l, r):
            return ([(lab, WPar(q, r)) for lab, q in _outputs(l)]
                    + [(lab, WPar(l, q)) for lab, q in _outputs(r)])
        case WRes(z, body, annot):
            out = []
            for lab, q in _outputs(body):
                if z == lab.subject:
                    continue
                if z in lab.values:
                    ex = lab.extruded if isinstance(lab, BoundOut) else frozenset()
                    an = lab.annots if isinstance(lab, BoundOut) else ()
                    out.append((BoundOut(lab.subject, lab.values, ex | {z}, ((z, annot),) + an), q))
                else:
                    out.append((lab, WRes(z, q, annot)))
            return out
    return []


def _inputs(p: Proc, x: Name, vals: tuple) -> list[Proc]:
    match p:
        case WIn(s, b1, b2, body) if s == x:
            return [rename(body, {b1: vals[0], b2: vals[1]})]
        case WServer(s, b1, b2, body) if s == x:
            return [WPar(p, rename(body, {b1: vals[0], b2: vals[1]}))]
        case WPar(l, r):
            return [WPar(q, r) for q in _inputs(l, x, vals)] + [WPar(l, q) for q in _inputs(r, x, vals)]
        case WRes(z, body, annot):
            if z == x:
                return []
            if z in vals:
                nz = Supply(all_names(p) | set(vals))(z.base)
                body, z = rename(body, {z: nz}), nz
            return [WRes(z, q, annot) for q in _inputs(body, x, vals)]
    return []


def _close(lab: BoundOut, q: Proc) -> Proc:
    for z, annot in reversed(lab.annots):
        q = WRes(z, q, annot)
    return q


def _taus(p: Proc) -> list[Proc]:
    match p:
        case WPar(l, r):
            out = [WPar(q, r) for q in _taus(l)] + [WPar(l, q) for q in _taus(r)]
            for lab, l2 in _outputs(l):
                for r2 in _inputs(r, lab.subject, lab.values):
                    out.append(_close(lab, WPar(l2, r2)) if isinstance(lab, BoundOut) else WPar(l2, r2))
            for lab, r2 in _outputs(r):
                for l2 in _inputs(l, lab.subject, lab.values):
                    out.append(_close(lab, WPar(l2, r2)) if isinstance(lab, BoundOut) else WPar(l2, r2))
            return out
        case WRes(z, body, annot):
            return [WRes(z, q, annot) for q in _taus(body)]
    return []


def tau_successors(p: Proc) -> list[Proc]:
    """Internal steps of ``p`` in structural order."""
    return [normalize(q) for q in _taus(normalize(p))]


def lts_w(p: Proc, inputs: Optional[list] = None) -> set:
    """Transitions ``(label, successor)`` of a pi-W process.

    Output and internal transitions are always listed; input transitions
    only for the value pairs given in ``inputs``."""
    p = normalize(p)
    out = {(Tau(), q) for q in tau_successors(p)}
    for lab, q in _outputs(p):
        out.add((lab, normalize(q)))
    for vals in inputs or ():
        vals = tuple(vals)
        for x in sorted(free_names(p)):
            for q in _inputs(p, x, vals):
                out.add((In(x, vals), normalize(q)))
    return out


# --------------------------------------------------------------------------
# pi-DILL reduction


def _payload_split(a):
    """Annotations after a communication: (sent name, continuation)."""
    match a:
        case Tensor(x, y) | Lolli(x, y):
            return x, y
        case Bang(x):
            return x, a
    return None, None


def successors_dill(p: Proc) -> list[tuple[str, Proc]]:
    c = canonical(p)
    rs, cs = _flatten(c)
    out: list[tuple[str, Proc]] = []
    seen: set[str] = set()

    def emit(rule: str, rs2, cs2) -> None:
        q = _restrict("dill", rs2, cs2)
        k = canonical_key(q, annotations=True)
        if k not in seen:
            seen.add(k)
            out.append((rule, q))

    for ri, r in enumerate(rs):
        (x,) = r.names
        others = rs[:ri] + rs[ri + 1:]
        for i, f in enumerate(cs):
            if isinstance(f, DFwd) and x in (f.a, f.b) and f.a != f.b:
                y = f.b if f.a == x else f.a
                rest = [rename(q, {x: y}) for k, q in enumerate(cs) if k != i]
                emit("R<->", others, rest)
        for i, o in enumerate(cs):
            if not isinstance(o, (DBOut, DSelL, DSelR)) or o.subject != x:
                continue
            for j, q in enumerate(cs):
                if j == i or getattr(q, "subject", None) != x:
                    continue
                rest = [t for k, t in enumerate(cs) if k not in (i, j)]
                if isinstance(o, DBOut) and isinstance(q, (DIn, DServer)):
                    sent, cont = _payload_split(r.annot)
                    if isinstance(q, DServer) and not isinstance(r.annot, Bang):
                        sent = r.annot  # replicated cut: the annotation is the server's body type
                    got = rename(q.body, {q.binder: o.binder})
                    new = _Res((o.binder,), sent)
                    if isinstance(q, DServer):
                        emit("R!", rs[:ri] + [r, new] + rs[ri + 1:], [o.cont, got, q] + rest)
                    else:
                        upd = _Res(r.names, cont)
                        emit("RC", rs[:ri] + [upd, new] + rs[ri + 1:], [o.cont, got] + rest)
                elif isinstance(o, (DSelL, DSelR)) and isinstance(q, DCase):
                    left = isinstance(o, DSelL)
                    ann = r.annot
                    if isinstance(ann, (With, Plus)):
                        ann = ann.left if left else ann.right
                    upd = _Res(r.names, ann)
                    emit("RL" if left else "RR", rs[:ri] + [upd] + rs[ri + 1:],
                         [o.cont, q.left if left else q.right] + rest)
    return out


def reduce_dill(p: Proc) -> set:
    return {q for _, q in successors_dill(p)}


# --------------------------------------------------------------------------
# Bounded execution


@dataclass
class Trace:
    steps: list = field(default_factory=list)  # (rule tag, successor)
    verdict: str = "NormalForm"  # or "BudgetExhausted"

    @property
    def final(self) -> Optional[Proc]:
        return self.steps[-1][1] if self.steps else None

    def render(self) -> str:
        lines = [f"#{k} [{rule}] {show(q)}" for k, (rule, q) in enumerate(self.steps, 1)]
        lines.append(f"{self.verdict} after {len(self.steps)} steps")
        return "\n".join(lines)


def successors(p: Proc, calculus: Optional[str] = None) -> list[tuple[str, Proc]]:
    calc = calculus or calculus_of(p)
    if calc == "s":
        return successors_s(p)
    if calc == "w":
        return [("Tau", q) for q in tau_successors(p)]
    return successors_dill(p)


def run_bounded(p: Proc, calculus: Optional[str] = None, budget: int = 10000) -> Trace:
    """Follow the first successor until a normal form or ``budget`` steps."""
    if budget < 1:
        raise ValueError("budget must be positive")
    tr = Trace()
    cur = p
    while True:
        nxt = successors(cur, calculus)
        if not nxt:
            tr.verdict = "NormalForm"
            return tr
        if len(tr.steps) == budget:
            tr.verdict = "BudgetExhausted"
            return tr
        tr.steps.append(nxt[0])
        cur = nxt[0][1]
