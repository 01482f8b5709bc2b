"""Translation of session-typed pi-S into pi-DILL.

Server and client behaviour of a session type steers the translation:
``srv_pred`` looks at the tail of a protocol, ``cli_pred`` at its head.
The process translation follows the typing derivation and, when a root
name is supplied, also tags every node with the judgment-table row that
applies and checks that row's side conditions.  Whether the translated
judgment holds is decided by ``check_dill``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .dill import DDerivation, DJudgment, check_dill
from .errors import (
    CalcError, MixedServerClient, NoClauseApplies, NotInL, NotInS,
    RowConditionViolation, SideConditionViolation,
)
from .names import Name, Supply
from .session import SDerivation, check_s, dual_s, un_pred
from .syntax import (
    Bang, DBOut, DCase, DFwd, DIn, DNil, DPar, DRes, DSelL, DSelR, DServer,
    Lolli, One, Plus, SClient, SEnd, SIn, SLin, SNil, SOut, SPar, SRes,
    SServer, Tensor, With, all_names, free_names, normalize, rename,
)


def srv_pred(t) -> bool:
    match t:
        case SServer():
            return True
        case SEnd():
            return False
        case SLin(_, _, c):
            return srv_pred(c)
        case SClient(p):
            return srv_pred(p)
    raise TypeError(t)


def cli_pred(t) -> bool:
    match t:
        case SClient():
            return True
        case SEnd():
            return False
        case SLin(_, _, c):
            return cli_pred(c)
        case SServer(p):
            return cli_pred(p)
    raise TypeError(t)


def strip_bang(a):
    """Remove one top-level exponential."""
    return a.inner if isinstance(a, Bang) else a


def _flags(t, what: str) -> tuple[bool, bool]:
    s, c = srv_pred(t), cli_pred(t)
    if s and c:
        from .printer import show_stype
        raise MixedServerClient(f"{what} {show_stype(t)} has both server and client behaviour")
    return s, c


def translate_type_s2dill(t):
    """Proposition for a session type.

    A protocol that stops after further steps, or in the second summand of a
    server or client, stops with 1: only a transmitted ``end`` value is
    exponential, so that a branch that just stops can provide its tail."""
    match t:
        case SEnd():
            return Bang(One())
        case SLin("!", p, c):
            return Lolli(translate_type_s2dill(p), _tail(c))
        case SLin("?", p, c):
            return Tensor(translate_type_s2dill(p), _tail(c))
        case SServer(p):
            s, c = _flags(p, "server payload")
            tp = translate_type_s2dill(p)
            if s:
                return Bang(tp)
            if c:
                return Bang(Tensor(tp, One()))
            return Bang(Plus(Tensor(tp, One()), _tail(p)))
        case SClient(p):
            s, c = _flags(p, "client payload")
            tp = translate_type_s2dill(p)
            if s:
                return Bang(translate_type_s2dill(dual_s(p)))
            if c:
                return Bang(Lolli(tp, One()))
            return Bang(With(Lolli(tp, One()), _tail(dual_s(p))))
    raise TypeError(t)


def _tail(t):
    return One() if isinstance(t, SEnd) else translate_type_s2dill(t)


def repl_forward(v: Name, w: Name, supply: Supply):
    """``[v -> w]!``: a server on ``w`` that forwards each request to a fresh
    copy of the unrestricted ``v``."""
    k, k2 = supply("k"), supply("k")
    return DServer(w, k, DBOut(v, k2, DFwd(k2, k)))


class _Translator:
    """Derivation-driven translation.  ``root`` is ``None`` when only the
    process is wanted; otherwise rows are recorded and checked."""

    def __init__(self, supply: Supply, judged: bool):
        self.supply = supply.plain
        self.judged = judged
        self.rows: list[str] = []

    def row(self, tag: str, ok: bool = True, why: str = "") -> None:
        if self.judged:
            if not ok:
                raise RowConditionViolation(f"row {tag.split('.')[0]}: {why}", row=tag)
            self.rows.append(tag)

    def go(self, d: SDerivation, u: Optional[Name]):
        p = d.term
        prem = [q for q in d.premises if q.rule != "Var"]
        match p:
            case SNil():
                self.row("1")
                return DNil()
            case SPar(l, r):
                self.row("2", u not in free_names(l), f"root {u} is free in the left component")
                w = self.supply("w")
                return DRes(w, One(), DPar(self.go(prem[0], w), self.go(prem[1], u)))
            case SRes():
                return self.restriction(d, u)
            case SIn("lin", x, y, _):
                if not isinstance(d.subject_type, SLin):
                    raise NoClauseApplies(f"linear input on {x} needs a linear receive type", name=x)
                self.row("5" if u == x else "5.other")
                return DIn(x, y, self.go(prem[0], u))
            case SIn("un", x, y, body):
                return self.server(d, u, prem[0])
            case SOut():
                return self.free_output(d, u, prem[0])
        raise NoClauseApplies(f"no clause for {type(p).__name__}")

    def server(self, d: SDerivation, u, body_d: SDerivation):
        p = d.term
        x, y = p.subject, p.binder
        t = d.subject_type.payload
        s, c = _flags(t, f"payload of server {x}")
        ok = u == x and x not in free_names(p.body)
        self.row("4", ok, f"a server on {x} must provide the root and not call itself")
        w = self.supply("w")
        if s:
            return DServer(x, w, rename(self.go(body_d, y), {y: w}))
        if c:
            return DServer(x, w, DIn(w, y, self.go(body_d, w)))
        left = DIn(w, y, self.go(body_d, w))
        right = rename(self.go(body_d, y), {y: w})
        return DServer(x, w, DCase(w, left, right))

    def forwarder(self, v: Name, w: Name, payload):
        return repl_forward(v, w, self.supply) if un_pred(payload) else DFwd(v, w)

    def free_output(self, d: SDerivation, u, cont_d: SDerivation):
        p = d.term
        x, v = p.subject, p.value
        st = d.subject_type
        t = st.payload
        if srv_pred(t):
            raise SideConditionViolation(f"value {v} sent on {x} has server behaviour", name=v)
        if isinstance(st, SLin):
            self.row("9" if un_pred(t) else "8")
            y = self.supply("y")
            return DBOut(x, y, DPar(self.forwarder(v, y, t), self.go(cont_d, u)))
        _, c = _flags(t, f"payload of client {x}")
        self.row("11" if un_pred(t) else "10")
        z, w = self.supply("z"), self.supply("w")
        inner = DBOut(z, w, DPar(self.forwarder(v, w, t), self.go(cont_d, u)))
        return DBOut(x, z, inner if c else DSelL(z, inner))

    def restriction(self, d: SDerivation, u):
        p = d.term
        a, b, body = p.a, p.b, p.body
        types = {a: p.types[0], b: p.types[1]}
        inner = [q for q in d.premises if q.rule != "Var"][0]
        match body:
            case SPar(l, r):
                fl, fr = free_names(l), free_names(r)
                if b not in fl and a not in fr:
                    z, v = a, b
                elif a not in fl and b not in fr:
                    z, v = b, a
                else:
                    raise SideConditionViolation(
                        f"endpoints {a}, {b} are not separated by the composition", name=a)
                tz = types[z]
                ok = u not in fl
                self.row("3", ok, f"root {u} is free in the component providing {z}")
                annot = translate_type_s2dill(dual_s(tz))
                pd, qd = [q for q in inner.premises if q.rule != "Var"]
                left = self.go(pd, z)
                right = rename(self.go(qd, u), {v: z})
                return DRes(z, annot, DPar(left, right))
            case SOut(zs, sent, cont) if sent in (a, b):
                kept = b if sent == a else a
                st = inner.subject_type
                cont_d = [q for q in inner.premises if q.rule != "Var"][0]
                t = st.payload
                if isinstance(st, SClient):
                    s, c = _flags(t, f"payload of client {zs}")
                    if c:
                        raise SideConditionViolation(
                            f"endpoint {sent} sent on {zs} has client behaviour", name=sent)
                    ok = not un_pred(t) or sent not in free_names(cont)
                    self.row("6", ok, f"unrestricted {sent} is still used after being sent")
                    k = self.go(cont_d, u)
                    return DBOut(zs, kept, k if s else DSelR(kept, k))
                if not isinstance(cont, SPar):
                    raise NoClauseApplies(
                        f"bound output on {zs} must continue with a parallel composition", name=zs)
                lp, lq = cont.left, cont.right
                if zs in free_names(lp) or kept in free_names(lq):
                    raise SideConditionViolation(
                        f"bound output on {zs}: {zs} free in the first or {kept} free in the second component",
                        name=zs)
                ok = u not in free_names(lp) and (
                    not un_pred(t) or sent not in free_names(lp) | free_names(lq))
                self.row("7" if u == zs else "7.other", ok,
                         f"root {u} or the sent endpoint {sent} occurs where it may not")
                pd, qd = [q for q in cont_d.premises if q.rule != "Var"]
                return DBOut(zs, kept, DPar(self.go(pd, kept), self.go(qd, u)))
        raise NoClauseApplies(f"restriction of {a}, {b} does not enclose a composition or bound output",
                              name=a)


def _supply(d: SDerivation) -> Supply:
    return Supply(all_names(d.term) | set(d.ctx))


def translate_proc_s2dill(p, typing: SDerivation):
    """Translate ``p`` following its typing derivation."""
    if typing.term != p:
        raise NoClauseApplies("the derivation does not type this process")
    return _Translator(_supply(typing), judged=False).go(typing, None)


@dataclass
class LJudgment:
    judgment: DJudgment
    process: object
    rows: list = field(default_factory=list)


def translate_ctx_s2dill(g: dict, u: Optional[Name] = None) -> tuple[dict, dict]:
    """Unrestricted and linear zones for a session context, leaving out ``u``."""
    gamma, delta = {}, {}
    for x, t in g.items():
        if x == u:
            continue
        if un_pred(t):
            gamma[x] = strip_bang(translate_type_s2dill(t))
        else:
            delta[x] = translate_type_s2dill(t)
    return gamma, delta


def translate_judgment_s2dill(d: SDerivation, u: Name) -> LJudgment:
    """Translated judgment with root ``u``: offered type is the dual of
    ``u``'s protocol when ``u`` is in the context and 1 otherwise."""
    gamma, delta = translate_ctx_s2dill(d.ctx, u)
    offered = translate_type_s2dill(dual_s(d.ctx[u])) if u in d.ctx else One()
    supply = _supply(d)
    supply.reserve([u])
    tr = _Translator(supply, judged=True)
    proc = tr.go(d, u)
    return LJudgment(DJudgment(gamma, delta, u, offered), proc, tr.rows)


@dataclass
class LVerdict:
    accepted: bool
    root: Optional[Name] = None
    judgment: Optional[LJudgment] = None
    derivation: Optional[DDerivation] = None
    failures: list = field(default_factory=list)  # (root, CalcError)
    reason: Optional[CalcError] = None

    @property
    def offered(self):
        return self.judgment.judgment.offered if self.judgment else None


def candidate_roots(d: SDerivation) -> list[Name]:
    return list(d.ctx) + [_supply(d).plain("u")]


def in_L(g: dict, p, root: Optional[Name] = None) -> LVerdict:
    """Membership in the class whose translations are pi-DILL typable."""
    p = normalize(p, avoid=g)
    try:
        d = check_s(g, p)
    except CalcError as err:
        return LVerdict(False, reason=NotInS(str(err)))
    failures = []
    for u in [root] if root is not None else candidate_roots(d):
        try:
            j = translate_judgment_s2dill(d, u)
            der = check_dill(j.judgment, j.process)
            return LVerdict(True, u, j, der, failures)
        except CalcError as err:
            failures.append((u, err))
    msg = "; ".join(f"{u}: {e}" for u, e in failures)
    return LVerdict(False, failures=failures, reason=NotInL(f"no root works ({msg})"))


__all__ = [
    "srv_pred", "cli_pred", "strip_bang", "translate_type_s2dill",
    "translate_proc_s2dill", "translate_judgment_s2dill", "translate_ctx_s2dill",
    "in_L", "LJudgment", "LVerdict", "repl_forward", "candidate_roots",
]
