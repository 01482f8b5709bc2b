"""Session typing for pi-S: duality, qualifiers, context split and an
algorithmic checker that threads the linear context through the term."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from .errors import (
    DualityViolation, LeftoverLinear, PayloadMismatch, QualifierMismatch,
    UnknownName,
)
from .names import Name
from .syntax import SClient, SEnd, SIn, SLin, SNil, SOut, SPar, SRes, SServer, Proc

SCtx = dict  # Name -> SType, insertion-ordered


def dual_s(t):
    match t:
        case SEnd():
            return t
        case SLin("!", p, c):
            return SLin("?", p, dual_s(c))
        case SLin("?", p, c):
            return SLin("!", p, dual_s(c))
        case SServer(p):
            return SClient(p)
        case SClient(p):
            return SServer(p)
    raise TypeError(t)


def un_pred(t) -> bool:
    return isinstance(t, (SEnd, SServer, SClient))


def lin_pred(t) -> bool:
    return True


def ctx_un(g: SCtx) -> bool:
    return all(un_pred(t) for t in g.values())


def split_s(g: SCtx) -> Iterator[tuple[SCtx, SCtx]]:
    """All (g1, g2) with g1 o g2 = g: un entries on both sides, each lin
    entry on exactly one side."""
    items = list(g.items())

    def go(i: int):
        if i == len(items):
            yield {}, {}
            return
        x, t = items[i]
        for l, r in go(i + 1):
            if un_pred(t):
                yield {x: t, **l}, {x: t, **r}
            else:
                yield {x: t, **l}, dict(r)
                yield dict(l), {x: t, **r}

    for l, r in go(0):
        yield dict(sorted(l.items(), key=lambda kv: items.index((kv[0], g[kv[0]])))), \
              dict(sorted(r.items(), key=lambda kv: items.index((kv[0], g[kv[0]]))))


def update(g: SCtx, x: Name, t) -> SCtx:
    """Context update ``g + x:t``."""
    if x not in g:
        return {**g, x: t}
    if g[x] == t and un_pred(t):
        return g
    raise QualifierMismatch(f"cannot update {x}: already typed {g[x]}", name=x)


@dataclass
class SDerivation:
    """A node of a pi-S typing derivation.

    ``term`` is the process typed at this node, or for ``Var`` leaves the
    pair (name, type).  ``ctx`` is the declarative context of the node."""

    rule: str
    ctx: SCtx
    term: Union[Proc, tuple]
    premises: list = field(default_factory=list)
    subject_type: object = None  # type of the acting subject (prefix rules)

    def rules(self) -> list[str]:
        out = [self.rule]
        for p in self.premises:
            out += p.rules()
        return out

    def shape(self):
        """Rule skeleton without Var leaves, as nested tuples."""
        kids = tuple(p.shape() for p in self.premises if p.rule != "Var")
        return (self.rule,) + kids

    def render(self, indent: int = 0) -> str:
        from .printer import show, show_stype
        pad = "  " * indent
        g = ", ".join(f"{x}:{show_stype(t)}" for x, t in self.ctx.items())
        if self.rule == "Var":
            x, t = self.term
            head = f"{pad}[Var] {g} |- {x} : {show_stype(t)}"
        else:
            head = f"{pad}[{self.rule}] {g} |- {show(self.term)}"
        return "\n".join([head] + [p.render(indent + 1) for p in self.premises])


class _Checker:
    """Leftover-threading checker.  ``check(g, p)`` returns the derivation
    and the part of ``g`` that ``p`` did not consume (un entries are never
    consumed)."""

    def var(self, g: SCtx, x: Name) -> SDerivation:
        return SDerivation("Var", {k: t for k, t in g.items() if un_pred(t) or k == x}, (x, g[x]))

    def lookup(self, g: SCtx, x: Name):
        if x not in g:
            raise UnknownName(f"{x} is not in the typing context", name=x)
        return g[x]

    def check(self, g: SCtx, p: Proc) -> tuple[SDerivation, SCtx]:
        match p:
            case SNil():
                return SDerivation("Nil", _un(g), p), g
            case SPar(l, r):
                d1, rest = self.check(g, l)
                d2, rest2 = self.check(rest, r)
                return self._node("Par", g, rest2, p, [d1, d2]), rest2
            case SRes(a, b, body, types):
                if types is None:
                    raise UnknownName(f"restriction {a} {b} carries no type annotation", name=a)
                ta, tb = types
                if dual_s(ta) != tb:
                    raise DualityViolation(f"endpoints {a} and {b} are not dual", name=a)
                inner = update(update(g, a, ta), b, tb)
                d, rest = self.check(inner, body)
                rest = self._close(rest, [a, b])
                return self._node("Res", g, rest, p, [d]), rest
            case SOut(x, v, cont):
                return self.output(g, p)
            case SIn():
                return self.input(g, p)
        raise TypeError(p)

    def _node(self, rule, g, rest, p, prem, st=None) -> SDerivation:
        used = {k: t for k, t in g.items() if un_pred(t) or k not in rest}
        return SDerivation(rule, used, p, prem, st)

    def _close(self, rest: SCtx, names) -> SCtx:
        """Drop local names from a leftover; a linear one is an error."""
        for n in names:
            if n in rest:
                if not un_pred(rest[n]):
                    raise LeftoverLinear(f"linear {n} is not used up", name=n)
        return {k: t for k, t in rest.items() if k not in names}

    def output(self, g: SCtx, p: SOut):
        x, v, cont = p.subject, p.value, p.cont
        tx = self.lookup(g, x)
        if isinstance(tx, SLin) and tx.dir == "!":
            g1 = {k: t for k, t in g.items() if k != x}
            dx = self.var(g, x)
            tv = self.lookup(g1, v)
            if tv != tx.payload:
                raise PayloadMismatch(f"{v} has type {_s(tv)}, expected {_s(tx.payload)}", name=v)
            dv = self.var(g1, v)
            g2 = g1 if un_pred(tv) else {k: t for k, t in g1.items() if k != v}
            dp, rest = self.check(update(g2, x, tx.cont), cont)
            rest = self._close(rest, [x])
            return self._node("Lin-Out", g, rest, p, [dx, dv, dp], tx), rest
        if isinstance(tx, SClient):
            dx = self.var(g, x)
            tv = self.lookup(g, v)
            if tv != tx.payload:
                raise PayloadMismatch(f"{v} has type {_s(tv)}, expected {_s(tx.payload)}", name=v)
            dv = self.var(g, v)
            g2 = g if un_pred(tv) else {k: t for k, t in g.items() if k != v}
            dp, rest = self.check(g2, cont)
            return self._node("Un-Out", g, rest, p, [dx, dv, dp], tx), rest
        raise QualifierMismatch(f"output on {x} of type {_s(tx)}", name=x)

    def input(self, g: SCtx, p: SIn):
        x, y, body = p.subject, p.binder, p.body
        tx = self.lookup(g, x)
        if p.qual == "lin":
            if isinstance(tx, SLin) and tx.dir == "?":
                dx = self.var(g, x)
                g1 = {k: t for k, t in g.items() if k != x}
                inner = update(update(g1, x, tx.cont), y, tx.payload)
                dp, rest = self.check(inner, body)
                rest = self._close(rest, [x, y])
                return self._node("Lin-In1", g, rest, p, [dx, dp], tx), rest
            if isinstance(tx, SServer):
                dx = self.var(g, x)
                dp, rest = self.check(update(g, y, tx.payload), body)
                rest = self._close(rest, [y])
                return self._node("Lin-In2", g, rest, p, [dx, dp], tx), rest
            raise QualifierMismatch(f"lin input on {x} of type {_s(tx)}", name=x)
        if not isinstance(tx, SServer):
            raise QualifierMismatch(f"un input on {x} requires a server type, found {_s(tx)}", name=x)
        ug = _un(g)
        dx = self.var(ug, x)
        dp, rest = self.check(update(ug, y, tx.payload), body)
        self._close(rest, [y])
        for k, t in rest.items():
            if not un_pred(t):
                raise LeftoverLinear(f"linear {k} is not used up", name=k)
        return SDerivation("Un-In", ug, p, [dx, dp], tx), g


def _un(g: SCtx) -> SCtx:
    return {k: t for k, t in g.items() if un_pred(t)}


def _s(t) -> str:
    from .printer import show_stype
    return show_stype(t)


def check_s(g: SCtx, p: Proc) -> SDerivation:
    """Derive ``g |-s p`` or raise the first typing error."""
    d, rest = _Checker().check(dict(g), p)
    for k, t in rest.items():
        if not un_pred(t):
            raise LeftoverLinear(f"linear {k} is not used up", name=k)
    return d


def typable_s(g: SCtx, p: Proc) -> bool:
    try:
        check_s(g, p)
        return True
    except Exception as e:  # noqa: BLE001 - any typing error means rejection
        if isinstance(e, TypeError):
            raise
        return False


def verify_s(d: SDerivation) -> bool:
    """Re-check that every node instantiates its rule schema."""
    p = d.term
    g = d.ctx
    match d.rule:
        case "Var":
            x, t = p
            return g.get(x) == t and all(un_pred(u) for k, u in g.items() if k != x)
        case "Nil":
            return isinstance(p, SNil) and ctx_un(g)
        case "Par":
            a, b = d.premises
            return isinstance(p, SPar) and _joins(g, a.ctx, b.ctx) and verify_s(a) and verify_s(b)
        case "Res":
            (q,) = d.premises
            ta, tb = p.types
            return dual_s(ta) == tb and q.ctx == {**g, p.a: ta, p.b: tb} and verify_s(q)
    return all(verify_s(q) for q in d.premises)


def _joins(g: SCtx, g1: SCtx, g2: SCtx) -> bool:
    if set(g) != set(g1) | set(g2):
        return False
    for k, t in g.items():
        in1, in2 = k in g1, k in g2
        if un_pred(t):
            if not (in1 and in2):
                return False
        elif in1 == in2:
            return False
    return True
