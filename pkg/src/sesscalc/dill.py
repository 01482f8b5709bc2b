"""Two-zone typing for pi-DILL: ``G ; D |- P :: z : C``.

The checker is driven by the process syntax.  Restrictions must be of the
form ``new x : A. (P | Q)`` with ``P`` providing ``x``; a server on ``x``
under a non-exponential annotation is read as the replicated cut.  Bang
assumptions are moved to the unrestricted zone as soon as they appear and
unused assumptions of type 1 are discharged silently.

``check_dill_modulo`` accepts any process structurally congruent to a
checkable one by searching over the ways of arranging its parallel
components and restrictions into a tree of cuts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional

from networkx.utils import UnionFind

from .errors import (
    CalcError, LinearLeftover, MissingCutAnnotation, RuleMismatch,
    SplitFailure, UnknownName, ZoneViolation,
)
from .names import Name
from .syntax import (
    Bang, DBOut, DCase, DFwd, DIn, DNil, DPar, DRes, DSelL, DSelR, DServer,
    Lolli, One, Plus, Proc, Tensor, With, free_names, par_of,
)


@dataclass
class DJudgment:
    unrestricted: dict  # Name -> DType
    linear: dict  # Name -> DType
    subject: Name
    offered: object

    def render(self) -> str:
        from .printer import show_dtype
        g = ", ".join(f"{x}:{show_dtype(t)}" for x, t in self.unrestricted.items()) or "."
        d = ", ".join(f"{x}:{show_dtype(t)}" for x, t in self.linear.items()) or "."
        return f"{g} ; {d} |- {self.subject} : {show_dtype(self.offered)}"


@dataclass
class DDerivation:
    rule: str
    judgment: DJudgment
    process: Proc
    premises: list = field(default_factory=list)

    def rules(self) -> list[str]:
        out = [self.rule]
        for p in self.premises:
            out += p.rules()
        return out

    def shape(self):
        return (self.rule,) + tuple(p.shape() for p in self.premises)

    def render(self, indent: int = 0) -> str:
        from .printer import show
        pad = "  " * indent
        j = self.judgment
        from .printer import show_dtype
        g = ", ".join(f"{x}:{show_dtype(t)}" for x, t in j.unrestricted.items()) or "."
        d = ", ".join(f"{x}:{show_dtype(t)}" for x, t in j.linear.items()) or "."
        head = f"{pad}[{self.rule}] {g} ; {d} |- {show(self.process)} :: {j.subject} : {show_dtype(j.offered)}"
        return "\n".join([head] + [p.render(indent + 1) for p in self.premises])


def _t(a) -> str:
    from .printer import show_dtype
    return show_dtype(a)


def _flat(p: Proc) -> tuple[list, list]:
    if isinstance(p, DPar):
        r1, c1 = _flat(p.left)
        r2, c2 = _flat(p.right)
        return r1 + r2, c1 + c2
    if isinstance(p, DRes):
        rs, cs = _flat(p.body)
        return [(p.name, p.annot)] + rs, cs
    if isinstance(p, DNil):
        return [], []
    return [], [p]


def _rebuild(rs: list, cs: list) -> Proc:
    out = par_of("dill", cs)
    for x, a in reversed(rs):
        out = DRes(x, a, out)
    return out


class _Checker:
    def __init__(self, modulo: bool):
        self.modulo = modulo

    # -- entry with the implicit structural steps
    def prove(self, g: dict, d: dict, p: Proc, z: Name, c) -> DDerivation:
        fn = free_names(p)
        d = {x: t for x, t in d.items() if not (isinstance(t, One) and x not in fn)}
        idle = [x for x, t in d.items() if isinstance(t, Bang) and x not in fn]
        if idle:
            return self.lift(g, d, idle, p, z, c, lambda g2, d2: self.prove(g2, d2, p, z, c))
        if z in g or z in d:
            raise ZoneViolation(f"offered name {z} also occurs among the assumptions", name=z)
        return self.rule(g, d, p, z, c)

    def lift(self, g: dict, d: dict, xs, p: Proc, z: Name, c, k) -> DDerivation:
        """Move the exponentials ``xs`` from the linear to the unrestricted
        zone, one !L node each, then continue with ``k(g, d)``."""
        xs = [x for x in xs if isinstance(d.get(x), Bang)]
        if not xs:
            return k(g, d)
        x = xs[0]
        g2 = {**g, x: d[x].inner}
        d2 = {y: t for y, t in d.items() if y != x}
        return self.node("!L", g, d, p, z, c, [self.lift(g2, d2, xs[1:], p, z, c, k)])

    def shared(self, d: dict, p: Proc, q: Proc) -> list:
        fp, fq = free_names(p), free_names(q)
        return [x for x, t in d.items() if isinstance(t, Bang) and x in fp and x in fq]

    def node(self, rule, g, d, p, z, c, prem) -> DDerivation:
        return DDerivation(rule, DJudgment(g, d, z, c), p, prem)

    def leftover(self, d: dict, allowed=()) -> None:
        for x, t in d.items():
            if x not in allowed and not isinstance(t, One):
                raise LinearLeftover(f"linear assumption {x} : {_t(t)} is not used", name=x)

    def split(self, d: dict, p: Proc, q: Proc) -> tuple[dict, dict]:
        fp, fq = free_names(p), free_names(q)
        d1, d2 = {}, {}
        for x, t in d.items():
            if x in fp and x in fq:
                raise SplitFailure(f"linear {x} is needed on both sides", name=x)
            if x in fp:
                d1[x] = t
            elif x in fq or not isinstance(t, One):
                d2[x] = t
        return d1, d2

    def pairs(self, body: Proc) -> Iterator[tuple[Proc, Proc]]:
        """Ways of reading ``body`` as a composition ``P | Q``."""
        if not self.modulo:
            if isinstance(body, DPar):
                yield body.left, body.right
            return
        rs, cs = _flat(body)
        for left, right in _partitions(rs, cs):
            yield left, right

    def linear_subject(self, g: dict, d: dict, x: Name, what: str):
        if x in d:
            return d[x]
        if x in g:
            raise ZoneViolation(f"{what} on {x}, which is an unrestricted assumption", name=x)
        raise UnknownName(f"{x} is not in the typing context", name=x)

    def first(self, attempts) -> DDerivation:
        """Run alternative proof attempts, returning the first success."""
        err: Optional[CalcError] = None
        for attempt in attempts:
            try:
                return attempt()
            except CalcError as e:
                err = e
        raise err if err is not None else RuleMismatch("no way to split the composition")

    def rule(self, g: dict, d: dict, p: Proc, z: Name, c) -> DDerivation:
        match p:
            case DNil():
                if not isinstance(c, One):
                    raise RuleMismatch(f"0 offers 1, not {_t(c)}")
                self.leftover(d)
                return self.node("1R", g, d, p, z, c, [])
            case DFwd(a, b):
                src = a if b == z else b if a == z else None
                if src is None:
                    raise RuleMismatch(f"forwarder does not mention the offered name {z}")
                t = self.linear_subject(g, d, src, "forwarding")
                if t != c:
                    raise RuleMismatch(f"forwarder links {_t(t)} to {_t(c)}")
                self.leftover(d, allowed=(src,))
                return self.node("fwd", g, d, p, z, c, [])
            case DIn(x, y, body):
                if x == z:
                    if not isinstance(c, Lolli):
                        raise RuleMismatch(f"input on offered {z} needs -o, found {_t(c)}")
                    return self.node("⊸R", g, d, p, z, c, [self.prove(g, {**d, y: c.arg}, body, x, c.res)])
                t = self.linear_subject(g, d, x, "input")
                if not isinstance(t, Tensor):
                    raise RuleMismatch(f"input on {x} needs *, found {_t(t)}")
                d2 = {k: v for k, v in d.items() if k != x}
                d2.update({y: t.arg, x: t.res})
                return self.node("⊗L", g, d, p, z, c, [self.prove(g, d2, body, z, c)])
            case DBOut(x, y, body):
                if x == z:
                    if not isinstance(c, Tensor):
                        raise RuleMismatch(f"output on offered {z} needs *, found {_t(c)}")
                    return self.binary("⊗R", g, d, p, body, (y, c.arg), (x, c.res), z, c, {})
                if isinstance(d.get(x), Bang):
                    return self.lift(g, d, [x], p, z, c, lambda g2, d2: self.rule(g2, d2, p, z, c))
                if x in g and x not in d:
                    prem = self.prove(g, {**d, y: g[x]}, body, z, c)
                    return self.node("copy", g, d, p, z, c, [prem])
                t = self.linear_subject(g, d, x, "output")
                if not isinstance(t, Lolli):
                    raise RuleMismatch(f"output on {x} needs -o, found {_t(t)}")
                d2 = {k: v for k, v in d.items() if k != x}
                return self.binary("⊸L", g, d2, p, body, (y, t.arg), (z, c), z, c, {x: t.res})
            case DServer(x, y, body):
                if x != z:
                    raise RuleMismatch(f"server on {x} is not on the offered name {z}")
                if not isinstance(c, Bang):
                    raise RuleMismatch(f"server on {z} needs an exponential, found {_t(c)}")
                if any(isinstance(t, Bang) for t in d.values()):
                    return self.lift(g, d, list(d), p, z, c, lambda g2, d2: self.rule(g2, d2, p, z, c))
                self.leftover(d)
                return self.node("!R", g, d, p, z, c, [self.prove(g, {}, body, y, c.inner)])
            case DSelL(x, body) | DSelR(x, body):
                left = isinstance(p, DSelL)
                if x == z:
                    if not isinstance(c, Plus):
                        raise RuleMismatch(f"selection on offered {z} needs (+), found {_t(c)}")
                    prem = self.prove(g, d, body, z, c.left if left else c.right)
                    return self.node("⊕R1" if left else "⊕R2", g, d, p, z, c, [prem])
                t = self.linear_subject(g, d, x, "selection")
                if not isinstance(t, With):
                    raise RuleMismatch(f"selection on {x} needs &, found {_t(t)}")
                prem = self.prove(g, {**d, x: t.left if left else t.right}, body, z, c)
                return self.node("&L1" if left else "&L2", g, d, p, z, c, [prem])
            case DCase(x, l, r):
                if x == z:
                    if not isinstance(c, With):
                        raise RuleMismatch(f"branching on offered {z} needs &, found {_t(c)}")
                    return self.node("&R", g, d, p, z, c,
                                     [self.prove(g, d, l, z, c.left), self.prove(g, d, r, z, c.right)])
                t = self.linear_subject(g, d, x, "branching")
                if not isinstance(t, Plus):
                    raise RuleMismatch(f"branching on {x} needs (+), found {_t(t)}")
                return self.node("⊕L", g, d, p, z, c,
                                 [self.prove(g, {**d, x: t.left}, l, z, c),
                                  self.prove(g, {**d, x: t.right}, r, z, c)])
            case DRes() | DPar():
                return self.cut(g, d, p, z, c)
        raise TypeError(p)

    def binary(self, rule, g, d, p, body, left, right, z, c, extra_right) -> DDerivation:
        (ly, la), (rz, rc) = left, right

        def attempt(pl: Proc, pr: Proc):
            def finish(g, d):
                d1, d2 = self.split(d, pl, pr)
                a = self.prove(g, d1, pl, ly, la)
                b = self.prove(g, {**d2, **extra_right}, pr, rz, rc)
                return self.node(rule, g, d, p, z, c, [a, b])
            return lambda: self.lift(g, d, self.shared(d, pl, pr), p, z, c, finish)

        opts = [attempt(pl, pr) for pl, pr in self.pairs(body)]
        if not opts:
            raise RuleMismatch(f"{rule} needs the continuation to be a parallel composition")
        return self.first(opts)

    def cut(self, g, d, p, z, c) -> DDerivation:
        if not self.modulo:
            if isinstance(p, DPar):
                raise RuleMismatch("parallel composition without a restriction is not typable")
            x, a, body = p.name, p.annot, p.body
            if not isinstance(body, DPar):
                raise RuleMismatch(f"restriction of {x} must enclose a parallel composition")
            return self.cut_on(g, d, p, x, a, body.left, body.right, z, c)
        rs, cs = _flat(p)
        if not rs:
            if len(cs) == 1:
                return self.prove(g, d, cs[0], z, c)
            if not cs:
                return self.prove(g, d, DNil(), z, c)
            raise RuleMismatch("parallel composition without a restriction is not typable")
        opts = []
        for i, (x, a) in enumerate(rs):
            others = rs[:i] + rs[i + 1:]
            if not any(x in free_names(q) for q in cs):
                # P == 0 | P: an unused restriction may be cut against 0
                right = _rebuild(others, cs)
                opts.append(lambda x=x, a=a, r=right: self.cut_on(g, d, p, x, a, DNil(), r, z, c))
            for left, right in _partitions(others, cs, pivot=x):
                if x not in free_names(left) and any(x in free_names(q) for q in cs):
                    continue
                opts.append(lambda x=x, a=a, l=left, r=right: self.cut_on(g, d, p, x, a, l, r, z, c))
        if not opts:
            raise RuleMismatch("no arrangement of the composition forms a cut")
        return self.first(opts)

    def cut_on(self, g, d, p, x, a, left, right, z, c) -> DDerivation:
        if a is None:
            raise MissingCutAnnotation(f"restriction of {x} has no type annotation", name=x)
        if isinstance(left, DServer) and left.subject == x and not isinstance(a, Bang):
            def replicated(g, d):
                d1, d2 = self.split(d, left, right)
                self.leftover(d1)
                prem1 = self.prove(g, {}, left.body, left.binder, a)
                prem2 = self.prove({**g, x: a}, d2, right, z, c)
                return self.node("cut!", g, d, p, z, c, [prem1, prem2])
            fl = free_names(left)
            return self.lift(g, d, [y for y in d if y in fl], p, z, c, replicated)

        def linear(g, d):
            d1, d2 = self.split(d, left, right)
            prem1 = self.prove(g, d1, left, x, a)
            prem2 = self.prove(g, {**d2, x: a}, right, z, c)
            return self.node("cut", g, d, p, z, c, [prem1, prem2])
        return self.lift(g, d, self.shared(d, left, right), p, z, c, linear)


def _partitions(rs: list, cs: list, pivot: Optional[Name] = None) -> Iterator[tuple[Proc, Proc]]:
    """Split components into two sides, the left one nonempty, without
    separating any restriction other than ``pivot`` from its users.
    Restrictions nobody uses stay on the right."""
    uf = UnionFind(range(len(cs)))
    owner: dict = {}
    for x, _ in rs:
        users = [i for i, q in enumerate(cs) if x in free_names(q)]
        for i in users[1:]:
            uf.union(users[0], i)
        owner[x] = users[0] if users else None
    groups: dict = {}
    for i in range(len(cs)):
        groups.setdefault(uf[i], []).append(i)
    keys = list(groups)
    for mask in itertools.product((0, 1), repeat=len(keys)):
        left = [i for k, m in zip(keys, mask) if m == 0 for i in groups[k]]
        right = [i for k, m in zip(keys, mask) if m == 1 for i in groups[k]]
        if not left:
            continue
        lset = set(left)
        rl = [(x, a) for x, a in rs if owner[x] is not None and uf[owner[x]] in {uf[i] for i in lset}]
        rr = [(x, a) for x, a in rs if (x, a) not in rl]
        yield _rebuild(rl, [cs[i] for i in left]), _rebuild(rr, [cs[i] for i in right])


def check_dill(j: DJudgment, p: Proc) -> DDerivation:
    """Syntax-directed derivation of ``j`` for ``p``, or the first error."""
    return _Checker(False).prove(dict(j.unrestricted), dict(j.linear), p, j.subject, j.offered)


def check_dill_modulo(j: DJudgment, p: Proc) -> DDerivation:
    """Like ``check_dill`` but up to structural congruence."""
    return _Checker(True).prove(dict(j.unrestricted), dict(j.linear), p, j.subject, j.offered)


def typable_dill(j: DJudgment, p: Proc, modulo: bool = False) -> bool:
    try:
        (check_dill_modulo if modulo else check_dill)(j, p)
        return True
    except CalcError:
        return False
