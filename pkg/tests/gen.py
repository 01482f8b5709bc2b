"""Seeded random generators for processes, types and weight vectors."""

from __future__ import annotations

import random
from dataclasses import replace

from sesscalc.names import Name, Supply
from sesscalc.session import dual_s
from sesscalc.syntax import (
    Bang, DBOut, DCase, DFwd, DIn, DNil, DPar, DRes, DSelL, DSelR, DServer,
    Lolli, One, Plus, SClient, SEnd, SIn, SLin, SNil, SOut, SPar, SRes,
    SServer, TCli, TIn, TOut, TSrv, TUnit, Tensor, With, size,
)

W = Name("w")
END = SEnd()
LIN_IN = SLin("?", END, END)
LIN_OUT = SLin("!", END, END)

# small universe used when annotating restrictions
S_UNIVERSE = [
    END, LIN_IN, LIN_OUT, SServer(END), SClient(END),
    SLin("!", LIN_IN, END), SLin("?", LIN_IN, END),
    SLin("!", END, LIN_OUT), SServer(LIN_OUT), SClient(LIN_OUT),
]


# ---------------------------------------------------------------- types

def rand_stype(rng: random.Random, depth: int = 3):
    if depth == 0 or rng.random() < 0.25:
        return END
    k = rng.randrange(4)
    if k < 2:
        return SLin("!?"[k], rand_stype(rng, depth - 1), rand_stype(rng, depth - 1))
    p = rand_stype(rng, depth - 1)
    return SServer(p) if k == 2 else SClient(p)


def rand_wtype(rng: random.Random, depth: int = 3):
    if depth == 0 or rng.random() < 0.25:
        return TUnit()
    n = rng.randint(1, 5)
    k = rng.randrange(4)
    if k == 0:
        return TIn(n, rand_wtype(rng, depth - 1), rand_wtype(rng, depth - 1))
    if k == 1:
        return TOut(n, rand_wtype(rng, depth - 1), rand_wtype(rng, depth - 1))
    return (TSrv if k == 2 else TCli)(n, rand_wtype(rng, depth - 1))


def rand_vector(rng: random.Random) -> dict:
    return {lev: rng.randint(1, 3) for lev in rng.sample(range(1, 6), rng.randint(0, 4))}


# ---------------------------------------------------------------- pi-S

class _SGen:
    """Builds processes that follow the protocol of each endpoint."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.supply = Supply([W])
        self.clients: list[Name] = []

    def follow(self, x: Name, t, depth: int):
        rng = self.rng
        match t:
            case SEnd():
                return SNil()
            case SLin("!", pay, cont):
                if isinstance(pay, SEnd):
                    return SOut(x, W, self.follow(x, cont, depth - 1))
                a, b = self.supply("a"), self.supply("b")
                body = SPar(self.follow(b, dual_s(pay), depth - 1), self.follow(x, cont, depth - 1))
                return SRes(a, b, SOut(x, a, body), (pay, dual_s(pay)))
            case SLin("?", pay, cont):
                y = self.supply("y")
                rest = self.follow(x, cont, depth - 1)
                if not isinstance(pay, SEnd):
                    rest = SPar(self.follow(y, pay, depth - 1), rest)
                return SIn("lin", x, y, rest)
            case SServer(pay):
                y = self.supply("y")
                body = SNil()
                if self.clients and rng.random() < 0.4:
                    body = SOut(rng.choice(self.clients), W, body)
                return SIn("un", x, y, body)
            case SClient(pay):
                calls = rng.randint(0, 2) if isinstance(pay, SEnd) else 0
                p = SNil()
                for _ in range(calls):
                    p = SOut(x, W, p)
                return p
        raise TypeError(t)

    def session(self, depth: int):
        t = self.rng.choice(S_UNIVERSE)
        a, b = self.supply("x"), self.supply("y")
        if isinstance(t, SServer) and t.payload == END:
            self.clients.append(b)
        left, right = self.follow(a, t, depth), self.follow(b, dual_s(t), depth)
        if self.rng.random() < 0.5:
            left, right = right, left
        return SRes(a, b, SPar(left, right), (t, dual_s(t)))

    def process(self):
        p = self.session(3)
        if self.rng.random() < 0.3:
            p = SPar(p, self.session(2))
        return p


def _subterms(p, path=()):
    yield path, p
    for k in p._kids:
        yield from _subterms(getattr(p, k), path + (k,))
    for _, scope in p._binds:
        for k in scope:
            yield from _subterms(getattr(p, k), path + (k,))


def _put(p, path, q):
    if not path:
        return q
    return replace(p, **{path[0]: _put(getattr(p, path[0]), path[1:], q)})


def _names(p) -> list:
    out = []
    for _, q in _subterms(p):
        for f in ("subject", "value", "binder", "a", "b"):
            n = getattr(q, f, None)
            if isinstance(n, Name) and n not in out:
                out.append(n)
    return out


def mutate_s(rng: random.Random, p):
    """One random edit that may or may not preserve typability."""
    subs = list(_subterms(p))
    path, q = rng.choice(subs)
    k = rng.randrange(5)
    if k == 0 and isinstance(q, SIn):
        return _put(p, path, replace(q, qual="un" if q.qual == "lin" else "lin"))
    if k == 1 and isinstance(q, (SIn, SOut)):
        return _put(p, path, replace(q, subject=rng.choice(_names(p) + [W])))
    if k == 2 and path:
        return _put(p, path, SNil())
    if k == 3 and isinstance(q, SRes):
        t = rng.choice(S_UNIVERSE)
        u = dual_s(t) if rng.random() < 0.7 else rng.choice(S_UNIVERSE)
        return _put(p, path, replace(q, types=(t, u)))
    if k == 4 and isinstance(q, SOut):
        return _put(p, path, replace(q, value=rng.choice(_names(p) + [W])))
    return p


def s_stream(rng: random.Random, max_size: int = 8):
    """Endless stream of distinct processes of at most ``max_size`` nodes,
    each paired with the context ``w : end``."""
    from sesscalc.printer import show

    seen = set()
    while True:
        p = _SGen(rng).process()
        for _ in range(rng.choice([0, 0, 1, 1, 2])):
            p = mutate_s(rng, p)
        if size(p) > max_size:
            continue
        key = show(p) + repr(_annots(p))
        if key not in seen:
            seen.add(key)
            yield {W: END}, p


def s_instances(seed: int, count: int, max_size: int = 8) -> list:
    stream = s_stream(random.Random(seed), max_size)
    return [next(stream) for _ in range(count)]


def _annots(p) -> list:
    return [q.types for _, q in _subterms(p) if isinstance(q, SRes)]


# ---------------------------------------------------------------- pi-DILL

D_UNIVERSE = [
    One(), Bang(One()), Lolli(One(), One()), Tensor(One(), One()),
    With(One(), One()), Plus(One(), One()), Bang(Lolli(One(), One())),
    Lolli(Bang(One()), One()), Plus(Tensor(One(), One()), One()),
]


class _DGen:
    """Builds a provider for ``z : A`` that uses up its linear context."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.supply = Supply([])

    def split(self, delta: dict):
        a, b = {}, {}
        for x, t in delta.items():
            (a if self.rng.random() < 0.5 else b)[x] = t
        return a, b

    def left(self, gamma: dict, delta: dict, z, c, depth: int):
        x = self.rng.choice(list(delta))
        t = delta[x]
        rest = {k: v for k, v in delta.items() if k != x}
        match t:
            case One():
                return self.prov(gamma, rest, z, c, depth)
            case Tensor(a, b):
                y = self.supply("y")
                return DIn(x, y, self.prov(gamma, {**rest, y: a, x: b}, z, c, depth - 1))
            case Lolli(a, b):
                y = self.supply("y")
                d1, d2 = self.split(rest)
                return DBOut(x, y, DPar(self.prov(gamma, d1, y, a, depth - 1),
                                        self.prov(gamma, {**d2, x: b}, z, c, depth - 1)))
            case Bang(a):
                return self.prov({**gamma, x: a}, rest, z, c, depth)
            case With(a, b):
                pick = self.rng.random() < 0.5
                sel = DSelL if pick else DSelR
                return sel(x, self.prov(gamma, {**rest, x: a if pick else b}, z, c, depth - 1))
            case Plus(a, b):
                return DCase(x, self.prov(gamma, {**rest, x: a}, z, c, depth - 1),
                             self.prov(gamma, {**rest, x: b}, z, c, depth - 1))
        raise TypeError(t)

    def prov(self, gamma: dict, delta: dict, z, c, depth: int):
        rng = self.rng
        if len(delta) == 1 and list(delta.values())[0] == c and rng.random() < 0.5:
            return DFwd(list(delta)[0], z)
        if delta and (depth <= 0 or rng.random() < 0.4 or isinstance(c, (One, Bang))):
            return self.left(gamma, delta, z, c, depth)
        if gamma and rng.random() < 0.2:
            x = rng.choice(list(gamma))
            y = self.supply("y")
            return DBOut(x, y, self.prov(gamma, {**delta, y: gamma[x]}, z, c, depth - 1))
        if depth > 0 and rng.random() < 0.15:
            x, a = self.supply("x"), rng.choice(D_UNIVERSE)
            d1, d2 = self.split(delta)
            return DRes(x, a, DPar(self.prov(gamma, d1, x, a, depth - 1),
                                   self.prov(gamma, {**d2, x: a}, z, c, depth - 1)))
        match c:
            case One():
                return DNil()
            case Lolli(a, b):
                y = self.supply("y")
                return DIn(z, y, self.prov(gamma, {**delta, y: a}, z, b, depth - 1))
            case Tensor(a, b):
                y = self.supply("y")
                d1, d2 = self.split(delta)
                return DBOut(z, y, DPar(self.prov(gamma, d1, y, a, depth - 1),
                                        self.prov(gamma, d2, z, b, depth - 1)))
            case Bang(a):
                y = self.supply("y")
                return DServer(z, y, self.prov(gamma, {}, y, a, depth - 1))
            case With(a, b):
                return DCase(z, self.prov(gamma, delta, z, a, depth - 1),
                             self.prov(gamma, delta, z, b, depth - 1))
            case Plus(a, b):
                if rng.random() < 0.5:
                    return DSelL(z, self.prov(gamma, delta, z, a, depth - 1))
                return DSelR(z, self.prov(gamma, delta, z, b, depth - 1))
        raise TypeError(c)


def mutate_d(rng: random.Random, p):
    subs = list(_subterms(p))
    path, q = rng.choice(subs)
    k = rng.randrange(4)
    if k == 0 and isinstance(q, (DSelL, DSelR)):
        other = DSelR if isinstance(q, DSelL) else DSelL
        return _put(p, path, other(q.subject, q.cont))
    if k == 1 and hasattr(q, "subject"):
        return _put(p, path, replace(q, subject=rng.choice(_names(p))))
    if k == 2 and path:
        return _put(p, path, DNil())
    if k == 3 and isinstance(q, DRes):
        return _put(p, path, replace(q, annot=rng.choice(D_UNIVERSE)))
    return p


def dill_instances(seed: int, count: int, max_size: int = 8) -> list:
    """``count`` distinct (gamma, delta, subject, offered, process) tuples."""
    from sesscalc.printer import show, show_dtype

    rng = random.Random(seed)
    seen, out = set(), []
    while len(out) < count:
        g = _DGen(rng)
        z = Name("z")
        g.supply.reserve([z])
        gamma = {Name("u"): rng.choice(D_UNIVERSE)} if rng.random() < 0.3 else {}
        delta = {}
        for i in range(rng.randint(0, 2)):
            delta[Name(f"d{i}")] = rng.choice(D_UNIVERSE)
        g.supply.reserve(list(gamma) + list(delta))
        c = rng.choice(D_UNIVERSE)
        try:
            p = g.prov(gamma, delta, z, c, 3)
        except RecursionError:
            continue
        for _ in range(rng.choice([0, 0, 1, 2])):
            p = mutate_d(rng, p)
        if rng.random() < 0.1:
            c = rng.choice(D_UNIVERSE)
        if size(p) > max_size:
            continue
        key = (show(p), repr(sorted((str(k), show_dtype(v)) for k, v in {**gamma, **delta}.items())),
               show_dtype(c), repr([q.annot for _, q in _subterms(p) if isinstance(q, DRes)]))
        if key in seen:
            continue
        seen.add(key)
        out.append((gamma, delta, z, c, p))
    return out


# ---------------------------------------------------------------- pi-W

def _subst_levels(p, f):
    from sesscalc.syntax import WRes
    from sesscalc.weight import map_levels

    changes = {}
    if isinstance(p, WRes) and p.annot is not None:
        changes["annot"] = map_levels(p.annot, f)
    for _, scope in p._binds:
        for k in scope:
            changes[k] = _subst_levels(getattr(p, k), f)
    for k in p._kids:
        changes[k] = _subst_levels(getattr(p, k), f)
    return replace(p, **changes) if changes else p


def w_instances(seed: int, count: int, max_size: int = 8) -> list:
    """Translated judgments ``(ctx, process)`` whose types carry level
    variables; some have two variables identified, which may make the
    level constraints unsatisfiable."""
    from sesscalc.errors import CalcError
    from sesscalc.printer import show
    from sesscalc.s2w import translate_judgment_s2w
    from sesscalc.session import check_s
    from sesscalc.syntax import normalize
    from sesscalc.weight import level_vars, map_levels

    rng = random.Random(seed)
    seen, out = set(), []
    for g, p in s_stream(random.Random(seed), max_size + 2):
        p = normalize(p, avoid=g)
        try:
            j = translate_judgment_s2w(check_s(g, p))
        except CalcError:
            continue
        if size(j.process) > max_size:
            continue
        ctx, proc = j.ctx, j.process
        vs = level_vars(ctx, proc)
        if len(vs) >= 2 and rng.random() < 0.5:
            a, b = rng.sample(vs, 2)
            f = lambda n: b if n == a else n  # noqa: E731
            ctx = {x: (m, map_levels(t, f)) for x, (m, t) in ctx.items()}
            proc = _subst_levels(proc, f)
        key = show(proc) + repr(sorted((str(k), repr(v)) for k, v in ctx.items()))
        if key in seen:
            continue
        seen.add(key)
        out.append((ctx, proc))
        if len(out) == count:
            break
    return out
