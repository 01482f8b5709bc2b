"""Translation of session-typed pi-S into the level-typed pi-W.

The process translation is driven by a typing derivation: the shape of the
subject's type decides whether a continuation name is threaded.  Fresh
continuation and unit names come from the ``%k`` namespace, and the two
co-variables of a restriction are merged into its first endpoint.

Types are translated with level variables: a name's own level is the
variable named after it, payload positions get fresh ``%a`` variables.
Checking the result symbolically yields the level constraints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .errors import CalcError, MissingLevel, MissingTypeInfo, Unsatisfiable
from .names import Name, Supply
from .session import SDerivation, check_s
from .syntax import (
    SClient, SEnd, SIn, SLin, SNil, SOut, SPar, SRes, SServer, TCli, TIn, TOut,
    TSrv, TUnit, WIn, WNil, WOut, WPar, WRes, WServer, all_names,
)
from .weight import (
    check_w, gen_constraints, instantiate_ctx, instantiate_proc, level_map,
    level_vars, solve_levels,
)

LevelSource = Union[dict, Callable[[Name], object]]


def translate_type_s2w(t, l: Optional[LevelSource], carrier: Name,
                       supply: Optional[Supply] = None):
    """Link type of a session type carried by ``carrier``.

    ``l`` maps carriers to levels; with ``l=None`` each carrier stands for
    its own level variable.  Payloads are carried by fresh auxiliary names."""
    supply = supply or Supply([carrier])

    def lev(n: Name):
        if l is None:
            return n
        if callable(l):
            return l(n)
        if n not in l:
            raise MissingLevel(f"no level for carrier {n}", name=n)
        return l[n]

    def go(t, c: Name):
        match t:
            case SEnd():
                return TUnit()
            case SLin("?", p, s):
                return TIn(lev(c), go(p, supply("%a")), go(s, c))
            case SLin("!", p, s):
                return TOut(lev(c), go(p, supply("%a")), go(s, c))
            case SServer(p):
                return TSrv(lev(c), go(p, supply("%a")))
            case SClient(p):
                return TCli(lev(c), go(p, supply("%a")))
        raise TypeError(t)

    return go(t, carrier)


def translate_ctx_s2w(g: dict, l: Optional[LevelSource] = None,
                      supply: Optional[Supply] = None) -> dict:
    supply = supply or Supply(g)
    return {x: (":", translate_type_s2w(t, l, x, supply)) for x, t in g.items()}


class _Translator:
    def __init__(self, p, supply: Supply, typed: bool):
        self.supply = supply
        self.typed = typed  # attach restriction annotations with level variables
        self.units: list[Name] = []

    def fresh(self) -> Name:
        return self.supply("%k")

    def ty(self, t, carrier: Name):
        return translate_type_s2w(t, None, carrier, self.supply)

    def go(self, d: SDerivation, env: dict):
        p = d.term

        def e(n: Name) -> Name:
            return env.get(n, n)

        prem = [q for q in d.premises if q.rule != "Var"]
        match p:
            case SNil():
                return WNil()
            case SPar():
                return WPar(self.go(prem[0], env), self.go(prem[1], env))
            case SRes(a, b, _, types):
                z = a
                annot = self.ty(types[0], z) if self.typed else None
                return WRes(z, self.go(prem[0], {**env, a: z, b: z}), annot)
            case SIn(q, x, y, _):
                st = d.subject_type
                if st is None:
                    raise MissingTypeInfo(f"no type recorded for subject {x}", name=x)
                z = self.fresh()
                if q == "un":
                    return WServer(e(x), y, z, self.go(prem[0], env))
                if isinstance(st, SLin):
                    return WIn(e(x), y, z, self.go(prem[0], {**env, x: z}))
                if isinstance(st, SServer):
                    return WIn(e(x), y, z, self.go(prem[0], env))
                raise MissingTypeInfo(f"input subject {x} has type shape {type(st).__name__}", name=x)
            case SOut(x, v, _):
                st = d.subject_type
                if st is None:
                    raise MissingTypeInfo(f"no type recorded for subject {x}", name=x)
                z = self.fresh()
                if isinstance(st, SLin):
                    annot = self.ty(st.cont, z) if self.typed else None
                    body = WOut(e(x), e(v), z, self.go(prem[0], {**env, x: z}))
                    return WRes(z, body, annot)
                if isinstance(st, SClient):
                    self.units.append(z)
                    return WOut(e(x), e(v), z, self.go(prem[0], env))
                raise MissingTypeInfo(f"output subject {x} has type shape {type(st).__name__}", name=x)
        raise MissingTypeInfo(f"derivation node {d.rule} does not match the process")


def _check_match(p, d: SDerivation) -> None:
    if d.term != p:
        raise MissingTypeInfo("the derivation does not type this process")


def translate_proc_s2w(p, typing: SDerivation, typed: bool = False):
    """Translate ``p`` following ``typing``.  With ``typed=True`` the
    restrictions carry link-type annotations over level variables."""
    _check_match(p, typing)
    tr = _Translator(p, Supply(all_names(p) | set(typing.ctx)), typed)
    return tr.go(typing, {})


@dataclass
class WJudgment:
    ctx: dict  # Name -> (mode, WType), levels are variables
    process: object
    constraints: set = field(default_factory=set)
    units: list = field(default_factory=list)


def translate_judgment_s2w(d: SDerivation) -> WJudgment:
    """Context, process and level constraints of the translated judgment."""
    supply = Supply(all_names(d.term) | set(d.ctx))
    tr = _Translator(d.term, supply, typed=True)
    proc = tr.go(d, {})
    ctx = translate_ctx_s2w(d.ctx, None, supply)
    for u in tr.units:
        ctx[u] = (":", TUnit())
    return WJudgment(ctx, proc, gen_constraints(ctx, proc), list(tr.units))


@dataclass
class WVerdict:
    accepted: bool
    levels: dict = field(default_factory=dict)  # process names -> level
    judgment: Optional[WJudgment] = None
    assignment: dict = field(default_factory=dict)  # level variables -> level
    reason: Optional[CalcError] = None
    stage: str = ""  # "S" when the source is untypable, "W" otherwise

    @property
    def ctx(self) -> dict:
        return instantiate_ctx(self.judgment.ctx, self.assignment)

    @property
    def process(self):
        return instantiate_proc(self.judgment.process, self.assignment)


def in_W(g: dict, p) -> WVerdict:
    """Membership in the weight-typable class."""
    try:
        d = check_s(g, p)
    except CalcError as err:
        return WVerdict(False, reason=err, stage="S")
    try:
        j = translate_judgment_s2w(d)
        sol = solve_levels(j.constraints)
        for v in level_vars(j.ctx, j.process):
            sol.setdefault(v, 1)
        check_w(j.ctx, j.process, sol)
        ctx, proc = instantiate_ctx(j.ctx, sol), instantiate_proc(j.process, sol)
        return WVerdict(True, level_map(ctx, proc), j, sol)
    except CalcError as err:
        return WVerdict(False, reason=err, stage="W",
                        judgment=locals().get("j"))


__all__ = [
    "translate_type_s2w", "translate_ctx_s2w", "translate_proc_s2w",
    "translate_judgment_s2w", "in_W", "WJudgment", "WVerdict", "Unsatisfiable",
]
