"""Recursive-descent parser for the analysis file format.

A file is a sequence of sections::

    calculus s | w | dill
    process <process>
    types x : T, y : T          (optional; pi-W uses ``x : V`` or ``x :: V``)
    root u : A                  (optional; pi-DILL only)

Lines starting with ``#`` are comments.  Type annotations on restriction
endpoints are attached to the restriction node; all binders are then
freshened so that the result obeys the Barendregt convention.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import DuplicateAnnotation, SyntaxError_, UnknownName
from .names import Name, name as mkname
from .syntax import (
    Bang, DBOut, DCase, DFwd, DIn, DNil, DPar, DRes, DSelL, DSelR, DServer,
    Lolli, One, Plus, Proc, SClient, SEnd, SIn, SLin, SNil, SOut, SPar, SRes,
    SServer, TCli, TIn, TOut, TSrv, TUnit, Tensor, WIn, WNil, WOut, WPar, WRes,
    WServer, With, free_names, normalize,
)


@dataclass
class SourceFile:
    process: Proc
    calculus: str
    annotations: list = field(default_factory=list)  # (Name, type); pi-W: (Name, (mode, type))
    root: Optional[tuple] = None  # (Name, DType)

    def types(self) -> dict:
        return dict(self.annotations)


KEYWORDS = {"calculus", "process", "types", "root", "new", "lin", "un", "end",
            "srv", "cli", "in", "out", "unit", "fwd", "inl", "inr", "case"}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<gen>%[A-Za-z]+\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*(?:%\d+)?)
  | (?P<num>\d+)
  | (?P<sym>\(\+\)|-o|::|[!?.()\[\],|:;*&])
""", re.VERBOSE)


@dataclass
class Tok:
    kind: str  # ident, num, sym, kw, eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Tok]:
    toks: list[Tok] = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SyntaxError_(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        elif kind not in ("ws", "comment"):
            if kind == "gen":
                kind = "ident"
            if kind == "ident" and s in KEYWORDS:
                kind = "kw"
            toks.append(Tok(kind, s, line, col))
            col += len(s)
        else:
            col += len(s)
        pos = m.end()
    toks.append(Tok("eof", "", line, col))
    return toks


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("sym", "kw", "num") and self.tok.text in texts

    def fail(self, what: str, expected=()):
        t = self.tok
        shown = t.text or "end of input"
        raise SyntaxError_(f"{what}, found {shown!r}", t.line, t.col, expected)

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            self.fail(f"expected {text!r}", [text])
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> Name:
        if self.tok.kind != "ident":
            self.fail("expected a name", ["<name>"])
        t = self.tok
        self.i += 1
        return mkname(t.text)

    def number(self) -> int:
        if self.tok.kind != "num":
            self.fail("expected a number", ["<number>"])
        t = self.tok
        self.i += 1
        return int(t.text)

    # -- file
    def file(self) -> SourceFile:
        self.expect("calculus")
        if not (self.tok.kind == "ident" and self.tok.text in ("s", "w", "dill")):
            self.fail("expected a calculus tag", ["s", "w", "dill"])
        calc = self.tok.text
        self.i += 1
        self.expect("process")
        proc = self.proc(calc)
        annotations: list = []
        root = None
        if self.at("types"):
            self.i += 1
            annotations = self.entries(calc)
        if self.at("root"):
            if calc != "dill":
                self.fail("root is only allowed for calculus dill")
            self.i += 1
            u = self.ident()
            self.expect(":")
            root = (u, self.dtype())
        if self.tok.kind != "eof":
            exp = ["|"] + (["types"] if not annotations else []) + (["root"] if calc == "dill" else [])
            self.fail("unexpected input", exp)
        return SourceFile(proc, calc, annotations, root)

    def entries(self, calc: str) -> list:
        out = []
        seen: set[Name] = set()
        while True:
            pos = self.tok
            n = self.ident()
            if calc == "w":
                if self.at("::"):
                    mode = "::"
                elif self.at(":"):
                    mode = ":"
                else:
                    self.fail("expected ':' or '::'", [":", "::"])
                self.i += 1
                t = (mode, self.wtype())
            else:
                self.expect(":")
                t = self.stype() if calc == "s" else self.dtype()
            if n in seen:
                raise DuplicateAnnotation(f"{n} is annotated twice (line {pos.line})", name=n)
            seen.add(n)
            out.append((n, t))
            if not self.at(","):
                return out
            self.i += 1

    # -- processes
    def proc(self, calc: str) -> Proc:
        par = {"s": SPar, "w": WPar, "dill": DPar}[calc]
        p = self.prefix(calc)
        while self.at("|"):
            self.i += 1
            p = par(p, self.prefix(calc))
        return p

    def prefix(self, calc: str) -> Proc:
        if self.at("0"):
            self.i += 1
            return {"s": SNil(), "w": WNil(), "dill": DNil()}[calc]
        if self.at("("):
            self.i += 1
            p = self.proc(calc)
            self.expect(")")
            return p
        if self.at("new"):
            self.i += 1
            return self.restriction(calc)
        return {"s": self.s_prefix, "w": self.w_prefix, "dill": self.d_prefix}[calc]()

    def restriction(self, calc: str) -> Proc:
        if calc == "s":
            a = self.ident()
            b = self.ident()
            types = None
            if self.at(":"):
                self.i += 1
                from .session import dual_s
                ta = self.stype()
                tb = dual_s(ta)
                if self.at(","):
                    # explicit second endpoint type, possibly not dual
                    self.i += 1
                    tb = self.stype()
                types = (ta, tb)
            self.expect(".")
            return SRes(a, b, self.prefix("s"), types)
        if calc == "w":
            x = self.ident()
            annot = None
            if self.at("::"):
                self.i += 1
                annot = self.wtype()
            self.expect(".")
            return WRes(x, self.prefix("w"), annot)
        x = self.ident()
        annot = None
        if self.at(":"):
            self.i += 1
            annot = self.dtype()
        self.expect(".")
        return DRes(x, annot, self.prefix("dill"))

    def s_prefix(self) -> Proc:
        if self.at("lin", "un"):
            q = self.tok.text
            self.i += 1
            x = self.ident()
            self.expect("(")
            y = self.ident()
            self.expect(")")
            self.expect(".")
            return SIn(q, x, y, self.prefix("s"))
        if self.tok.kind == "ident":
            x = self.ident()
            self.expect("!")
            v = self.ident()
            self.expect(".")
            return SOut(x, v, self.prefix("s"))
        self.fail("expected a process", ["0", "(", "new", "lin", "un", "<name>"])

    def w_prefix(self) -> Proc:
        if self.at("!"):
            self.i += 1
            x = self.ident()
            a, b = self.pair()
            self.expect(".")
            return WServer(x, a, b, self.prefix("w"))
        if self.tok.kind == "ident":
            x = self.ident()
            if self.at("!"):
                self.i += 1
                a, b = self.pair()
                self.expect(".")
                return WOut(x, a, b, self.prefix("w"))
            a, b = self.pair()
            self.expect(".")
            return WIn(x, a, b, self.prefix("w"))
        self.fail("expected a process", ["0", "(", "new", "!", "<name>"])

    def pair(self) -> tuple[Name, Name]:
        self.expect("(")
        a = self.ident()
        self.expect(",")
        b = self.ident()
        self.expect(")")
        return a, b

    def d_prefix(self) -> Proc:
        if self.at("fwd"):
            self.i += 1
            a = self.ident()
            b = self.ident()
            return DFwd(a, b)
        if self.at("!"):
            self.i += 1
            x = self.ident()
            self.expect("(")
            z = self.ident()
            self.expect(")")
            self.expect(".")
            return DServer(x, z, self.prefix("dill"))
        if self.tok.kind == "ident":
            x = self.ident()
            if self.at("!"):
                self.i += 1
                self.expect("(")
                z = self.ident()
                self.expect(")")
                self.expect(".")
                return DBOut(x, z, self.prefix("dill"))
            if self.at("("):
                self.i += 1
                z = self.ident()
                self.expect(")")
                self.expect(".")
                return DIn(x, z, self.prefix("dill"))
            self.expect(".")
            if self.at("inl", "inr"):
                cls = DSelL if self.tok.text == "inl" else DSelR
                self.i += 1
                self.expect(";")
                return cls(x, self.prefix("dill"))
            if self.at("case"):
                self.i += 1
                self.expect("(")
                left = self.proc("dill")
                self.expect(",")
                right = self.proc("dill")
                self.expect(")")
                return DCase(x, left, right)
            self.fail("expected a selection or case", ["inl", "inr", "case"])
        self.fail("expected a process", ["0", "(", "new", "!", "fwd", "<name>"])

    # -- types
    def stype(self):
        if self.at("end"):
            self.i += 1
            return SEnd()
        if self.at("("):
            self.i += 1
            t = self.stype()
            self.expect(")")
            return t
        if self.at("lin"):
            self.i += 1
            if not self.at("?", "!"):
                self.fail("expected '?' or '!'", ["?", "!"])
            d = self.tok.text
            self.i += 1
            p = self.stype()
            self.expect(".")
            return SLin(d, p, self.stype())
        if self.at("srv"):
            self.i += 1
            return SServer(self.stype())
        if self.at("cli"):
            self.i += 1
            return SClient(self.stype())
        self.fail("expected a session type", ["end", "lin", "srv", "cli", "("])

    def level(self):
        if self.tok.kind == "num":
            n = self.number()
            if n < 1:
                self.fail("levels must be positive", ["<positive number>"])
            return n
        return self.ident()

    def wtype(self):
        if self.at("unit"):
            self.i += 1
            return TUnit()
        if self.at("in", "out", "srv", "cli"):
            k = self.tok.text
            self.i += 1
            self.expect("[")
            n = self.level()
            self.expect("]")
            self.expect("(")
            a = self.wtype()
            if k in ("in", "out"):
                self.expect(",")
                b = self.wtype()
                self.expect(")")
                return (TIn if k == "in" else TOut)(n, a, b)
            self.expect(")")
            return (TSrv if k == "srv" else TCli)(n, a)
        self.fail("expected a link type", ["unit", "in", "out", "srv", "cli"])

    def dtype(self):
        left = self.datom()
        ops = {"-o": Lolli, "*": Tensor, "(+)": Plus, "&": With}
        if self.tok.kind == "sym" and self.tok.text in ops:
            cls = ops[self.tok.text]
            self.i += 1
            return cls(left, self.dtype())
        return left

    def datom(self):
        if self.at("1"):
            self.i += 1
            return One()
        if self.at("!"):
            self.i += 1
            return Bang(self.datom())
        if self.at("("):
            self.i += 1
            t = self.dtype()
            self.expect(")")
            return t
        self.fail("expected a proposition", ["1", "!", "("])


def parse_process(text: str, calculus: str) -> Proc:
    """Parse a bare process term (no file header); binders are freshened."""
    p = Parser(text)
    proc = p.proc(calculus)
    if p.tok.kind != "eof":
        p.fail("unexpected input", ["|"])
    return normalize(proc)


def parse_type(text: str, calculus: str):
    p = Parser(text)
    t = {"s": p.stype, "w": p.wtype, "dill": p.dtype}[calculus]()
    if p.tok.kind != "eof":
        p.fail("unexpected input after type")
    return t


def _restricted(p: Proc) -> set[Name]:
    out: set[Name] = set()
    if isinstance(p, SRes):
        out |= {p.a, p.b}
    elif isinstance(p, (WRes, DRes)):
        out.add(p.name)
    for _, scope in p._binds:
        for k in scope:
            out |= _restricted(getattr(p, k))
    for k in p._kids:
        out |= _restricted(getattr(p, k))
    return out


def _attach(p: Proc, ann: dict) -> Proc:
    """Copy types-line annotations of restriction endpoints into the nodes."""
    from .session import dual_s
    changes = {}
    if isinstance(p, SRes) and p.types is None:
        if p.a in ann and p.b in ann:
            changes["types"] = (ann[p.a], ann[p.b])
        elif p.a in ann:
            changes["types"] = (ann[p.a], dual_s(ann[p.a]))
        elif p.b in ann:
            changes["types"] = (dual_s(ann[p.b]), ann[p.b])
    elif isinstance(p, WRes) and p.annot is None and p.name in ann:
        from .weight import join_type
        changes["annot"] = join_type(ann[p.name][1])
    elif isinstance(p, DRes) and p.annot is None and p.name in ann:
        changes["annot"] = ann[p.name]
    for _, scope in p._binds:
        for k in scope:
            changes[k] = _attach(getattr(p, k), ann)
    for k in p._kids:
        changes[k] = _attach(getattr(p, k), ann)
    return replace(p, **changes) if changes else p


def parse(text: str) -> SourceFile:
    """Parse an analysis file."""
    f = Parser(text).file()
    ann = dict(f.annotations)
    restricted = _restricted(f.process)
    free = free_names(f.process)
    for n, _ in f.annotations:
        if n not in free and n not in restricted:
            raise UnknownName(f"annotated name {n} does not occur in the process", name=n)
    proc = _attach(f.process, ann)
    f.annotations = [(n, t) for n, t in f.annotations if n in free]
    f.process = normalize(proc)
    return f
