"""Pretty-printer for processes, types and source files."""

from __future__ import annotations

from .session import dual_s
from .syntax import (
    Bang, DBOut, DCase, DFwd, DIn, DNil, DPar, DRes, DSelL, DSelR, DServer,
    Lolli, One, Plus, Proc, SClient, SEnd, SIn, SLin, SNil, SOut, SPar, SRes,
    SServer, TCli, TIn, TOut, TSrv, TUnit, Tensor, WIn, WNil, WOut, WPar, WRes,
    WServer, With,
)


def show_stype(t) -> str:
    match t:
        case SEnd():
            return "end"
        case SLin(d, p, c):
            return f"lin {d}{_sarg(p)}.{show_stype(c)}"
        case SServer(p):
            return f"srv {_sarg(p)}"
        case SClient(p):
            return f"cli {_sarg(p)}"
    raise TypeError(t)


def _sarg(t) -> str:
    # a lin type in payload position is parenthesised for readability
    s = show_stype(t)
    return f"({s})" if isinstance(t, SLin) else s


def show_wtype(t) -> str:
    match t:
        case TUnit():
            return "unit"
        case TIn(n, a, b):
            return f"in[{n}]({show_wtype(a)},{show_wtype(b)})"
        case TOut(n, a, b):
            return f"out[{n}]({show_wtype(a)},{show_wtype(b)})"
        case TSrv(n, a):
            return f"srv[{n}]({show_wtype(a)})"
        case TCli(n, a):
            return f"cli[{n}]({show_wtype(a)})"
    raise TypeError(t)


_DOPS = {Lolli: "-o", Tensor: "*", Plus: "(+)", With: "&"}


def show_dtype(t) -> str:
    match t:
        case One():
            return "1"
        case Bang(a):
            return "!" + _datom(a)
        case Lolli(a, b) | Tensor(a, b):
            return f"{_datom(a)} {_DOPS[type(t)]} {show_dtype(b)}"
        case Plus(a, b) | With(a, b):
            return f"{_datom(a)} {_DOPS[type(t)]} {show_dtype(b)}"
    raise TypeError(t)


def _datom(t) -> str:
    s = show_dtype(t)
    return s if isinstance(t, (One, Bang)) else f"({s})"


def show_type(t) -> str:
    if isinstance(t, (SEnd, SLin, SServer, SClient)):
        return show_stype(t)
    if isinstance(t, (TUnit, TIn, TOut, TSrv, TCli)):
        return show_wtype(t)
    return show_dtype(t)


def show(p: Proc) -> str:
    """Concrete syntax of a process (any calculus)."""
    match p:
        case SNil() | WNil() | DNil():
            return "0"
        case SPar(l, r) | WPar(l, r) | DPar(l, r):
            rs = show(r)
            if isinstance(r, (SPar, WPar, DPar)):
                rs = f"({rs})"
            return f"{show(l)} | {rs}"
        case SOut(x, v, c):
            return f"{x}!{v}.{_cont(c)}"
        case SIn(q, x, y, b):
            return f"{q} {x}({y}).{_cont(b)}"
        case SRes(a, b, body, types):
            ann = f" : {show_stype(types[0])}" if types else ""
            if types and dual_s(types[0]) != types[1]:
                ann += f", {show_stype(types[1])}"
            return f"new {a} {b}{ann}. {_cont(body)}"
        case WOut(x, a, b, c):
            return f"{x}!({a},{b}).{_cont(c)}"
        case WIn(x, a, b, body):
            return f"{x}({a},{b}).{_cont(body)}"
        case WServer(x, a, b, body):
            return f"!{x}({a},{b}).{_cont(body)}"
        case WRes(x, body, annot):
            ann = f" :: {show_wtype(annot)}" if annot is not None else ""
            return f"new {x}{ann}. {_cont(body)}"
        case DBOut(x, z, c):
            return f"{x}!({z}).{_cont(c)}"
        case DIn(x, z, c):
            return f"{x}({z}).{_cont(c)}"
        case DServer(x, z, c):
            return f"!{x}({z}).{_cont(c)}"
        case DRes(x, annot, body):
            ann = f" : {show_dtype(annot)}" if annot is not None else ""
            return f"new {x}{ann}. {_cont(body)}"
        case DFwd(a, b):
            return f"fwd {a} {b}"
        case DSelL(x, c):
            return f"{x}.inl;{_cont(c)}"
        case DSelR(x, c):
            return f"{x}.inr;{_cont(c)}"
        case DCase(x, l, r):
            return f"{x}.case({show(l)}, {show(r)})"
    raise TypeError(p)


def _cont(p: Proc) -> str:
    s = show(p)
    return f"({s})" if isinstance(p, (SPar, WPar, DPar)) else s


def print_file(f) -> str:
    """Render a SourceFile in the file format accepted by ``parse``."""
    lines = [f"calculus {f.calculus}", f"process {show(f.process)}"]
    if f.annotations:
        parts = []
        for n, t in f.annotations:
            if f.calculus == "w":
                mode, v = t
                parts.append(f"{n} {mode} {show_wtype(v)}")
            else:
                parts.append(f"{n} : {show_type(t)}")
        lines.append("types " + ", ".join(parts))
    if f.root is not None:
        lines.append(f"root {f.root[0]} : {show_dtype(f.root[1])}")
    return "\n".join(lines) + "\n"
