"""Command-line interface: ``sesscalc COMMAND FILE``.

Exit status is 0 when the file is accepted, 1 when it is rejected and 2
for usage or parse errors.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .classify import classify
from .dill import DJudgment, check_dill
from .errors import CalcError, SyntaxError_
from .names import Supply, name as mkname
from .parser import SourceFile, parse
from .printer import print_file, show, show_dtype
from .s2dill import in_L, translate_judgment_s2dill
from .s2w import in_W
from .semantics import run_bounded
from .session import check_s
from .syntax import Bang, One, all_names
from .weight import (
    check_w, gen_constraints, instantiate_ctx, instantiate_proc, level_map,
    level_vars, solve_levels, weight,
)

ACCEPT, REJECT, USAGE = 0, 1, 2


def _load(path: str, *calculi: str) -> SourceFile:
    try:
        f = parse(Path(path).read_text())
    except OSError as e:
        raise click.UsageError(f"cannot read {path}: {e.strerror}")
    except SyntaxError_ as e:
        click.echo(f"{path}: {e}", err=True)
        sys.exit(USAGE)
    except CalcError as e:
        click.echo(f"{path}: {e}", err=True)
        sys.exit(USAGE)
    if calculi and f.calculus not in calculi:
        raise click.UsageError(f"{path} is a pi-{f.calculus} file; expected {' or '.join(calculi)}")
    return f


def _emit(fmt: str, text: str, doc: dict, ok: bool) -> None:
    click.echo(json.dumps(doc, indent=2) if fmt == "json" else text)
    sys.exit(ACCEPT if ok else REJECT)


def _format(f):
    return click.option("--format", "fmt", type=click.Choice(["text", "json"]),
                        default="text", show_default=True, help="Report style.")(f)


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Type checkers, translations and an interpreter for three session
    calculi: pi-S, the level-typed pi-W and pi-DILL."""


@main.command("check-s")
@click.argument("file", type=click.Path(dir_okay=False))
@_format
def check_s_cmd(file: str, fmt: str) -> None:
    """Session-type FILE (pi-S) and print the derivation."""
    f = _load(file, "s")
    try:
        d = check_s(f.types(), f.process)
    except CalcError as e:
        _emit(fmt, f"rejected: {e}", {"accepted": False, "reason": str(e)}, False)
    _emit(fmt, d.render(), {"accepted": True, "rules": d.rules()}, True)


def _infer_w(f: SourceFile) -> tuple[dict, object, dict]:
    g = f.types()
    cs = gen_constraints(g, f.process)
    sol = solve_levels(cs)
    for v in level_vars(g, f.process):
        sol.setdefault(v, 1)
    check_w(g, f.process, sol)
    ctx, proc = instantiate_ctx(g, sol), instantiate_proc(f.process, sol)
    return ctx, proc, level_map(ctx, proc)


def _levels_text(levels: dict) -> str:
    return "\n".join(f"level {x} = {n}" for x, n in sorted(levels.items()))


@main.command("check-w")
@click.argument("file", type=click.Path(dir_okay=False))
@_format
def check_w_cmd(file: str, fmt: str) -> None:
    """Weight-type FILE and print the inferred level function.

    A pi-S file is translated first."""
    f = _load(file, "s", "w")
    try:
        if f.calculus == "s":
            v = in_W(f.types(), f.process)
            if not v.accepted:
                raise v.reason
            levels = v.levels
        else:
            _, _, levels = _infer_w(f)
    except CalcError as e:
        doc = {"accepted": False, "reason": str(e)}
        if getattr(e, "cycle", None):
            doc["cycle"] = [str(n) for n in e.cycle]
        _emit(fmt, f"rejected: {e}", doc, False)
    _emit(fmt, _levels_text(levels), {"accepted": True,
          "levels": {str(k): n for k, n in sorted(levels.items())}}, True)


def _dill_judgment(f: SourceFile) -> DJudgment:
    if f.root is not None:
        u, a = f.root
    else:
        u, a = Supply(all_names(f.process) | set(f.types())).plain("u"), One()
    return DJudgment({}, f.types(), u, a)


@main.command("check-l")
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("--root", "root", default=None, help="Try only this root name (pi-S files).")
@_format
def check_l_cmd(file: str, root, fmt: str) -> None:
    """Decide membership of FILE in class L, or type a pi-DILL FILE."""
    f = _load(file, "s", "dill")
    if f.calculus == "dill":
        j = _dill_judgment(f)
        try:
            d = check_dill(j, f.process)
        except CalcError as e:
            _emit(fmt, f"rejected: {e}", {"accepted": False, "reason": str(e)}, False)
        _emit(fmt, d.render(), {"accepted": True, "rules": d.rules()}, True)
    v = in_L(f.types(), f.process, mkname(root) if root else None)
    fails = {str(u): str(e) for u, e in v.failures}
    if not v.accepted:
        lines = ["rejected: no root gives a typable translation"]
        lines += [f"  root {u}: {e}" for u, e in fails.items()] or [f"  {v.reason}"]
        _emit(fmt, "\n".join(lines), {"accepted": False, "failures": fails,
                                      "reason": str(v.reason)}, False)
    text = "\n".join([f"root {v.root} : {show_dtype(v.offered)}",
                      f"rows {' '.join(v.judgment.rows)}",
                      v.derivation.render()])
    _emit(fmt, text, {"accepted": True, "root": str(v.root), "offered": show_dtype(v.offered),
                      "rows": v.judgment.rows, "rules": v.derivation.rules()}, True)


@main.command("classify")
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("--budget", type=click.IntRange(min=1), default=10000, show_default=True)
@_format
def classify_cmd(file: str, budget: int, fmt: str) -> None:
    """Report membership of FILE in S, W and L and run it."""
    f = _load(file, "s")
    r = classify(f, budget)
    _emit(fmt, r.render(), r.as_dict(), r.in_s)


@main.command("translate")
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("--to", "target", type=click.Choice(["w", "dill"]), required=True)
def translate_cmd(file: str, target: str) -> None:
    """Print the translation of a pi-S FILE as a pi-W or pi-DILL file."""
    f = _load(file, "s")
    try:
        d = check_s(f.types(), f.process)
    except CalcError as e:
        click.echo(f"rejected: {e}", err=True)
        sys.exit(REJECT)
    if target == "w":
        v = in_W(f.types(), f.process)
        j = v.judgment
        if v.accepted:
            ctx, proc = v.ctx, v.process
        elif j is not None:
            ctx, proc = j.ctx, j.process
        else:
            click.echo(f"rejected: {v.reason}", err=True)
            sys.exit(REJECT)
        out = SourceFile(proc, "w", list(ctx.items()))
        text = print_file(out)
        if v.accepted:
            text += "".join(f"# level {x} = {n}\n" for x, n in sorted(v.levels.items()))
        else:
            text += f"# not weight-typable: {v.reason}\n"
        click.echo(text, nl=False)
        sys.exit(ACCEPT if v.accepted else REJECT)
    v = in_L(f.types(), f.process)
    try:
        lj = v.judgment if v.accepted else translate_judgment_s2dill(d, Supply(all_names(f.process) | set(d.ctx)).plain("u"))
    except CalcError as e:
        click.echo(f"rejected: {e}", err=True)
        sys.exit(REJECT)
    j = lj.judgment
    ann = [(x, Bang(t)) for x, t in j.unrestricted.items()] + list(j.linear.items())
    text = print_file(SourceFile(lj.process, "dill", ann, (j.subject, j.offered)))
    if not v.accepted:
        text += f"# not typable: {v.reason}\n"
    click.echo(text, nl=False)
    sys.exit(ACCEPT if v.accepted else REJECT)


@main.command("run")
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("--budget", type=click.IntRange(min=1), default=10000, show_default=True)
@_format
def run_cmd(file: str, budget: int, fmt: str) -> None:
    """Reduce FILE, always taking the first available step."""
    f = _load(file)
    tr = run_bounded(f.process, f.calculus, budget)
    doc = {"verdict": tr.verdict, "steps": [{"rule": r, "term": show(q)} for r, q in tr.steps]}
    _emit(fmt, tr.render(), doc, tr.verdict == "NormalForm")


@main.command("weight")
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("--budget", type=click.IntRange(min=1), default=10000, show_default=True)
@_format
def weight_cmd(file: str, budget: int, fmt: str) -> None:
    """Print the weight vector of FILE along its execution.

    A pi-S file is translated to pi-W first."""
    f = _load(file, "s", "w")
    try:
        if f.calculus == "s":
            v = in_W(f.types(), f.process)
            if not v.accepted:
                raise v.reason
            ctx, proc = v.ctx, v.process
        else:
            ctx, proc, _ = _infer_w(f)
    except CalcError as e:
        _emit(fmt, f"rejected: {e}", {"accepted": False, "reason": str(e)}, False)
    tr = run_bounded(proc, "w", budget)
    terms = [proc] + [q for _, q in tr.steps]
    vecs = [weight(q, level_map(ctx, q)) for q in terms]
    text = "\n".join(f"#{k} {_vec(w)}  {show(q)}" for k, (w, q) in enumerate(zip(vecs, terms)))
    doc = {"accepted": True, "weights": [{str(n): c for n, c in sorted(w.items())} for w in vecs]}
    _emit(fmt, text, doc, True)


def _vec(w: dict) -> str:
    return "{" + ", ".join(f"{n}: {c}" for n, c in sorted(w.items(), reverse=True)) + "}"


if __name__ == "__main__":
    main()
