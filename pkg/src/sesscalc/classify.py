"""Membership in the three classes and an execution summary for one file."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import CalcError, InclusionViolation
from .parser import SourceFile
from .printer import show, show_dtype
from .s2dill import LVerdict, in_L
from .s2w import WVerdict, in_W
from .semantics import Trace, run_bounded
from .session import SDerivation, check_s


@dataclass
class ClassReport:
    in_s: bool
    in_w: bool
    in_l: bool
    s_derivation: Optional[SDerivation]
    s_reason: Optional[CalcError]
    w: WVerdict
    l: LVerdict
    execution: Trace

    def as_dict(self) -> dict:
        ex = self.execution
        return {
            "S": {"member": self.in_s,
                  "reason": str(self.s_reason) if self.s_reason else None},
            "W": {"member": self.in_w,
                  "levels": {str(k): v for k, v in sorted(self.w.levels.items())},
                  "reason": str(self.w.reason) if self.w.reason else None},
            "L": {"member": self.in_l,
                  "root": str(self.l.root) if self.l.root is not None else None,
                  "offered": show_dtype(self.l.offered) if self.l.accepted else None,
                  "failures": {str(u): str(e) for u, e in self.l.failures}},
            "execution": {"verdict": ex.verdict, "steps": len(ex.steps),
                          "final": show(ex.final) if ex.final is not None else None},
        }

    def render(self) -> str:
        def yn(b: bool) -> str:
            return "yes" if b else "no"

        lines = [f"S: {yn(self.in_s)}" + (f"  ({self.s_reason})" if self.s_reason else "")]
        w = f"W: {yn(self.in_w)}"
        if self.in_w:
            w += "  levels " + ", ".join(f"{k}={v}" for k, v in sorted(self.w.levels.items()))
        elif self.in_s and self.w.reason:
            w += f"  ({self.w.reason})"
        lines.append(w)
        l = f"L: {yn(self.in_l)}"
        if self.in_l:
            l += f"  root {self.l.root} : {show_dtype(self.l.offered)}"
        lines.append(l)
        if self.in_s and not self.in_l:
            for u, e in self.l.failures:
                lines.append(f"   root {u}: {e}")
        ex = self.execution
        lines.append(f"execution: {ex.verdict} in {len(ex.steps)} steps")
        return "\n".join(lines)


def classify(f: SourceFile, budget: int = 10000) -> ClassReport:
    """Run all three membership tests and a bounded execution."""
    if f.calculus != "s":
        raise ValueError("classification needs a pi-S file")
    g, p = f.types(), f.process
    try:
        d, s_err = check_s(g, p), None
    except CalcError as e:
        d, s_err = None, e
    w = in_W(g, p)
    l = in_L(g, p)
    report = ClassReport(d is not None, w.accepted, l.accepted, d, s_err, w, l,
                         run_bounded(p, "s", budget))
    if report.in_w and not report.in_s:
        raise InclusionViolation("accepted in W but not in S")
    if report.in_l and not report.in_w:
        raise InclusionViolation("accepted in L but not in W")
    return report
