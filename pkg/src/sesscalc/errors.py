"""Error classes shared by the checkers and translations."""

from __future__ import annotations


class CalcError(Exception):
    """Base class; ``kind`` is the short error tag used in reports."""

    kind = "Error"

    def __init__(self, message: str, **info):
        super().__init__(message)
        self.info = info

    def __str__(self) -> str:
        return f"{self.kind}: {self.args[0]}"


def _kind(tag: str):
    return type(tag, (CalcError,), {"kind": tag})


# parsing
class SyntaxError_(CalcError):
    kind = "SyntaxError"

    def __init__(self, message: str, line: int, column: int, expected=()):
        super().__init__(message, line=line, column=column, expected=sorted(set(expected)))
        self.line, self.column, self.expected = line, column, sorted(set(expected))

    def __str__(self) -> str:
        exp = ", ".join(self.expected)
        tail = f" (expected one of: {exp})" if exp else ""
        return f"SyntaxError at {self.line}:{self.column}: {self.args[0]}{tail}"


ParseError = SyntaxError_
DuplicateAnnotation = _kind("DuplicateAnnotation")

# shared by several checkers
UnknownName = _kind("UnknownName")
LeftoverLinear = _kind("LeftoverLinear")

# session typing
QualifierMismatch = _kind("QualifierMismatch")
PayloadMismatch = _kind("PayloadMismatch")
DualityViolation = _kind("DualityViolation")

# weight typing
ModeMismatch = _kind("ModeMismatch")
LevelViolation = _kind("LevelViolation")
TypeMismatch = _kind("TypeMismatch")
MissingLevel = _kind("MissingLevel")


class Unsatisfiable(CalcError):
    kind = "Unsatisfiable"

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("level constraints contain a strict cycle through "
                         + " -> ".join(str(n) for n in self.cycle), cycle=self.cycle)


# translations
MissingTypeInfo = _kind("MissingTypeInfo")
SideConditionViolation = _kind("SideConditionViolation")
MixedServerClient = _kind("MixedServerClient")
NoClauseApplies = _kind("NoClauseApplies")
RowConditionViolation = _kind("RowConditionViolation")
NoRowApplies = _kind("NoRowApplies")

# linear-logic typing
LinearLeftover = _kind("LinearLeftover")
ZoneViolation = _kind("ZoneViolation")
SplitFailure = _kind("SplitFailure")
RuleMismatch = _kind("RuleMismatch")
MissingCutAnnotation = _kind("MissingCutAnnotation")

# classification
NotInS = _kind("NotInS")
NotInW = _kind("NotInW")
NotInL = _kind("NotInL")
InclusionViolation = _kind("InclusionViolation")
