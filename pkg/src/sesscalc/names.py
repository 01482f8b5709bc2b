"""Channel names with a freshness index."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True, order=True)
class Name:
    """A channel name: a surface identifier plus a disambiguating index.

    Surface names parse with index 0.  Names whose base starts with ``%``
    belong to the generated namespace used by the translations.
    """

    base: str
    index: int = 0

    def __str__(self) -> str:
        if self.base.startswith("%"):
            return f"{self.base}{self.index}"
        if self.index == 0:
            return self.base
        return f"{self.base}%{self.index}"

    def __repr__(self) -> str:
        return f"Name({str(self)!r})"


_TEXT = re.compile(r"^(%[A-Za-z]+)(\d+)$|^([A-Za-z_][A-Za-z0-9_']*)(?:%(\d+))?$")


def name(text: str) -> Name:
    """Build a Name from its printed form (inverse of ``str``)."""
    m = _TEXT.match(text)
    if not m:
        raise ValueError(f"not a name: {text!r}")
    if m.group(1):
        return Name(m.group(1), int(m.group(2)))
    return Name(m.group(3), int(m.group(4) or 0))


def fresh(base: str, avoid: Iterable[Name]) -> Name:
    """Smallest-index name with the given base that is not in ``avoid``."""
    taken = {n.index for n in avoid if n.base == base}
    i = 0 if base.startswith("%") else 1
    while i in taken:
        i += 1
    return Name(base, i)


class Supply:
    """Deterministic fresh-name source for one analysis run."""

    def __init__(self, avoid: Iterable[Name] = ()):
        self.used: set[Name] = set(avoid)

    def reserve(self, names: Iterable[Name]) -> None:
        self.used.update(names)

    def __call__(self, base: str) -> Name:
        n = fresh(base, self.used)
        self.used.add(n)
        return n

    def plain(self, base: str) -> Name:
        """Like calling the supply, but use the bare ``base`` when it is free."""
        n = Name(base)
        if base.startswith("%") or n in self.used:
            return self(base)
        self.used.add(n)
        return n
