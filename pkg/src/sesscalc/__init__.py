"""Session pi-calculi: pi-S, the level-typed pi-W and pi-DILL.

Parsers, printers, type checkers, reduction semantics, the typed
translations from pi-S into the other two calculi and a classifier for
membership in the classes S, W and L."""

from .parser import SourceFile, parse
from .printer import print_file, show

__version__ = "0.1.0"

__all__ = ["SourceFile", "parse", "print_file", "show", "corpus", "load_fixture"]


def load_fixture(stem: str) -> SourceFile:
    """Parse a bundled example file by name, without the ``.pi`` suffix."""
    from importlib.resources import files

    return parse(files(__name__).joinpath("fixtures", f"{stem}.pi").read_text())


def corpus() -> dict:
    """All bundled example files keyed by name, in name order."""
    from importlib.resources import files

    root = files(__name__).joinpath("fixtures")
    stems = sorted(p.name[:-3] for p in root.iterdir() if p.name.endswith(".pi"))
    return {s: load_fixture(s) for s in stems}
