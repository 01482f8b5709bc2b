import pytest

from sesscalc import parse, print_file, show
from sesscalc.errors import DuplicateAnnotation, SyntaxError_
from sesscalc.names import name
from sesscalc.parser import parse_type
from sesscalc.printer import show_dtype, show_stype, show_wtype
from sesscalc.syntax import (
    DFwd, SClient, SEnd, SIn, SNil, SOut, SPar, SRes, SServer, alpha_eq,
)

EX_2_8 = "calculus s\nprocess new x y.( y!w.0 | un x(z). y!w.0 )\ntypes w:end, x:srv end, y:cli end"


def test_parse_self_invoking_server():
    f = parse(EX_2_8)
    assert f.calculus == "s"
    p = f.process
    assert isinstance(p, SRes) and isinstance(p.body, SPar)
    assert isinstance(p.body.left, SOut)
    assert isinstance(p.body.right, SIn) and p.body.right.qual == "un"
    # annotations of the bound endpoints move onto their restriction
    assert f.types() == {name("w"): SEnd()}
    assert p.types == (SServer(SEnd()), SClient(SEnd()))


def test_parse_nil_without_annotations():
    f = parse("calculus s\nprocess 0")
    assert f.process == SNil()
    assert f.annotations == []


def test_parse_forwarder():
    f = parse("calculus dill\nprocess fwd x y\ntypes x:1")
    assert f.process == DFwd(name("x"), name("y"))


def test_print_nil():
    assert show(SNil()) == "0"


def test_print_server_type():
    assert show_stype(SServer(SEnd())) == "srv end"


def test_print_types_of_each_calculus():
    assert show_stype(parse_type("lin ?end.lin !end.end", "s")) == "lin ?end.lin !end.end"
    assert show_wtype(parse_type("in[2](unit,out[2](unit,unit))", "w")) == "in[2](unit,out[2](unit,unit))"
    assert show_dtype(parse_type("!((1 -o 1) & 1)", "dill")) == "!((1 -o 1) & 1)"


def test_round_trip_whole_corpus(corpus):
    for stem, f in corpus.items():
        g = parse(print_file(f))
        assert g.calculus == f.calculus, stem
        assert alpha_eq(g.process, f.process), stem
        assert g.annotations == f.annotations, stem
        assert g.root == f.root, stem


def test_round_trip_keeps_non_dual_restriction():
    f = parse("calculus s\nprocess new x y : lin !end.end, lin !end.end. 0")
    text = print_file(f)
    assert "lin !end.end, lin !end.end" in text
    assert alpha_eq(parse(text).process, f.process)


def test_dual_restriction_prints_one_type():
    f = parse("calculus s\nprocess new x y : lin !end.end. 0")
    assert f.process.types[1] == parse_type("lin ?end.end", "s")
    assert ", lin" not in print_file(f)


def test_syntax_error_reports_position_and_expectations():
    with pytest.raises(SyntaxError_) as err:
        parse("calculus s\nprocess x!.0")
    e = err.value
    assert (e.line, e.column) == (2, 11)
    assert e.expected


def test_unknown_calculus_is_rejected():
    with pytest.raises(SyntaxError_):
        parse("calculus q\nprocess 0")


def test_duplicate_annotation():
    with pytest.raises(DuplicateAnnotation):
        parse("calculus s\nprocess 0\ntypes w:end, w:end")


def test_comments_are_ignored():
    f = parse("# a comment\ncalculus s  # trailing\nprocess 0")
    assert f.process == SNil()
