import pytest

from sesscalc import load_fixture
from sesscalc.errors import MixedServerClient, NotInL, NotInS, RowConditionViolation
from sesscalc.names import name
from sesscalc.parser import parse_process, parse_type
from sesscalc.s2dill import (
    cli_pred, in_L, srv_pred, strip_bang, translate_judgment_s2dill,
    translate_proc_s2dill, translate_type_s2dill,
)
from sesscalc.dill import check_dill
from sesscalc.session import check_s
from sesscalc.syntax import Bang, One, SNil, alpha_eq

n = name


def st(text):
    return parse_type(text, "s")


def dt(text):
    return parse_type(text, "dill")


# a session type with a server at its tail, with and without a leading client
WITH_SRV = "lin !cli end.lin ?srv end.srv end"
NO_SRV = "lin !cli end.lin ?srv end.end"


@pytest.mark.parametrize("text, srv, cli", [
    (f"cli {WITH_SRV}", True, True),
    (WITH_SRV, True, False),
    (f"cli {NO_SRV}", False, True),
    (NO_SRV, False, False),
])
def test_server_and_client_predicates(text, srv, cli):
    t = st(text)
    assert (srv_pred(t), cli_pred(t)) == (srv, cli)


def test_strip_bang_one_level():
    assert strip_bang(dt("!(1 -o 1)")) == dt("1 -o 1")
    assert strip_bang(One()) == One()
    assert strip_bang(Bang(Bang(One()))) == Bang(One())


def test_end_translates_to_bang_one():
    assert translate_type_s2dill(st("end")) == dt("!1")


def test_linear_connectives():
    # a finished channel is closed by 0, which offers 1 rather than !1
    assert translate_type_s2dill(st("lin !end.end")) == dt("!1 -o 1")
    assert translate_type_s2dill(st("lin ?end.end")) == dt("!1 * 1")
    assert translate_type_s2dill(st("lin ?end.lin !end.end")) == dt("!1 * (!1 -o 1)")


def test_plain_server_and_client_types():
    # the second component is the unit, matching the worked example
    assert translate_type_s2dill(st("srv end")) == dt("!((!1 * 1) (+) 1)")
    assert translate_type_s2dill(st("cli end")) == dt("!((!1 -o 1) & 1)")


def test_server_with_server_tail():
    assert translate_type_s2dill(st("srv srv end")) == Bang(translate_type_s2dill(st("srv end")))


def test_mixed_server_client_type():
    with pytest.raises(MixedServerClient):
        translate_type_s2dill(st(f"srv cli {WITH_SRV}"))


def test_nil_translates_to_nil():
    d = check_s({}, SNil())
    assert translate_proc_s2dill(SNil(), d) == parse_process("0", "dill")


def test_client_server_translation():
    f = load_fixture("ex6_4_serverclient")
    d = check_s(f.types(), f.process)
    q = translate_proc_s2dill(f.process, d)
    want = parse_process(
        "new x : !((!1 -o 1) & 1). (!x(v).v.case(v(z).0, 0)"
        " | x!(z).z.inl;z!(v).(!v(k).w!(k').fwd k' k | 0))", "dill")
    assert alpha_eq(q, want, annotations=False)


def test_client_server_judgment_with_fresh_root():
    f = load_fixture("ex6_4_serverclient")
    d = check_s(f.types(), f.process)
    lj = translate_judgment_s2dill(d, n("u"))
    j = lj.judgment
    assert j.unrestricted == {n("w"): One()}
    assert j.linear == {}
    assert j.offered == One()
    assert lj.rows == ["3", "4", "1", "1", "11", "1"]
    assert check_dill(j, lj.process).rule == "cut"


def test_client_server_in_class():
    f = load_fixture("ex6_4_serverclient")
    v = in_L(f.types(), f.process)
    assert v.accepted
    assert v.root not in f.types()
    assert v.offered == One()


def test_terminating_witness_not_in_class():
    f = load_fixture("thm6_11_witness")
    v = in_L(f.types(), f.process)
    assert not v.accepted and isinstance(v.reason, NotInL)
    assert v.failures
    assert any(isinstance(e, RowConditionViolation) for _, e in v.failures)


def test_self_invoking_server_not_in_class():
    f = load_fixture("ex2_8")
    v = in_L(f.types(), f.process)
    assert not v.accepted
    assert [str(u) for u, _ in v.failures] == ["w", "u"]


def test_untypable_source():
    f = load_fixture("not_dual")
    v = in_L(f.types(), f.process)
    assert not v.accepted and isinstance(v.reason, NotInS)


def test_fixed_root():
    f = load_fixture("ex6_4_serverclient")
    assert not in_L(f.types(), f.process, root=n("w")).accepted
    assert in_L(f.types(), f.process, root=n("u")).accepted
