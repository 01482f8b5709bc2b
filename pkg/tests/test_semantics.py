import pytest

from sesscalc import load_fixture
from sesscalc.names import name
from sesscalc.parser import parse_process
from sesscalc.semantics import (
    In, Out, Tau, canonical, congruent, congruent_s, lts_w, reduce_dill,
    reduce_s, run_bounded, successors_s,
)
from sesscalc.syntax import DNil, SNil, WNil, alpha_eq


def s(text):
    return parse_process(text, "s")


def w(text):
    return parse_process(text, "w")


def d(text):
    return parse_process(text, "dill")


def test_self_invoking_server_steps_to_itself():
    p = s("new x y.( y!w.0 | un x(z). y!w.0 )")
    (q,) = reduce_s(p)
    assert congruent_s(q, p)


def test_client_server_step_keeps_server():
    (q,) = reduce_s(s("new x y.( un x(z).0 | y!w.0 )"))
    assert congruent_s(q, s("new x y. un x(z).0"))


def test_linear_step_consumes_input():
    (q,) = reduce_s(s("new x y.( lin x(z).z!v.0 | y!w.0 )"))
    assert congruent_s(q, s("w!v.0"))


def test_rule_names_of_s_steps():
    assert [r for r, _ in successors_s(s("new x y.( un x(z).0 | y!w.0 )"))] == ["R-UnCom"]
    assert [r for r, _ in successors_s(s("new x y.( lin x(z).0 | y!w.0 )"))] == ["R-LinCom"]


def test_nil_has_no_successors():
    assert reduce_s(SNil()) == set()
    assert lts_w(WNil()) == set()


def test_free_endpoints_do_not_communicate():
    assert reduce_s(s("lin x(z).0 | x!w.0")) == set()


def test_replicated_input_transition():
    out = lts_w(w("!x(y,z).0"), [(name("v"), name("u"))])
    assert len(out) == 1
    ((lab, q),) = out
    assert lab == In(name("x"), (name("v"), name("u")))
    assert congruent(q, w("!x(y,z).0 | 0"))


def test_single_tau_step_through_server():
    out = lts_w(w("new c.( c!(w,u).0 | !c(y,z).0 )"))
    assert len(out) == 1
    ((lab, q),) = out
    assert lab == Tau()
    assert congruent(q, w("new c.( 0 | !c(y,z).0 | 0 )"))


def test_free_output_label():
    out = lts_w(w("c!(w,u).0"))
    assert out == {(Out(name("c"), (name("w"), name("u"))), WNil())}


def test_forwarder_elimination():
    (q,) = reduce_dill(d("new x.( fwd x y | x(z).0 )"))
    assert alpha_eq(q, d("y(z).0"))


def test_output_does_not_meet_case():
    assert reduce_dill(d("x!(y).(0|0) | x.case(0, 0)")) == set()


def test_replicated_communication_keeps_server():
    (q,) = reduce_dill(d("new x.( x!(v).(0|0) | !x(z).0 )"))
    assert congruent(q, d("new x.( 0|0 | 0 | !x(z).0 )"))


def test_selection_picks_branch():
    (q,) = reduce_dill(d("new x.( x.inr;0 | x.case(y!(a).(0|0), 0) )"))
    assert congruent(q, DNil())


def test_congruence_axioms():
    p = s("x!v.0")
    assert congruent_s(s("x!v.0 | 0"), p)
    assert congruent_s(s("new x y.0"), SNil())
    assert not congruent_s(p, s("lin x(v).0"))


def test_congruence_commutes_and_extrudes():
    assert congruent_s(s("a!v.0 | b!v.0"), s("b!v.0 | a!v.0"))
    assert congruent_s(s("a!v.0 | new x y.( x!v.0 | lin y(z).0 )"),
                       s("new x y.( a!v.0 | x!v.0 | lin y(z).0 )"))


def test_dill_reducts_keep_their_cut():
    # an unused restriction over a live component is kept by the
    # representative but still congruent to the term without it
    p = d("new v : 1. !x(z).0")
    assert canonical(p) != canonical(d("!x(z).0"))
    assert congruent(p, d("!x(z).0"))


def test_run_self_invoking_server_exhausts_budget():
    tr = run_bounded(load_fixture("ex2_8").process, "s", 100)
    assert tr.verdict == "BudgetExhausted"
    assert len(tr.steps) == 100


def test_run_terminating_witness():
    tr = run_bounded(load_fixture("thm6_11_witness").process, "s", 10)
    assert tr.verdict == "NormalForm"
    assert len(tr.steps) == 2
    assert congruent_s(tr.final, s("new s t : srv end. un s(w).0"))


def test_run_nil():
    tr = run_bounded(SNil(), "s", 5)
    assert tr.verdict == "NormalForm" and tr.steps == []


def test_run_requires_positive_budget():
    with pytest.raises(ValueError):
        run_bounded(SNil(), "s", 0)
