import pytest

from sesscalc import load_fixture
from sesscalc.errors import LeftoverLinear, LevelViolation, MissingLevel, ModeMismatch, TypeMismatch, Unsatisfiable
from sesscalc.names import name
from sesscalc.parser import parse_process, parse_type
from sesscalc.s2w import translate_judgment_s2w
from sesscalc.session import check_s
from sesscalc.syntax import TUnit, WNil
from sesscalc.weight import (
    Eq, Lt, active_outputs, check_w, dual_w, gen_constraints, level_vars,
    satisfies, solve_levels, weight, weight_less,
)

from oracles import brute_levels

n = name


def w(text):
    return parse_process(text, "w")


def wt(text):
    return parse_type(text, "w")


def test_dual_of_unit():
    assert dual_w(TUnit()) == TUnit()


def test_dual_input_output():
    assert dual_w(wt("in[2](unit,unit)")) == wt("out[2](unit,unit)")
    assert dual_w(wt("out[2](unit,unit)")) == wt("in[2](unit,unit)")


def test_dual_server_client():
    assert dual_w(wt("srv[1](unit)")) == wt("cli[1](unit)")
    assert dual_w(wt("cli[1](unit)")) == wt("srv[1](unit)")


def test_active_outputs_follow_prefixes():
    assert active_outputs(w("x!(a,b).y!(c,d).0")) == {n("x"), n("y")}
    assert active_outputs(w("z(a,b).y!(c,d).0")) == {n("y")}


def test_server_body_has_no_active_outputs():
    assert active_outputs(w("!x(a,b).y!(c,d).0")) == set()
    assert active_outputs(WNil()) == set()


def test_client_and_server_accepted_at_level_one():
    g = {n("w"): (":", TUnit()), n("u"): (":", TUnit())}
    p = w("new c :: srv[1](unit). ( !c(z,k).0 | c!(w,u).0 )")
    d = check_w(g, p, {})
    assert d.rule == "Res"


def _self_invoking():
    f = load_fixture("ex2_8")
    return translate_judgment_s2w(check_s(f.types(), f.process))


@pytest.mark.parametrize("level", [1, 2, 5])
def test_self_invoking_server_violates_levels(level):
    j = _self_invoking()
    with pytest.raises(LevelViolation):
        check_w(j.ctx, j.process, {v: level for v in level_vars(j.ctx, j.process)})


def test_nil_in_empty_context():
    assert check_w({}, WNil(), {}).rule == "Nil"


def test_structural_errors():
    g = {n("x"): (":", wt("in[1](unit,unit)"))}
    with pytest.raises(LeftoverLinear):
        check_w(g, WNil(), {})
    with pytest.raises(TypeMismatch):
        check_w(g, w("x!(a,b).0"), {})
    g = {n("x"): (":", wt("out[1](unit,unit)")), n("a"): (":", TUnit()), n("b"): (":", TUnit())}
    with pytest.raises(ModeMismatch):
        check_w(g, w("x!(a,b).0"), {})


def test_constraints_of_self_invoking_server():
    j = _self_invoking()
    (x,) = [r for r in j.constraints if isinstance(r, Lt)]
    assert x.a == x.b
    with pytest.raises(Unsatisfiable):
        solve_levels(gen_constraints(j.ctx, j.process))


def test_server_without_outputs_has_no_constraints():
    assert gen_constraints({n("x"): (":", wt("srv[lx](unit)"))}, w("!x(y,z).0")) == set()


def test_linear_input_ties_continuation_level():
    g = {n("x"): (":", wt("in[lx](unit,in[lz](unit,unit))"))}
    assert gen_constraints(g, w("x(y,z).z(a,b).0")) == {Eq(n("lx"), n("lz"))}


def test_solver_rejects_strict_self_loop():
    with pytest.raises(Unsatisfiable) as err:
        solve_levels({Lt(n("c"), n("c"))})
    assert err.value.cycle == [n("c")]


def test_solver_empty_system():
    assert solve_levels(set()) == {}


def test_solver_minimal_layering():
    cs = {Eq(n("x"), n("z")), Lt(n("y"), n("x"))}
    sol = solve_levels(cs)
    assert sol == {n("y"): 1, n("x"): 2, n("z"): 2}
    assert sol == brute_levels([n("y"), n("x"), n("z")], 3, cs)


def test_solver_reports_longer_cycle():
    cs = {Lt(n("a"), n("b")), Eq(n("b"), n("c")), Lt(n("c"), n("a"))}
    with pytest.raises(Unsatisfiable) as err:
        solve_levels(cs)
    assert set(err.value.cycle) <= {n("a"), n("b"), n("c")}
    assert brute_levels([n("a"), n("b"), n("c")], 3, cs) is None


def test_solution_satisfies_constraints():
    cs = {Lt(n("a"), n("b")), Lt(n("b"), n("c")), Eq(n("d"), n("a")), Lt(n("d"), 4)}
    sol = solve_levels(cs)
    assert satisfies(sol, cs)
    assert sol[n("c")] == 3


def test_weight_of_nil_and_server():
    assert weight(WNil(), {}) == {}
    assert weight(w("!x(y,z).u!(a,b).0"), {}) == {}


def test_weight_sums_outputs():
    assert weight(w("x!(a,b).0 | x!(c,d).0"), {n("x"): 2}) == {2: 2}


def test_weight_needs_levels():
    with pytest.raises(MissingLevel):
        weight(w("x!(a,b).0"), {})


def test_weight_order():
    assert weight_less({}, {1: 1})
    assert weight_less({1: 5}, {2: 1})
    assert not weight_less({2: 1}, {2: 1})
    assert not weight_less({2: 1}, {1: 5})
    assert weight_less({1: 0}, {1: 1})
