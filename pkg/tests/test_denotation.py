import pytest
from hypothesis import HealthCheck, assume, given, settings
from strategies import typed_terms

from boxcalc.corpus import applied
from boxcalc.denotation import (
    DEFAULT_BUDGET,
    FALSE,
    NOT_BOX,
    TRUE,
    UNDEFINED,
    DBool,
    DBox,
    DFun,
    DNat,
    NotABox,
    ProbeBudget,
    Shapeliness,
    ShapeMismatch,
    UnboundName,
    Verdict,
    check_valuation,
    curry_tail,
    den_eq,
    evaluate,
    hd,
    in_denotation,
    patched_constants,
    shapely,
    show_den,
    tl,
    valuation_unknowns,
)
from boxcalc.parser import parse_term, parse_type
from boxcalc.reduction import Status, normalize
from boxcalc.syntax import NAT, Atom, CtxBox, O, Unknown, alpha_eq, numeral_value


def ev(src, val=None):
    return evaluate(val or {}, parse_term(src))


def box(src, tail):
    return DBox(parse_term(src), tail)


@pytest.mark.parametrize(
    "src, value",
    [
        ("plus 2 (times 3 4)", DNat(14)),
        ("and top (neg bot)", TRUE),
        ("natrec 1 (\\m:nat. \\r:nat. times (succ m) r) 4", DNat(24)),
        ("(\\a:nat. \\b:nat. plus a b) 1 2", DNat(3)),
        ("isapp (box (succ 0))", TRUE),
        ("isapp (box 0)", FALSE),
        ("isapp ([a:nat] a)", FALSE),
        ("let box X = [a:nat, b:nat] times a b in X@(6, 7)", DNat(42)),
    ],
)
def test_ground_values(src, value):
    assert ev(src) == value


def test_letbox_example_exactly():
    got = ev("let box X = box (plus 1 2) in box box X!")
    assert alpha_eq(got.head, parse_term("box box (plus 1 2)"))
    assert alpha_eq(got.tail.head, parse_term("box (plus 1 2)"))
    assert got.tail.tail == DNat(3)
    assert show_den(got) == "box box (plus 1 2) :: box (plus 1 2) :: 3"


def test_box_heads_instantiate_unknowns_from_the_valuation():
    val = {Unknown("X"): box("box 5", DNat(9))}
    got = ev("box (succ X!)", val)
    assert alpha_eq(got.head, parse_term("box (succ 5)"))
    # the tail uses the purported denotation, not the head
    assert got.tail == DNat(10)


def test_contextual_box_tails_are_functions_of_tuples():
    got = ev("[a:nat, b:nat] plus a (times 2 b)")
    assert got.arity == 2
    assert got.tail((DNat(1), DNat(3))) == DNat(7)
    assert curry_tail(got)(DNat(1))(DNat(3)) == DNat(7)


def test_hd_and_tl():
    x = box("box 0", DNat(0))
    assert alpha_eq(hd(x), parse_term("box 0")) and tl(x) == DNat(0)
    assert hd(DNat(3)) is NOT_BOX and tl(TRUE) is UNDEFINED


def test_invalid_boxes():
    with pytest.raises(ValueError):
        box("box a", DNat(0))
    with pytest.raises(ValueError):
        box("[a:nat] a", DNat(0))
    with pytest.raises(ValueError):
        box("box 0", lambda xs: DNat(0))
    with pytest.raises(ValueError):
        DBox(parse_term("box 0"), DNat(0), parse_type("[]o"))


def test_evaluation_errors():
    with pytest.raises(UnboundName):
        ev("a")
    with pytest.raises(NotABox):
        ev("X!", {Unknown("X"): DNat(1)})


def test_valuations():
    ctx = {Atom("a"): NAT, Unknown("X"): parse_type("[]o")}
    val = {Atom("a"): DNat(2), Unknown("X"): box("box top", FALSE)}
    assert check_valuation(ctx, val)
    assert not check_valuation(ctx, {**val, Atom("a"): TRUE})
    assert not check_valuation(ctx, {Atom("a"): DNat(2)})
    assert not check_valuation(ctx, {**val, Unknown("X"): box("box 0", DNat(0))})
    assert alpha_eq(valuation_unknowns(val)[Unknown("X")], parse_term("box top"))


@pytest.mark.parametrize(
    "x, ty, ok",
    [
        (DNat(0), NAT, True),
        (TRUE, NAT, False),
        (box("box 0", DNat(5)), CtxBox((), NAT), True),
        (box("box 0", TRUE), CtxBox((), NAT), False),
        (box("[a:nat] a", lambda xs: xs[0]), parse_type("[nat]nat"), True),
        (box("[a:nat] a", lambda xs: xs[0]), parse_type("[o]nat"), False),
        (DFun(lambda x: x), parse_type("nat -> nat"), True),
    ],
)
def test_in_denotation(x, ty, ok):
    assert in_denotation(x, ty) is ok


def test_den_eq_verdicts():
    nn = parse_type("nat -> nat")
    assert den_eq(ev("\\a:nat. plus a a"), ev("\\a:nat. times 2 a"), nn) is Verdict.INDETERMINATE
    assert den_eq(ev("\\a:nat. plus a 1"), ev("succ"), nn) is Verdict.INDETERMINATE
    assert den_eq(ev("\\a:nat. a"), ev("\\a:nat. times a a"), nn) is Verdict.UNEQUAL
    oo = parse_type("o -> o")
    assert den_eq(ev("neg"), ev("\\p:o. and (neg p) top"), oo) is Verdict.EQUAL
    assert den_eq(ev("neg"), ev("\\p:o. p"), oo) is Verdict.UNEQUAL


def test_den_eq_compares_heads_up_to_alpha():
    ty = parse_type("[nat]nat")
    x, y = ev("[a:nat] a"), ev("[b:nat] b")
    assert den_eq(x, y, ty) is Verdict.INDETERMINATE
    assert den_eq(ev("box 1"), ev("box (succ 0)"), CtxBox((), NAT)) is Verdict.EQUAL
    assert den_eq(ev("box (plus 0 1)"), ev("box 1"), CtxBox((), NAT)) is Verdict.UNEQUAL


def test_den_eq_rejects_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        den_eq(DNat(0), TRUE, NAT)


def test_the_inflated_box_that_lies_is_not_shapely():
    assert shapely(box("box 0", DNat(1)), CtxBox((), NAT)) is Shapeliness.NOT_SHAPELY
    assert shapely(box("box 0", DNat(0)), CtxBox((), NAT)) is Shapeliness.SHAPELY
    assert shapely(box("box box 0", box("box 0", DNat(2))), parse_type("[][]nat")) is Shapeliness.NOT_SHAPELY


def test_shapeliness_through_functions():
    nb = parse_type("nat -> []nat")
    liar = DFun(lambda x: box("box 0", x))
    assert shapely(liar, nb) is Shapeliness.NOT_SHAPELY
    assert shapely(evaluate({}, applied("reifyNat", 0).fun), nb) is Shapeliness.INDETERMINATE
    lying_ctx = box("[a:nat] a", lambda xs: DNat(0))
    assert shapely(lying_ctx, parse_type("[nat]nat")) is Shapeliness.NOT_SHAPELY
    assert shapely(ev("[p:o] neg p"), parse_type("[o]o")) is Shapeliness.SHAPELY


def test_budget_controls_probes():
    # agree on 0 and 1, differ at 2
    f, g = ev("\\a:nat. a"), ev("\\a:nat. times a a")
    nn = parse_type("nat -> nat")
    assert den_eq(f, g, nn, ProbeBudget(nat_probes=(0, 1))) is Verdict.INDETERMINATE
    assert den_eq(f, g, nn, DEFAULT_BUDGET) is Verdict.UNEQUAL
    with pytest.raises(ValueError):
        ProbeBudget(nat_probes=())


def test_patched_constants_restore_the_original():
    with patched_constants({"succ": DFun(lambda x: DNat(x.value + 2))}):
        assert ev("succ 0") == DNat(2)
    assert ev("succ 0") == DNat(1)


def test_exp_tails_square():
    exp2 = evaluate({}, applied("exp", 2))
    assert [exp2.tail(DNat(k)).value for k in range(9)] == [k * k for k in range(9)]
    exp_c3 = evaluate({}, applied("exp_c", 3))
    assert [exp_c3.tail((DNat(k),)).value for k in range(9)] == [k**3 for k in range(9)]


@settings(max_examples=200, suppress_health_check=[HealthCheck.filter_too_much])
@given(typed_terms(closed=True))
def test_closed_ground_values_agree_with_normal_forms(sample):
    _, t, ty = sample
    assume(ty in (NAT, O))
    report = normalize(t)
    assert report.status is Status.NORMAL
    v = evaluate({}, t)
    if ty == NAT:
        assert numeral_value(report.result) == v.value
    else:
        assert evaluate({}, report.result) == v and isinstance(v, DBool)


@settings(max_examples=200)
@given(typed_terms(closed=True))
def test_closed_denotations_are_shapely_and_typed(sample):
    _, t, ty = sample
    x = evaluate({}, t)
    assert in_denotation(x, ty)
    assert shapely(x, ty) is not Shapeliness.NOT_SHAPELY


def test_show_den():
    assert show_den(TRUE) == "⊤" and show_den(DBool(False)) == "⊥"
    assert show_den(ev("[a:nat] a")) == "[a:nat] a :: <fun>"
