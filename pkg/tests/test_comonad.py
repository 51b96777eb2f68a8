import pytest

from boxcalc.comonad import (
    LAWS,
    boxdot_map,
    check_comonad_laws,
    comult_epsilon,
    corrupted_epsilon,
    counit_delta,
    default_arrows,
    default_probes,
    identity,
)
from boxcalc.denotation import DBox, DNat, ShapeMismatch, Verdict, den_eq, evaluate
from boxcalc.parser import parse_term, parse_type
from boxcalc.syntax import NAT, Arrow, O, alpha_eq


def inflated(s, r, v):
    """[][]s :: []r :: v"""
    return DBox(parse_term(f"box box ({s})"), DBox(parse_term(f"box ({r})"), v))


def test_counit_unquotes_one_level():
    d = inflated("plus 1 2", "5", DNat(7))
    out = counit_delta(d)
    assert alpha_eq(out.head, parse_term("box 5")) and out.tail == DNat(7)


def test_comultiplication_quotes_one_more_level():
    d = inflated("plus 1 2", "5", DNat(7))
    out = comult_epsilon(d)
    assert alpha_eq(out.head, parse_term("box box box (plus 1 2)"))
    assert out.tail is d


def test_functor_on_arrows():
    d = inflated("2", "4", DNat(9))
    succ_box = evaluate({}, parse_term("\\x:[]nat. let box X = x in box (succ X!)"))
    out = boxdot_map(succ_box, d)
    # the head is rebuilt from the syntax under the outer box, the tail from the old tail
    assert alpha_eq(out.head, parse_term("box box (succ 2)"))
    assert alpha_eq(out.tail.head, parse_term("box (succ 4)")) and out.tail.tail == DNat(10)


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        counit_delta(DBox(parse_term("box 0"), DNat(0)))
    with pytest.raises(ShapeMismatch):
        comult_epsilon(DNat(3))


@pytest.mark.parametrize("ty", [NAT, O, Arrow(NAT, NAT)])
def test_laws_hold(ty):
    probes = default_probes(ty, 60)
    assert len(probes) >= 50
    report = check_comonad_laws(ty, probes)
    assert report.ok, report.summary()
    assert set(report.checked) == set(LAWS)
    assert all(report.checked[law] >= 50 for law in LAWS)


def test_corrupted_comultiplication_breaks_counit_right():
    report = check_comonad_laws(NAT, default_probes(NAT, 60), epsilon=corrupted_epsilon)
    assert not report.passed("counit-right")


def test_default_arrows_are_endomaps():
    d = default_probes(NAT, 1)[0]
    for f in default_arrows(NAT):
        y = f(counit_delta(d))
        assert isinstance(y, DBox) and y.arity == 0


def test_identity_lifts_to_identity():
    d = inflated("times 2 3", "1", DNat(0))
    assert den_eq(boxdot_map(identity, d), d, parse_type("[][]nat")) is Verdict.EQUAL


def test_summary_lists_laws_in_order():
    report = check_comonad_laws(O, default_probes(O, 5))
    text = report.summary()
    assert text.startswith("comonad laws at o: counit-left: 5/5")
    assert text.index("coassociativity") < text.index("naturality-epsilon")
