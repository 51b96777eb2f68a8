import pytest
from hypothesis import given, settings
from strategies import typed_terms

from boxcalc.corpus import corpus_entries, instances
from boxcalc.parser import ParseError, parse_program, parse_term, parse_type
from boxcalc.syntax import (
    NAT,
    App,
    Atom,
    Const,
    CtxBox,
    CtxBoxIntro,
    Ext,
    Lam,
    LetBox,
    O,
    TBase,
    Unknown,
    alpha_eq,
    numeral,
    print_term,
)


def test_negation_transformer():
    t = parse_term("\\a:[]o. let box X = a in box (neg X!)")
    a, x = Atom("a"), Unknown("X")
    assert t == Lam(a, CtxBox((), O), LetBox(x, a, CtxBoxIntro((), App(Const("neg"), Ext(x)))))


def test_contextual_box():
    assert parse_term("[b:nat] 1") == CtxBoxIntro(((Atom("b"), NAT),), App(Const("succ"), Const("zero")))


def test_unclosed_argument_list():
    with pytest.raises(ParseError) as err:
        parse_term("X@(a, b")
    assert (err.value.line, err.value.col) == (1, 8)
    assert ")" in err.value.expected


@pytest.mark.parametrize(
    "src, line, col",
    [
        ("\\a nat. a", 1, 4),
        ("let box x = box 0 in x", 1, 9),
        ("plus 1\n  )", 2, 3),
        ("\\box:nat. 1", 1, 2),
        ("[a:nat, a:nat] a", 1, 1),
        ("1 # 2", 1, 3),
    ],
)
def test_errors_carry_position(src, line, col):
    with pytest.raises(ParseError) as err:
        parse_term(src)
    assert (err.value.line, err.value.col) == (line, col)


def test_application_is_left_associative():
    assert parse_term("f a b") == App(App(Atom("f"), Atom("a")), Atom("b"))


def test_box_is_a_tight_prefix():
    # box binds tighter than application
    assert parse_term("f box a b") == App(App(Atom("f"), CtxBoxIntro((), Atom("a"))), Atom("b"))
    assert parse_term("box \\a:nat. a") == CtxBoxIntro((), Lam(Atom("a"), NAT, Atom("a")))


def test_binders_extend_right():
    t = parse_term("\\a:nat. plus a a")
    assert isinstance(t, Lam) and isinstance(t.body, App)
    t = parse_term("f \\a:nat. a")
    assert t == App(Atom("f"), Lam(Atom("a"), NAT, Atom("a")))


def test_annotations_must_touch_the_constant():
    annotated = parse_term("isapp[[]nat] (box 0)")
    assert annotated.fun == Const("isapp", CtxBox((), NAT))
    # a separated bracket is a contextual box argument
    spaced = parse_term("natrec [a:nat] a")
    assert spaced == App(Const("natrec"), CtxBoxIntro(((Atom("a"), NAT),), Atom("a")))


def test_isapp_annotation_is_a_box_type():
    with pytest.raises(ParseError):
        parse_term("isapp[nat]")


def test_types():
    assert parse_type("A -> B -> A") == parse_type("A -> (B -> A)")
    assert parse_type("[nat, o]nat -> o") == parse_type("([nat, o]nat) -> o")
    assert parse_type("[]A") == CtxBox((), TBase("A"))
    with pytest.raises(ParseError):
        parse_type("nat ->")


def test_numerals_and_comments():
    assert parse_term("3 -- three\n") == numeral(3)


def test_program_inlines_earlier_definitions():
    defs = parse_program(
        """
        def one : nat = 1;
        def two : nat = plus one one;   -- uses one
        def Big : nat = two;
        """
    )
    assert [d.name for d in defs] == ["one", "two", "Big"]
    assert defs[1].term == App(App(Const("plus"), numeral(1)), numeral(1))
    assert defs[2].line == 4


def test_program_rejects_duplicates():
    with pytest.raises(ParseError, match="duplicate"):
        parse_program("def a : nat = 1; def a : nat = 2;")


def test_program_inlining_avoids_capture():
    defs = parse_program("def k : nat = 1; def f : nat -> nat = \\one:nat. plus k one;")
    assert alpha_eq(defs[1].term, parse_term("\\b:nat. plus 1 b"))


def test_corpus_round_trips():
    for e in list(corpus_entries()) + list(instances(2)):
        assert alpha_eq(parse_term(print_term(e.term)), e.term), e.name


@settings(max_examples=300)
@given(typed_terms())
def test_print_parse_round_trip(sample):
    _, t, _ = sample
    assert alpha_eq(parse_term(print_term(t)), t)
