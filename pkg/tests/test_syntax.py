import random

import pytest
from hypothesis import given
from strategies import typed_terms

from boxcalc.parser import parse_term, parse_type
from boxcalc.propcheck import rename_bound
from boxcalc.syntax import (
    NAT,
    App,
    Arrow,
    Atom,
    Const,
    CtxBox,
    CtxBoxIntro,
    Ext,
    Lam,
    O,
    TBase,
    Unknown,
    alpha_eq,
    free_atoms,
    free_unknowns,
    fresh_name,
    numeral,
    numeral_value,
    print_term,
    print_type,
)
from boxcalc.typecheck import typecheck

A = TBase("A")


def atoms(*names):
    return frozenset(Atom(n) for n in names)


def unknowns(*names):
    return frozenset(Unknown(n) for n in names)


@pytest.mark.parametrize(
    "src, fa",
    [
        ("\\a:nat. a", atoms()),
        ("X@(b)", atoms("b")),
        ("let box X = box b in X@()", atoms("b")),
        ("[a:nat, b:o] plus a c", atoms("c")),
        ("\\a:nat. a b", atoms("b")),
    ],
)
def test_free_atoms(src, fa):
    assert free_atoms(parse_term(src)) == fa


@pytest.mark.parametrize(
    "src, fv",
    [
        ("let box X = box 0 in X@()", unknowns()),
        ("X@(Y@())", unknowns("X", "Y")),
        ("\\a:o. a", unknowns()),
        ("let box X = X! in Y@(X!)", unknowns("X", "Y")),
    ],
)
def test_free_unknowns(src, fv):
    assert free_unknowns(parse_term(src)) == fv


@pytest.mark.parametrize(
    "s, t, equal",
    [
        ("\\a:A. a", "\\b:A. b", True),
        ("let box X = [a:A] a in X@(b)", "let box Y = [b:A] b in Y@(b)", True),
        ("\\b:A. [b:B] ((X@(b)) b)", "\\b:A. [a:B] ((X@(a)) b)", False),
        ("[a:nat, b:nat] a", "[b:nat, a:nat] b", True),
        ("[a:nat, b:nat] a", "[a:nat, b:nat] b", False),
        ("\\a:nat. b", "\\b:nat. b", False),
        ("let box X = box 0 in Y!", "let box Y = box 0 in Y!", False),
    ],
)
def test_alpha_eq(s, t, equal):
    assert alpha_eq(parse_term(s), parse_term(t)) is equal
    assert alpha_eq(parse_term(t), parse_term(s)) is equal


def test_unknown_and_atom_namespaces_are_disjoint():
    with pytest.raises(ValueError):
        Atom("X")
    with pytest.raises(ValueError):
        Unknown("x")
    assert Atom("a") != Unknown("A")


def test_box_binders_must_be_distinct():
    with pytest.raises(ValueError):
        CtxBoxIntro(((Atom("a"), NAT), (Atom("a"), O)), Atom("a"))


def test_isapp_annotation_must_be_a_box_type():
    with pytest.raises(ValueError):
        Const("isapp", NAT)


def test_numerals():
    assert numeral(0) == Const("zero")
    assert numeral(2) == App(Const("succ"), App(Const("succ"), Const("zero")))
    assert numeral_value(numeral(17)) == 17
    assert numeral_value(Atom("a")) is None


def test_fresh_name_takes_least_free_suffix():
    assert fresh_name("a", {"b"}) == "a"
    assert fresh_name("a", {"a"}) == "a1"
    assert fresh_name("a", {"a", "a1", "a2"}) == "a3"
    assert fresh_name("a2", {"a2", "a1"}) == "a3"


@pytest.mark.parametrize(
    "term, text",
    [
        (CtxBoxIntro((), App(App(Const("plus"), numeral(1)), numeral(2))), "box (plus 1 2)"),
        (parse_term("\\a:[]A. let box X = a in X@()"), "\\a:[]A. let box X = a in X@()"),
        (Lam(Atom("a"), A, Atom("a")), "\\a:A. a"),
        (parse_term("box box (plus 1 2)"), "box box (plus 1 2)"),
        (parse_term("[b:nat] 1"), "[b:nat] 1"),
        (Ext(Unknown("X"), (Atom("a"), numeral(0))), "X@(a, 0)"),
        (parse_term("natrec[[]nat] (box 0)"), "natrec[[]nat] (box 0)"),
        (parse_term("f (\\a:nat. a) b"), "f (\\a:nat. a) b"),
    ],
)
def test_print_term(term, text):
    assert print_term(term) == text


@pytest.mark.parametrize(
    "ty, text",
    [
        (Arrow(Arrow(NAT, NAT), NAT), "(nat -> nat) -> nat"),
        (Arrow(NAT, Arrow(NAT, NAT)), "nat -> nat -> nat"),
        (CtxBox((NAT, O), Arrow(NAT, O)), "[nat, o](nat -> o)"),
        (CtxBox((), CtxBox((), A)), "[][]A"),
        (Arrow(CtxBox((), A), A), "[]A -> A"),
    ],
)
def test_print_type_round_trips(ty, text):
    assert print_type(ty) == text
    assert parse_type(text) == ty


@given(typed_terms())
def test_alpha_invariance_of_free_names_and_typing(sample):
    ctx, t, ty = sample
    renamed = rename_bound(t, random.Random(0))
    assert alpha_eq(t, renamed)
    assert free_atoms(t) == free_atoms(renamed)
    assert free_unknowns(t) == free_unknowns(renamed)
    assert typecheck(ctx, renamed) == typecheck(ctx, t) == ty
