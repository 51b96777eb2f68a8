"""The acceptance criteria, one test per criterion. A summary line per
criterion is printed at the end of the run."""

import random
import time

import pytest

from boxcalc.comonad import check_comonad_laws, corrupted_epsilon, default_probes
from boxcalc.corpus import (
    applied,
    axiom_4,
    axiom_t,
    corpus_entries,
    instances,
    shapely_boxes,
    t_four_inputs,
    unpack,
)
from boxcalc.denotation import (
    DEFAULT_BUDGET,
    DBox,
    DNat,
    Shapeliness,
    Verdict,
    curry_tail,
    den_eq,
    evaluate,
    hd,
    shapely,
    tl,
)
from boxcalc.parser import parse_term
from boxcalc.propcheck import GenConfig, Generator, case_seed, run_suite
from boxcalc.reduction import Status, normalize, step_all
from boxcalc.syntax import (
    NAT,
    Arrow,
    CtxBox,
    CtxBoxIntro,
    O,
    alpha_eq,
    app,
    arrows,
    numeral_value,
)
from boxcalc.typecheck import BoxOpenBody, typecheck

MODES = ("modal", "contextual")


@pytest.mark.criterion(1, "worked let box denotation")
def test_worked_letbox_denotation():
    start = time.perf_counter()
    got = evaluate({}, parse_term("let box X = box (plus 1 2) in box box X@()"))
    elapsed = time.perf_counter() - start
    assert isinstance(got, DBox) and isinstance(got.tail, DBox)
    assert alpha_eq(got.head, parse_term("box box (plus 1 2)"))
    assert alpha_eq(got.tail.head, parse_term("box (plus 1 2)"))
    assert got.tail.tail == DNat(3)
    assert elapsed < 1.0


@pytest.mark.criterion(2, "modal exp 2")
def test_modal_exp():
    want = parse_term("box (\\b:nat. times b ((\\b:nat. times b ((\\b:nat. 1) b)) b))")
    d = evaluate({}, applied("exp", 2))
    assert alpha_eq(hd(d), want)
    assert all(tl(d)(DNat(k)) == DNat(k * k) for k in range(9))
    report = normalize(applied("exp", 2))
    assert report.status is Status.NORMAL and alpha_eq(report.result, want)


@pytest.mark.criterion(3, "contextual exp 2")
def test_contextual_exp():
    d = evaluate({}, applied("exp_c", 2))
    assert alpha_eq(hd(d), parse_term("[b:nat] times b (times b 1)"))
    assert all(tl(d)((DNat(k),)) == DNat(k * k) for k in range(9))
    assert [s for s in step_all(hd(d).body) if s.rule == "beta"] == []


@pytest.mark.criterion(4, "axiom terms and T/4 behaviour")
def test_axiom_terms():
    names = set()
    for e in list(corpus_entries()) + list(instances(3)):
        assert e.check() == e.ty, e.name
        names.add(e.name)
    assert {"T", "4", "K", "f", "g", "unpack", "4_ctx", "K_ctx", "weaken", "contract", "exchange"} <= names
    t, four = evaluate({}, axiom_t(NAT).term), evaluate({}, axiom_4(NAT).term)
    inputs = t_four_inputs()
    assert len(inputs) == 20
    for x in inputs:
        assert t(x) == x.tail
        assert four(x) == DBox(CtxBoxIntro((), x.head), x)


@pytest.mark.criterion(5, "open box rejected, reifyNat 0..20")
def test_open_box_and_reify():
    with pytest.raises(BoxOpenBody):
        typecheck({}, parse_term("\\a:o. box a"))
    for n in range(21):
        d = evaluate({}, applied("reifyNat", n))
        assert isinstance(d, DBox) and d.tail == DNat(n)
        body = normalize(d.head.body)
        assert body.status is Status.NORMAL and numeral_value(body.result) == n


PROPERTY_SUITES = (
    "weakening",
    "subst-typing-atoms",
    "subst-typing-unknowns",
    "fa-theta",
    "subject-reduction",
    "soundness",
    "relevance",
    "letbox-clause",
    "subst-denotation-exchange",
)


@pytest.mark.criterion(6, "property suites, 1000 cases, both modes")
def test_property_suites():
    start = time.perf_counter()
    failed = []
    for mode in MODES:
        cfg = GenConfig(seed=1, max_size=40, mode=mode)
        for name in PROPERTY_SUITES:
            report = run_suite(name, 1000, cfg)
            failed += [(mode, f) for f in report.failures]
    elapsed = time.perf_counter() - start
    assert failed == []
    assert elapsed < 300


def _closed_terms(mode, n):
    cfg = GenConfig(seed=1, max_size=40, mode=mode)
    for i in range(n):
        gen = Generator(random.Random(case_seed(cfg.seed, i)), cfg)
        ty = gen.type()
        yield gen.term({}, ty), ty


@pytest.mark.criterion(7, "reduction soundness on 500 closed terms")
@pytest.mark.parametrize("mode", MODES)
def test_reduction_soundness(mode):
    steps = 0
    for t, ty in _closed_terms(mode, 500):
        assert typecheck({}, t, mode) == ty
        before = evaluate({}, t)
        for s in step_all(t):
            steps += 1
            assert den_eq(before, evaluate({}, s.result), ty, DEFAULT_BUDGET) is not Verdict.UNEQUAL, s
    assert steps > 500
    assert run_suite("reduction-soundness", 500, GenConfig(seed=1, mode=mode)).ok


@pytest.mark.criterion(8, "shapeliness")
def test_shapeliness():
    for mode in MODES:
        for t, ty in _closed_terms(mode, 500):
            assert shapely(evaluate({}, t), ty) is not Shapeliness.NOT_SHAPELY, t
    assert shapely(DBox(parse_term("box 0"), DNat(1)), CtxBox((), NAT)) is Shapeliness.NOT_SHAPELY
    boxes = shapely_boxes()[:50]
    assert len(boxes) == 50
    for x, ty in boxes:
        u = evaluate({}, app(unpack(ty.ctx, ty.body).term, x.head))
        assert den_eq(curry_tail(x), u, arrows(*ty.ctx, ty.body), DEFAULT_BUDGET) is not Verdict.UNEQUAL


@pytest.mark.criterion(9, "comonad laws and mutation self-test")
def test_comonad_laws():
    for ty in (NAT, O, Arrow(NAT, NAT)):
        report = check_comonad_laws(ty, default_probes(ty, 200))
        assert report.ok, report.summary()
        assert min(report.checked.values()) >= 50, report.summary()
    broken = check_comonad_laws(NAT, default_probes(NAT, 50), epsilon=corrupted_epsilon)
    assert not broken.passed("counit-right")
