"""The comonad on box denotations and executable checks of its laws.

An arrow from ``A`` to ``B`` in the underlying category is a function from
box values at ``[]A`` to box values at ``[]B``. The functor sends ``A`` to
``[]A``; its counit ``delta`` unquotes one level and its comultiplication
``epsilon`` quotes one more.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from .denotation import (
    DEFAULT_BUDGET,
    DBox,
    Den,
    ProbeBudget,
    ShapeMismatch,
    Verdict,
    den_eq,
    evaluate,
    sample_terms,
)
from .parser import parse_term
from .syntax import (
    NAT,
    Arrow,
    CtxBox,
    CtxBoxIntro,
    O,
    Term,
    Type,
    app,
    numeral,
    print_type,
)

Arrow_ = Callable[[Den], Den]


def _outer(x: Den) -> tuple[Term, DBox]:
    """Split a doubly boxed value into the syntax under its outer box and its
    tail."""
    if not isinstance(x, DBox) or x.arity != 0:
        raise ShapeMismatch("expected a value at a doubly boxed type")
    inner = x.head.body
    if not isinstance(inner, CtxBoxIntro) or inner.binders or not isinstance(x.tail, DBox):
        raise ShapeMismatch("expected a value at a doubly boxed type")
    return inner, x.tail


def counit_delta(x: Den) -> Den:
    """``[][]r :: y  |->  y``"""
    _outer(x)
    return x.tail


def comult_epsilon(x: Den) -> Den:
    """``[][]r :: y  |->  [][][]r :: [][]r :: y``"""
    _outer(x)
    return DBox(CtxBoxIntro((), x.head), x)


def boxdot_map(f: Arrow_, x: Den) -> Den:
    """The functor on arrows: ``[]t :: y  |->  []hd(f(eval t)) :: f(y)``.

    For ``t = []s`` the value ``eval t`` is ``[]s :: eval s``."""
    inner, tail = _outer(x)
    image = f(evaluate({}, inner))
    if not isinstance(image, DBox):
        raise ShapeMismatch("arrow did not return a box value")
    return DBox(CtxBoxIntro((), image.head), f(tail))


def lift(f: Arrow_) -> Arrow_:
    return lambda x: boxdot_map(f, x)


def compose(g: Arrow_, f: Arrow_) -> Arrow_:
    return lambda x: g(f(x))


def identity(x: Den) -> Den:
    return x


def _boxes(ty: Type, n: int) -> Type:
    for _ in range(n):
        ty = CtxBox((), ty)
    return ty


@dataclass
class LawReport:
    ty: Type
    checked: dict[str, int] = field(default_factory=dict)
    failures: dict[str, list[int]] = field(default_factory=dict)

    def record(self, law: str, index: int, verdict: Verdict) -> None:
        self.checked[law] = self.checked.get(law, 0) + 1
        if verdict is Verdict.UNEQUAL:
            self.failures.setdefault(law, []).append(index)

    def passed(self, law: str) -> bool:
        return self.checked.get(law, 0) > 0 and not self.failures.get(law)

    @property
    def ok(self) -> bool:
        return all(self.passed(law) for law in self.checked)

    def summary(self) -> str:
        rows = [
            f"{law}: {self.checked[law] - len(self.failures.get(law, []))}/{self.checked[law]}"
            for law in LAWS
            if law in self.checked
        ]
        return f"comonad laws at {print_type(self.ty)}: " + ", ".join(rows)


LAWS = (
    "counit-left",
    "counit-right",
    "coassociativity",
    "functor-id",
    "functor-comp",
    "naturality-delta",
    "naturality-epsilon",
)


def check_comonad_laws(
    ty: Type,
    probes: Sequence[Den],
    arrows: Sequence[Arrow_] | None = None,
    *,
    delta: Arrow_ = counit_delta,
    epsilon: Arrow_ = comult_epsilon,
    budget: ProbeBudget = DEFAULT_BUDGET,
) -> LawReport:
    """Check every law on every probe at ``[][]ty``. Arrows are endomaps of
    box values at ``[]ty``; compositions are checked for each ordered pair."""
    arrows = default_arrows(ty) if arrows is None else list(arrows)
    t1, t2, t3, t4 = (_boxes(ty, k) for k in (1, 2, 3, 4))
    report = LawReport(ty)

    def eq(law, i, lhs, rhs, at):
        report.record(law, i, den_eq(lhs, rhs, at, budget))

    for i, d in enumerate(probes):
        e = epsilon(d)
        eq("counit-left", i, delta(e), d, t2)
        eq("counit-right", i, boxdot_map(delta, e), d, t2)
        eq("coassociativity", i, boxdot_map(epsilon, e), epsilon(e), t4)
        eq("functor-id", i, boxdot_map(identity, d), d, t2)
        for f in arrows:
            fd = boxdot_map(f, d)
            eq("naturality-delta", i, f(delta(d)), delta(fd), t1)
            eq("naturality-epsilon", i, epsilon(fd), boxdot_map(lift(f), e), t3)
        for f, g in itertools.product(arrows, repeat=2):
            eq("functor-comp", i, boxdot_map(compose(g, f), d), boxdot_map(g, boxdot_map(f, d)), t2)
    return report


def corrupted_epsilon(x: Den) -> Den:
    """A wrong comultiplication: the middle layer is rebuilt from the head,
    discarding the original tail."""
    _outer(x)
    return DBox(CtxBoxIntro((), x.head), evaluate({}, x.head))


# ----------------------------------------------------------------------
# Default probes and arrows

_ENDO = {
    NAT: ("let box X = x in box (plus X! 1)", "box 0"),
    O: ("let box X = x in box (neg X!)", "box top"),
    Arrow(NAT, NAT): ("let box X = x in box (\\n:nat. X! (succ n))", "box succ"),
}


def default_arrows(ty: Type) -> list[Arrow_]:
    """Endomaps of ``[]ty`` given as denotations of closed terms."""
    src = print_type(CtxBox((), ty))
    bodies = ["x", "let box X = x in box X!", *_ENDO.get(ty, ())]
    return [evaluate({}, parse_term(f"\\x:{src}. {b}")) for b in bodies]


def _pool(ty: Type) -> list[Term]:
    pool = sample_terms(ty)
    if ty == NAT:
        pool += [numeral(2), app(parse_term("times"), numeral(2), numeral(3))]
    elif ty == O:
        pool += [parse_term("and top bot"), parse_term("neg bot")]
    elif ty == Arrow(NAT, NAT):
        pool += [parse_term("\\p:nat. plus p 2")]
    return pool


def default_probes(ty: Type, limit: int = 200) -> list[Den]:
    """Inflated values ``[][]s :: []r :: v`` where ``s``, ``r`` and the
    closed term behind ``v`` range independently over a pool of terms."""
    pool = _pool(ty)
    vals = [evaluate({}, t) for t in pool]
    out = []
    for s, r, v in itertools.product(pool, pool, vals):
        inner = DBox(CtxBoxIntro((), r), v)
        out.append(DBox(CtxBoxIntro((), CtxBoxIntro((), s)), inner))
        if len(out) >= limit:
            break
    return out
