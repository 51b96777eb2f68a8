"""Inflated set-theoretic semantics.

A value of box type ``[A1..An]A`` is a pair ``head :: tail`` of closed boxed
syntax and a purported denotation for it (a function of ``n`` arguments when
``n > 0``). Nothing forces the two to agree; ``shapely`` checks whether they
do.

Function values are Python closures, so equality and shapeliness at function
types are decided by probing: ``UNEQUAL``/``NOT_SHAPELY`` are definitive,
while agreement on every probe over an infinite domain is reported as
``INDETERMINATE``.
"""

from __future__ import annotations

import contextlib
import enum
import itertools
from collections.abc import Callable, Iterator, Mapping
from dataclasses import dataclass, field

from .substitution import UnknownSubst, subst_unknowns
from .syntax import (
    NAT,
    App,
    Arrow,
    Atom,
    Const,
    CtxBox,
    CtxBoxIntro,
    Ext,
    Lam,
    LetBox,
    Name,
    Nat,
    O,
    TBase,
    Term,
    Truth,
    Type,
    Unknown,
    alpha_eq,
    app,
    free_atoms,
    free_unknowns,
    numeral,
    print_term,
    print_type,
)
from .typecheck import has_type

# ----------------------------------------------------------------------
# Values


class Den:
    __slots__ = ()

    def __str__(self):
        return show_den(self)


@dataclass(frozen=True)
class DBool(Den):
    value: bool


@dataclass(frozen=True)
class DNat(Den):
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("naturals are non-negative")


@dataclass(frozen=True, eq=False)
class DFun(Den):
    fn: Callable[[Den], Den]
    label: str = "<fun>"

    def __call__(self, x: Den) -> Den:
        return self.fn(x)


TRUE = DBool(True)
FALSE = DBool(False)

Tail = Den | Callable[[tuple[Den, ...]], Den]


@dataclass(frozen=True)
class DBox(Den):
    """``head :: tail``. For a head binding ``n > 0`` atoms the tail is a
    function of an ``n``-tuple; otherwise it is a single value."""

    head: CtxBoxIntro
    tail: Tail
    ty: CtxBox | None = field(default=None, compare=False)

    def __post_init__(self):
        if not isinstance(self.head, CtxBoxIntro):
            raise ValueError(f"box head must be boxed syntax, got {self.head}")
        if free_atoms(self.head) or free_unknowns(self.head):
            raise ValueError(f"box head must be closed: {print_term(self.head)}")
        if self.arity == 0:
            if not isinstance(self.tail, Den):
                raise ValueError("tail of an empty-context box is a value")
        elif not callable(self.tail) or isinstance(self.tail, Den):
            raise ValueError("tail of a contextual box is a function of a tuple")
        if self.ty is not None and not has_type({}, self.head, self.ty):
            raise ValueError(f"head {print_term(self.head)} does not have type {print_type(self.ty)}")

    @property
    def arity(self) -> int:
        return len(self.head.binders)

    def apply_tail(self, args: tuple[Den, ...]) -> Den:
        if len(args) != self.arity:
            raise ArityMismatch(f"box expects {self.arity} arguments, got {len(args)}")
        return self.tail if self.arity == 0 else self.tail(tuple(args))


def show_den(x: Den) -> str:
    match x:
        case DBool(v):
            return "⊤" if v else "⊥"
        case DNat(n):
            return str(n)
        case DBox(head, tail):
            rest = show_den(tail) if isinstance(tail, Den) else "<fun>"
            return f"{print_term(head)} :: {rest}"
        case DFun():
            return x.label
    return repr(x)


class Marker(enum.Enum):
    NOT_BOX = "not a box"
    UNDEFINED = "undefined"


NOT_BOX = Marker.NOT_BOX
UNDEFINED = Marker.UNDEFINED


def hd(x: Den) -> CtxBoxIntro | Marker:
    return x.head if isinstance(x, DBox) else NOT_BOX


def tl(x: Den) -> Tail | Marker:
    return x.tail if isinstance(x, DBox) else UNDEFINED


# ----------------------------------------------------------------------
# Valuations

Valuation = Mapping[Name, Den]


class EvalError(Exception):
    pass


class UnboundName(EvalError):
    pass


class NotApplicable(EvalError):
    pass


class NotABox(EvalError):
    pass


class ArityMismatch(EvalError):
    pass


class MalformedValuation(EvalError):
    pass


class ShapeMismatch(ValueError):
    pass


def valuation_unknowns(val: Valuation) -> UnknownSubst:
    """The unknowns-substitution sending each unknown to the head of its value."""
    out = {}
    for k, v in val.items():
        if isinstance(k, Unknown):
            if not isinstance(v, DBox):
                raise MalformedValuation(f"{k} is mapped to a non-box value {show_den(v)}")
            out[k] = v.head
    return UnknownSubst(out)


def in_denotation(x: Den, ty: Type) -> bool:
    """Whether ``x`` is an element of the interpretation of ``ty``.

    Function values are only checked to be functions; their graph cannot be
    inspected."""
    match ty:
        case Truth():
            return isinstance(x, DBool)
        case Nat():
            return isinstance(x, DNat)
        case Arrow():
            return isinstance(x, DFun)
        case CtxBox(ctx, body):
            if not isinstance(x, DBox) or x.arity != len(ctx):
                return False
            if not has_type({}, x.head, ty):
                return False
            return in_denotation(x.tail, body) if not ctx else callable(x.tail)
        case TBase():
            return False
    return False


def check_valuation(ctx: Mapping[Name, Type], val: Valuation) -> bool:
    """The judgment ``ctx |- val``."""
    if set(ctx) != set(val):
        return False
    for k, ty in ctx.items():
        if isinstance(k, Unknown) and not isinstance(ty, CtxBox):
            return False
        if not in_denotation(val[k], ty):
            return False
    return True


# ----------------------------------------------------------------------
# Constants


def _nat(x: Den) -> int:
    if not isinstance(x, DNat):
        raise NotApplicable(f"expected a natural, got {show_den(x)}")
    return x.value


def _bool(x: Den) -> bool:
    if not isinstance(x, DBool):
        raise NotApplicable(f"expected a truth value, got {show_den(x)}")
    return x.value


def _apply(f: Den, x: Den) -> Den:
    if not isinstance(f, DFun):
        raise NotApplicable(f"cannot apply {show_den(f)}")
    return f.fn(x)


def _isapp(x: Den) -> Den:
    if not isinstance(x, DBox):
        raise NotABox(f"isapp expects a box, got {show_den(x)}")
    return DBool(isinstance(x.head.body, App))


def _natrec(z: Den) -> Den:
    def with_step(s: Den) -> Den:
        def run(n: Den) -> Den:
            acc = z
            for k in range(_nat(n)):
                acc = _apply(_apply(s, DNat(k)), acc)
            return acc

        return DFun(run, "<natrec>")

    return DFun(with_step, "<natrec>")


def _curry2(op, conv, wrap, label):
    return DFun(lambda x: DFun(lambda y: wrap(op(conv(x), conv(y))), label), label)


CONSTANTS: dict[str, Den] = {
    "top": TRUE,
    "bot": FALSE,
    "zero": DNat(0),
    "succ": DFun(lambda x: DNat(_nat(x) + 1), "<succ>"),
    "plus": _curry2(lambda a, b: a + b, _nat, DNat, "<plus>"),
    "times": _curry2(lambda a, b: a * b, _nat, DNat, "<times>"),
    "neg": DFun(lambda x: DBool(not _bool(x)), "<neg>"),
    "and": _curry2(lambda a, b: a and b, _bool, DBool, "<and>"),
    "isapp": DFun(_isapp, "<isapp>"),
    "natrec": DFun(_natrec, "<natrec>"),
}




@contextlib.contextmanager
def patched_constants(overrides: Mapping[str, Den]) -> Iterator[None]:
    """Temporarily replace the meaning of some constants. Only for harness
    self-tests; not thread-safe."""
    saved = {k: CONSTANTS[k] for k in overrides}
    CONSTANTS.update(overrides)
    try:
        yield
    finally:
        CONSTANTS.update(saved)


# ----------------------------------------------------------------------
# Evaluation


def evaluate(val: Valuation, t: Term) -> Den:
    """The denotation of ``t`` under ``val``."""
    match t:
        case Const(name):
            return CONSTANTS[name]
        case Atom():
            try:
                return val[t]
            except KeyError:
                raise UnboundName(f"atom {t.name} has no value") from None
        case Lam(a, _, body):
            return DFun(lambda x: evaluate({**val, a: x}, body))
        case App(f, x):
            return _apply(evaluate(val, f), evaluate(val, x))
        case CtxBoxIntro(binders, body):
            head = CtxBoxIntro(binders, subst_unknowns(body, _heads(val, free_unknowns(body))))
            if not binders:
                return DBox(head, evaluate(val, body))
            atoms = tuple(a for a, _ in binders)

            def tail(xs: tuple[Den, ...]) -> Den:
                return evaluate({**val, **dict(zip(atoms, xs))}, body)

            return DBox(head, tail)
        case Ext(x, args):
            box = val.get(x)
            if box is None:
                raise UnboundName(f"unknown {x} has no value")
            if not isinstance(box, DBox):
                raise NotABox(f"{x} is mapped to a non-box value")
            return box.apply_tail(tuple(evaluate(val, r) for r in args))
        case LetBox(x, s, r):
            bound = evaluate(val, s)
            if not isinstance(bound, DBox):
                raise NotABox(f"let box binds non-box value {show_den(bound)}")
            return evaluate({**val, x: bound}, r)
    raise TypeError(f"not a term: {t!r}")


def _heads(val: Valuation, unknowns) -> UnknownSubst:
    out = {}
    for x in unknowns:
        v = val.get(x)
        if v is None:
            raise UnboundName(f"unknown {x} has no value")
        if not isinstance(v, DBox):
            raise NotABox(f"{x} is mapped to a non-box value")
        out[x] = v.head
    return UnknownSubst(out)


def curry_tail(x: DBox) -> Den:
    """The tail of a box as a curried function value (the tail itself when
    the box binds nothing)."""
    if x.arity == 0:
        return x.tail

    def build(done: tuple[Den, ...]) -> Den:
        if len(done) == x.arity:
            return x.tail(done)
        return DFun(lambda y: build(done + (y,)))

    return build(())


# ----------------------------------------------------------------------
# Probing


class Verdict(enum.Enum):
    EQUAL = "equal"
    UNEQUAL = "unequal"
    INDETERMINATE = "indeterminate"  # every probe agreed, domain not exhausted


class Shapeliness(enum.Enum):
    SHAPELY = "shapely"
    NOT_SHAPELY = "not shapely"
    INDETERMINATE = "indeterminate"  # no probe refuted it, domain not exhausted


@dataclass(frozen=True)
class ProbeBudget:
    nat_probes: tuple[int, ...] = tuple(range(9))
    fun_probe_depth: int = 2
    box_probe_corpus: Mapping[Type, tuple[Term, ...]] = field(default_factory=dict, hash=False)
    max_tuples: int = 64
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if not self.nat_probes:
            raise ValueError("need at least one nat probe")


DEFAULT_BUDGET = ProbeBudget()


def sample_terms(ty: Type, depth: int = 2) -> list[Term]:
    """A small deterministic list of closed terms of type ``ty``."""
    match ty:
        case Truth():
            return [Const("top"), Const("bot"), app(Const("neg"), Const("top"))]
        case Nat():
            return [numeral(0), numeral(1), app(Const("plus"), numeral(1), numeral(2)), numeral(3)]
        case Arrow(d, c):
            a = Atom("p" if depth else "q")
            out: list[Term] = []
            if d == c:
                out.append(Lam(a, d, a))
            if d == NAT and c == NAT:
                out += [Const("succ"), Lam(a, NAT, app(Const("times"), a, a))]
            if d == O and c == O:
                out.append(Const("neg"))
            if depth > 0:
                out += [Lam(a, d, r) for r in sample_terms(c, depth - 1)[:2]]
            return out
        case CtxBox(ctx, body):
            binders = tuple((Atom(f"x{i}"), t) for i, t in enumerate(ctx))
            bodies = [a for a, t in binders if t == body]
            if body == NAT and bodies:
                bodies.append(app(Const("plus"), bodies[0], numeral(1)))
            if depth > 0:
                bodies += sample_terms(body, depth - 1)
            return [CtxBoxIntro(binders, b) for b in bodies]
    return []


def probe_values(ty: Type, budget: ProbeBudget = DEFAULT_BUDGET, depth: int | None = None) -> tuple[list[Den], bool]:
    """Probe inputs at ``ty`` and whether they exhaust its interpretation.

    Every probe is shapely: probes are naturals, truth values, or
    denotations of closed terms."""
    depth = budget.fun_probe_depth if depth is None else depth
    key = (ty, depth)
    if key in budget._cache:
        return budget._cache[key]
    match ty:
        case Truth():
            out = ([TRUE, FALSE], True)
        case Nat():
            out = ([DNat(n) for n in budget.nat_probes], False)
        case _:
            terms = list(budget.box_probe_corpus.get(ty, ())) + sample_terms(ty, max(depth, 0))
            out = ([evaluate({}, t) for t in terms], False)
    budget._cache[key] = out
    return out


def _tuples(ctx: tuple[Type, ...], budget: ProbeBudget, depth: int):
    pools = []
    exhaustive = True
    for t in ctx:
        vals, ex = probe_values(t, budget, depth)
        pools.append(vals)
        exhaustive &= ex
    combos = list(itertools.islice(itertools.product(*pools), budget.max_tuples))
    total = 1
    for p in pools:
        total *= len(p)
    return combos, exhaustive and total <= budget.max_tuples


def _combine(verdicts, exhaustive: bool) -> Verdict:
    verdicts = list(verdicts)
    if Verdict.UNEQUAL in verdicts:
        return Verdict.UNEQUAL
    if exhaustive and all(v is Verdict.EQUAL for v in verdicts):
        return Verdict.EQUAL
    return Verdict.INDETERMINATE


def den_eq(x: Den, y: Den, ty: Type, budget: ProbeBudget = DEFAULT_BUDGET, depth: int | None = None) -> Verdict:
    """Compare two values of ``ty``."""
    depth = budget.fun_probe_depth if depth is None else depth
    match ty:
        case Truth():
            _expect(DBool, x, y, ty)
            return Verdict.EQUAL if x.value == y.value else Verdict.UNEQUAL
        case Nat():
            _expect(DNat, x, y, ty)
            return Verdict.EQUAL if x.value == y.value else Verdict.UNEQUAL
        case Arrow(d, c):
            _expect(DFun, x, y, ty)
            if x is y:
                return Verdict.EQUAL
            probes, exhaustive = probe_values(d, budget, depth - 1)
            verdicts = []
            for p in probes:
                v = den_eq(x(p), y(p), c, budget, depth)
                if v is Verdict.UNEQUAL:
                    return v
                verdicts.append(v)
            return _combine(verdicts, exhaustive)
        case CtxBox(ctx, body):
            _expect(DBox, x, y, ty)
            if x.arity != len(ctx) or y.arity != len(ctx):
                raise ShapeMismatch(f"box arity does not match {print_type(ty)}")
            if not alpha_eq(x.head, y.head):
                return Verdict.UNEQUAL
            if not ctx:
                return den_eq(x.tail, y.tail, body, budget, depth)
            combos, exhaustive = _tuples(ctx, budget, depth - 1)
            verdicts = []
            for xs in combos:
                v = den_eq(x.tail(xs), y.tail(xs), body, budget, depth)
                if v is Verdict.UNEQUAL:
                    return v
                verdicts.append(v)
            return _combine(verdicts, exhaustive)
    raise ShapeMismatch(f"no values at type {print_type(ty)}")


def _expect(cls, x, y, ty):
    if not isinstance(x, cls) or not isinstance(y, cls):
        raise ShapeMismatch(f"values do not have the shape of {print_type(ty)}")


def shapely(x: Den, ty: Type, budget: ProbeBudget = DEFAULT_BUDGET, depth: int | None = None) -> Shapeliness:
    """Whether the syntax inside ``x`` agrees with its purported denotation,
    pointwise through function types."""
    depth = budget.fun_probe_depth if depth is None else depth
    match ty:
        case Truth():
            _expect(DBool, x, x, ty)
            return Shapeliness.SHAPELY
        case Nat():
            _expect(DNat, x, x, ty)
            return Shapeliness.SHAPELY
        case Arrow(d, c):
            _expect(DFun, x, x, ty)
            probes, exhaustive = probe_values(d, budget, depth - 1)
            return _fold_shape((shapely(x(p), c, budget, depth) for p in probes), exhaustive)
        case CtxBox(ctx, body):
            _expect(DBox, x, x, ty)
            if x.arity != len(ctx):
                raise ShapeMismatch(f"box arity does not match {print_type(ty)}")
            honest = evaluate({}, x.head)
            agree = den_eq(x, honest, ty, budget, depth)
            if agree is Verdict.UNEQUAL:
                return Shapeliness.NOT_SHAPELY
            if not ctx:
                inner = shapely(x.tail, body, budget, depth)
                exhaustive = True
                parts = [inner]
            else:
                combos, exhaustive = _tuples(ctx, budget, depth - 1)
                parts = (shapely(x.tail(xs), body, budget, depth) for xs in combos)
            res = _fold_shape(parts, exhaustive)
            if res is Shapeliness.SHAPELY and agree is not Verdict.EQUAL:
                return Shapeliness.INDETERMINATE
            return res
    raise ShapeMismatch(f"no values at type {print_type(ty)}")


def _fold_shape(parts, exhaustive: bool) -> Shapeliness:
    seen_indeterminate = False
    for s in parts:
        if s is Shapeliness.NOT_SHAPELY:
            return s
        if s is Shapeliness.INDETERMINATE:
            seen_indeterminate = True
    if exhaustive and not seen_indeterminate:
        return Shapeliness.SHAPELY
    return Shapeliness.INDETERMINATE


def is_shapely_valuation(val: Valuation, ctx: Mapping[Name, Type], budget: ProbeBudget = DEFAULT_BUDGET) -> bool:
    return all(shapely(val[k], ctx[k], budget) is not Shapeliness.NOT_SHAPELY for k in ctx)
