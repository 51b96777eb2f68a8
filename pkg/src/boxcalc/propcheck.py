"""Random well-typed terms and valuations, and property suites over them.

Generation is type-directed: each typing rule read bottom-up is a way to
build a term of a requested type. A box body only sees the box's own
binders and the unknowns in scope, so generated boxes never have stray free
atoms. Every case draws from its own ``random.Random`` seeded from the
suite seed and the case index, so any failure can be replayed alone.
"""

from __future__ import annotations

import json
import random
import sys
from collections.abc import Callable, Iterator, Mapping
from dataclasses import dataclass, field, replace

from .comonad import check_comonad_laws, default_arrows
from .denotation import (
    DEFAULT_BUDGET,
    DBox,
    Den,
    DFun,
    ProbeBudget,
    Shapeliness,
    Valuation,
    Verdict,
    check_valuation,
    den_eq,
    evaluate,
    in_denotation,
    patched_constants,
    shapely,
    valuation_unknowns,
)
from .parser import parse_term
from .reduction import iter_steps, subterm_at
from .substitution import UnknownSubst, rename_unknown, subst_atoms, subst_unknowns
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
    Term,
    Truth,
    Type,
    Unknown,
    all_names,
    alpha_eq,
    app,
    free_atoms,
    free_unknowns,
    fresh_atom,
    fresh_unknown,
    numeral,
    print_term,
)
from .typecheck import Mode, TypingError, has_type, typecheck

ATOM_NAMES = ("a", "b", "c", "d")
UNKNOWN_NAMES = ("X", "Y", "Z")

DEFAULT_WEIGHTS = {
    "top": 1.0,
    "bot": 1.0,
    "zero": 1.0,
    "succ": 1.0,
    "plus": 1.0,
    "times": 0.5,
    "neg": 1.0,
    "and": 1.0,
    "isapp": 1.0,
    "natrec": 0.5,
}


class GenExhausted(Exception):
    """The generator could not build a term of the requested type."""


@dataclass(frozen=True)
class GenConfig:
    seed: int = 1
    max_size: int = 40
    type_depth: int = 2
    mode: Mode = "contextual"
    constant_weights: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))


def case_seed(seed: int, index: int) -> int:
    return seed * 1_000_003 + index


# ----------------------------------------------------------------------
# Generation


Ctx = dict[Name, Type]


class Generator:
    def __init__(self, rng: random.Random, cfg: GenConfig):
        self.rng = rng
        self.cfg = cfg
        self.contextual = cfg.mode == "contextual"

    # -- types

    def type(self, depth: int | None = None) -> Type:
        depth = self.cfg.type_depth if depth is None else depth
        r = self.rng.random()
        if depth <= 0 or r < 0.45:
            return self.rng.choice((O, NAT, NAT))
        if r < 0.7:
            return Arrow(self.type(depth - 1), self.type(depth - 1))
        return self.box_type(depth)

    def box_type(self, depth: int | None = None) -> CtxBox:
        depth = self.cfg.type_depth if depth is None else depth
        n = self.rng.choice((0, 0, 1, 1, 2)) if self.contextual else 0
        return CtxBox(tuple(self.type(depth - 2) for _ in range(n)), self.type(depth - 1))

    def context(self) -> Ctx:
        ctx: Ctx = {}
        for name in self.rng.sample(ATOM_NAMES, self.rng.randint(0, 3)):
            ctx[Atom(name)] = self.type(1)
        for name in self.rng.sample(UNKNOWN_NAMES, self.rng.randint(0, 2)):
            ctx[Unknown(name)] = self.box_type(2)
        return ctx

    # -- terms

    def term(self, ctx: Ctx, ty: Type, size: int | None = None) -> Term:
        size = self.rng.randint(1, self.cfg.max_size) if size is None else size
        return self._term(ctx, ty, size, 0)

    def _split(self, size: int, k: int) -> list[int]:
        budget = max(size - 1, k)
        cuts = sorted(self.rng.randint(0, budget) for _ in range(k - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [budget])]
        return [max(p, 1) for p in parts]

    def _weight(self, name: str) -> float:
        return self.cfg.constant_weights.get(name, 1.0)

    def _term(self, ctx: Ctx, ty: Type, size: int, loops: int) -> Term:
        if size <= 1:
            return self._small(ctx, ty)
        rng = self.rng
        options: list[tuple[float, Callable[[], Term]]] = []
        atoms = [a for a, t in ctx.items() if isinstance(a, Atom) and t == ty]
        for a in atoms:
            options.append((3.0 / len(atoms), lambda a=a: a))
        for x, t in ctx.items():
            if isinstance(x, Unknown) and t.body == ty and size > len(t.ctx):
                options.append((4.0, lambda x=x, t=t: self._ext(ctx, x, t, size, loops)))
        match ty:
            case Truth():
                options.append((self._weight("top"), lambda: Const("top")))
                options.append((self._weight("bot"), lambda: Const("bot")))
                options.append((self._weight("neg"), lambda: App(Const("neg"), self._term(ctx, O, size - 1, loops))))
                options.append((self._weight("isapp"), lambda: self._isapp(ctx, size, loops)))
                if size >= 3:
                    options.append((self._weight("and"), lambda: self._binop("and", O, ctx, size, loops)))
            case Nat():
                options.append((self._weight("zero"), lambda: numeral(rng.randint(0, 3))))
                options.append((self._weight("succ"), lambda: App(Const("succ"), self._term(ctx, NAT, size - 1, loops))))
                if size >= 3:
                    options.append((self._weight("plus"), lambda: self._binop("plus", NAT, ctx, size, loops)))
                    # products inside a recursor step could grow without bound
                    if not loops:
                        options.append((self._weight("times"), lambda: self._binop("times", NAT, ctx, size, loops)))
            case Arrow(d, c):
                options.append((4.0, lambda: self._lam(ctx, d, c, size, loops)))
            case CtxBox():
                options.append((4.0, lambda: self.box_intro(ctx, ty, size - 1, loops)))
        if size >= 3:
            options.append((2.0, lambda: self._app(ctx, ty, size, loops)))
            options.append((2.0, lambda: self._redex(ctx, ty, size, loops)))
            options.append((2.0, lambda: self._letbox(ctx, ty, size, loops)))
            if size >= 6 and loops < 1:
                options.append((self._weight("natrec"), lambda: self._natrec(ctx, ty, size, loops)))
        if not options:
            return self.leaf(ctx, ty)
        _, pick = rng.choices(options, [w for w, _ in options])[0]
        return pick()

    def _small(self, ctx: Ctx, ty: Type) -> Term:
        """A single-node term of type ``ty`` if there is one."""
        options: list[Term] = [a for a, t in ctx.items() if isinstance(a, Atom) and t == ty]
        options += [Ext(x) for x, t in ctx.items() if isinstance(x, Unknown) and t == CtxBox((), ty)]
        if ty == O:
            options += [Const("top"), Const("bot")]
        elif ty == NAT:
            options += [numeral(self.rng.randint(0, 3))]
        elif ty == Arrow(NAT, NAT):
            options += [Const("succ")]
        elif ty == Arrow(O, O):
            options += [Const("neg")]
        return self.rng.choice(options) if options else self.leaf(ctx, ty)

    def leaf(self, ctx: Ctx, ty: Type) -> Term:
        """A small term of type ``ty``; always succeeds for interpreted types."""
        atoms = [a for a, t in ctx.items() if isinstance(a, Atom) and t == ty]
        if atoms:
            return self.rng.choice(atoms)
        match ty:
            case Truth():
                return Const(self.rng.choice(("top", "bot")))
            case Nat():
                return numeral(self.rng.randint(0, 2))
            case Arrow(d, c):
                a = Atom(self.rng.choice(ATOM_NAMES))
                return Lam(a, d, self.leaf({**ctx, a: d}, c))
            case CtxBox():
                return self.box_intro(ctx, ty, 1, 0)
        raise GenExhausted(f"no closed terms of type {ty}")

    def box_intro(self, ctx: Ctx, ty: CtxBox, size: int, loops: int = 0) -> CtxBoxIntro:
        names = self.rng.sample(ATOM_NAMES, len(ty.ctx))
        binders = tuple((Atom(n), t) for n, t in zip(names, ty.ctx))
        inner: Ctx = {k: v for k, v in ctx.items() if isinstance(k, Unknown)}
        inner.update(dict(binders))
        return CtxBoxIntro(binders, self._term(inner, ty.body, size, loops))

    def _ext(self, ctx, x, t, size, loops):
        if not t.ctx:
            return Ext(x)
        sizes = self._split(size, len(t.ctx))
        return Ext(x, tuple(self._term(ctx, a, s, loops) for a, s in zip(t.ctx, sizes)))

    def _binop(self, op, ty, ctx, size, loops):
        s1, s2 = self._split(size, 2)
        return app(Const(op), self._term(ctx, ty, s1, loops), self._term(ctx, ty, s2, loops))

    def _isapp(self, ctx, size, loops):
        bt = self.box_type(1)
        arg = self.box_intro(ctx, bt, size - 1, loops) if self.rng.random() < 0.7 else self._term(ctx, bt, size - 1, loops)
        return App(Const("isapp"), arg)

    def _lam(self, ctx, d, c, size, loops):
        a = Atom(self.rng.choice(ATOM_NAMES))
        return Lam(a, d, self._term({**ctx, a: d}, c, size - 1, loops))

    def _app(self, ctx, ty, size, loops):
        fun_atoms = [(a, t) for a, t in ctx.items() if isinstance(a, Atom) and isinstance(t, Arrow) and t.cod == ty]
        if fun_atoms and self.rng.random() < 0.5:
            f, ft = self.rng.choice(fun_atoms)
            return App(f, self._term(ctx, ft.dom, size - 1, loops))
        dom = self.type(1)
        s1, s2 = self._split(size, 2)
        return App(self._term(ctx, Arrow(dom, ty), s1, loops), self._term(ctx, dom, s2, loops))

    def _redex(self, ctx, ty, size, loops):
        dom = self.type(1)
        a = Atom(self.rng.choice(ATOM_NAMES))
        s1, s2 = self._split(size, 2)
        return App(Lam(a, dom, self._term({**ctx, a: dom}, ty, s1, loops)), self._term(ctx, dom, s2, loops))

    def _letbox(self, ctx, ty, size, loops):
        bt = self.box_type(2)
        # favour unknowns whose extraction has a type needed below
        if self.rng.random() < 0.5:
            bt = CtxBox(bt.ctx, ty.body if isinstance(ty, CtxBox) and self.rng.random() < 0.5 else ty)
        x = Unknown(self.rng.choice(UNKNOWN_NAMES))
        s1, s2 = self._split(size, 2)
        bound = self.box_intro(ctx, bt, s1, loops) if self.rng.random() < 0.6 else self._term(ctx, bt, s1, loops)
        return LetBox(x, bound, self._term({**ctx, x: bt}, ty, s2, loops))

    def _natrec(self, ctx, ty, size, loops):
        s1, s2 = self._split(size - 3, 2)
        m, r = Atom(self.rng.choice(ATOM_NAMES)), Atom(self.rng.choice(ATOM_NAMES))
        inner = {**ctx, m: NAT, r: ty}
        step = Lam(m, NAT, Lam(r, ty, self._term(inner, ty, s2, loops + 1)))
        count = numeral(self.rng.randint(0, 3))
        return app(Const("natrec", ty), self._term(ctx, ty, s1, loops + 1), step, count)

    # -- values

    def closed_value(self, ty: Type) -> Den:
        return evaluate({}, self.term({}, ty, self.rng.randint(1, max(self.cfg.max_size // 4, 2))))

    def valuation(self, ctx: Mapping[Name, Type]) -> dict[Name, Den]:
        """Every value is the denotation of a closed term, hence shapely."""
        return {k: self.closed_value(ty) for k, ty in ctx.items()}

    def inflate(self, x: Den, ty: Type) -> Den:
        """Replace the purported denotation inside box values with unrelated
        values of the right type."""
        match ty:
            case CtxBox(ctx, body):
                if not ctx:
                    return DBox(x.head, self.inflate(self.closed_value(body), body))
                other = self.closed_value(Arrow(ctx[0], body)) if len(ctx) == 1 else None
                const = self.closed_value(body)
                if other is not None and self.rng.random() < 0.5:
                    return DBox(x.head, lambda xs, f=other: f(xs[0]))
                return DBox(x.head, lambda xs, v=const: v)
            case Arrow(_, c) if isinstance(c, CtxBox):
                return DFun(lambda y: self.inflate(x(y), c))
        return x

    def perturbed(self, val: Valuation, ctx: Mapping[Name, Type]) -> dict[Name, Den]:
        return {k: self.inflate(v, ctx[k]) for k, v in val.items()}


def gen_typed_term(ctx: Mapping[Name, Type], ty: Type, cfg: GenConfig, rng: random.Random | None = None) -> Term:
    gen = Generator(rng or random.Random(cfg.seed), cfg)
    for _ in range(10):
        t = gen.term(dict(ctx), ty)
        if has_type(dict(ctx), t, ty, cfg.mode):
            return t
    raise GenExhausted(f"no well-typed term found for {ty}")


def gen_valuation(ctx: Mapping[Name, Type], cfg: GenConfig, rng: random.Random | None = None) -> dict[Name, Den]:
    gen = Generator(rng or random.Random(cfg.seed), cfg)
    return gen.valuation(ctx)


# ----------------------------------------------------------------------
# Suites


@dataclass(frozen=True)
class Instance:
    ctx: dict
    term: Term
    ty: Type
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Failure:
    seed: int
    term: str
    property: str

    def as_dict(self) -> dict:
        return {"seed": self.seed, "term": self.term, "property": self.property}


@dataclass(frozen=True)
class PropReport:
    suite: str
    cases: int
    failures: tuple[Failure, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> str:
        return json.dumps({"suite": self.suite, "cases": self.cases, "failures": [f.as_dict() for f in self.failures]})


Check = Callable[[Instance, ProbeBudget], str | None]


@dataclass(frozen=True)
class Suite:
    name: str
    make: Callable[[Generator], Instance]
    check: Check
    doc: str = ""


def _typed(gen: Generator, closed: bool = False, **extra) -> Instance:
    ctx = {} if closed else gen.context()
    ty = gen.type()
    t = gen.term(ctx, ty)
    return Instance(ctx, t, ty, extra)


def _check_generator(inst: Instance, budget: ProbeBudget = DEFAULT_BUDGET) -> str | None:
    got = typecheck(inst.ctx, inst.term, inst.extra.get("mode", "contextual"))
    return None if got == inst.ty else "generated term has the requested type"


def _make_weakening(gen: Generator) -> Instance:
    inst = _typed(gen)
    extra_ctx = {}
    for name in ATOM_NAMES + ("e", "f"):
        if gen.rng.random() < 0.3:
            extra_ctx[Atom(name)] = gen.type(1)
    for name in UNKNOWN_NAMES + ("W",):
        if gen.rng.random() < 0.3:
            extra_ctx[Unknown(name)] = gen.box_type(1)
    return replace(inst, extra={"noise": extra_ctx})


def _check_weakening(inst: Instance, budget: ProbeBudget = DEFAULT_BUDGET) -> str | None:
    relevant = free_atoms(inst.term) | free_unknowns(inst.term)
    small = {k: v for k, v in inst.ctx.items() if k in relevant}
    if not has_type(small, inst.term, inst.ty):
        return "strengthening to free names preserves the type"
    big = dict(small)
    for k, v in inst.extra["noise"].items():
        if k not in relevant:
            big[k] = v
    if not has_type(big, inst.term, inst.ty):
        return "weakening with irrelevant bindings preserves the type"
    return None


def _make_sigma(gen: Generator) -> Instance:
    inst = _typed(gen)
    atoms = [a for a in inst.ctx if isinstance(a, Atom)]
    sigma = {a: gen.term(inst.ctx, inst.ctx[a], gen.rng.randint(1, 8)) for a in atoms if gen.rng.random() < 0.7}
    absent = Atom(gen.rng.choice(("e", "f")))
    return replace(inst, extra={"sigma": sigma, "absent": absent, "filler": gen.leaf({}, NAT)})


def _check_sigma(inst: Instance, budget: ProbeBudget = DEFAULT_BUDGET) -> str | None:
    sigma = inst.extra["sigma"]
    if not has_type(inst.ctx, subst_atoms(inst.term, sigma), inst.ty):
        return "typing is preserved by atoms-substitution"
    if not alpha_eq(subst_atoms(inst.term, {inst.extra["absent"]: inst.extra["filler"]}), inst.term):
        return "substituting for an absent atom is the identity"
    return None


def _theta(gen: Generator, ctx: Ctx) -> dict:
    return {
        x: gen.box_intro(ctx, t, gen.rng.randint(1, 8))
        for x, t in ctx.items()
        if isinstance(x, Unknown) and gen.rng.random() < 0.8
    }


def _make_theta(gen: Generator) -> Instance:
    inst = _typed(gen)
    return replace(inst, extra={"theta": UnknownSubst(_theta(gen, inst.ctx))})


def _check_theta_typing(inst: Instance, budget: ProbeBudget = DEFAULT_BUDGET) -> str | None:
    if not has_type(inst.ctx, subst_unknowns(inst.term, inst.extra["theta"]), inst.ty):
        return "typing is preserved by unknowns-substitution"
    return None


def _check_fa_theta(inst: Instance, budget: ProbeBudget = DEFAULT_BUDGET) -> str | None:
    theta = inst.extra["theta"]
    after, before = free_atoms(subst_unknowns(inst.term, theta)), free_atoms(inst.term)
    if not after <= before:
        return "unknowns-substitution adds no free atoms"
    # an instantiated box may discard an argument, so equality needs empty contexts
    if all(not img.binders for img in theta.values()) and after != before:
        return "unknowns-substitution with empty-context boxes keeps free atoms"
    return None


def _make_commute(gen: Generator) -> Instance:
    inst = _typed(gen)
    ctx = dict(inst.ctx)
    x = Unknown("V")
    bt = gen.box_type(2)
    ctx[x] = CtxBox((), bt.body)
    t = gen.term(ctx, inst.ty)
    # the image of X mentions the other unknowns; theta's images are closed
    s = gen.term({k: v for k, v in ctx.items() if isinstance(k, Unknown) and k != x}, bt.body, 6)
    theta = {y: gen.box_intro({}, ty, gen.rng.randint(1, 6)) for y, ty in ctx.items() if isinstance(y, Unknown) and y != x}
    return Instance(ctx, t, inst.ty, {"x": x, "s": s, "theta": UnknownSubst(theta)})


def _check_commute(inst: Instance, budget: ProbeBudget = DEFAULT_BUDGET) -> str | None:
    x, s, theta = inst.extra["x"], inst.extra["s"], inst.extra["theta"]
    lhs = subst_unknowns(subst_unknowns(inst.term, {x: CtxBoxIntro((), s)}), theta)
    rhs = subst_unknowns(subst_unknowns(inst.term, theta), {x: CtxBoxIntro((), subst_unknowns(s, theta))})
    return None if alpha_eq(lhs, rhs) else "unknowns-substitutions commute"


def _check_subject_reduction(inst: Instance, budget: ProbeBudget = DEFAULT_BUDGET) -> str | None:
    for step in iter_steps(inst.term):
        try:
            subterm_at(inst.term, step.path)
        except IndexError:
            return f"{step.rule} reduct lies inside a box"
        if not has_type(inst.ctx, step.result, inst.ty):
            return f"{step.rule} at {step.path} preserves the type"
    return None


def _make_valued(gen: Generator, closed: bool = False) -> Instance:
    inst = _typed(gen, closed)
    val = gen.valuation(inst.ctx)
    return replace(inst, extra={"val": val, "inflated": gen.perturbed(val, inst.ctx)})


def _check_soundness(inst: Instance, budget: ProbeBudget = DEFAULT_BUDGET) -> str | None:
    for label in ("val", "inflated"):
        val = inst.extra[label]
        if not check_valuation(inst.ctx, val):
            return f"generated {label} valuation is well formed"
        if not in_denotation(evaluate(val, inst.term), inst.ty):
            return f"denotation under a {label} valuation lies in the type"
        sub = subst_unknowns(inst.term, valuation_unknowns(val))
        atoms_only = {k: v for k, v in inst.ctx.items() if isinstance(k, Atom)}
        if not has_type(atoms_only, sub, inst.ty):
            return f"{label} valuation's syntax instantiates the term at its type"
    return None


def _make_reduction(gen: Generator) -> Instance:
    return _make_valued(gen, closed=gen.rng.random() < 0.5)


def _check_reduction_soundness(inst: Instance, budget: ProbeBudget = DEFAULT_BUDGET) -> str | None:
    steps = list(iter_steps(inst.term))
    for label in ("val", "inflated"):
        val = inst.extra[label]
        before = evaluate(val, inst.term)
        for step in steps:
            if den_eq(before, evaluate(val, step.result), inst.ty, budget) is Verdict.UNEQUAL:
                return f"{step.rule} at {step.path} preserves the denotation ({label})"
    return None


def _make_relevance(gen: Generator) -> Instance:
    inst = _make_valued(gen)
    other = gen.valuation(inst.ctx)
    return replace(inst, extra={**inst.extra, "other": other})


def _check_relevance(inst: Instance, budget: ProbeBudget = DEFAULT_BUDGET) -> str | None:
    val, other = inst.extra["val"], inst.extra["other"]
    relevant = free_atoms(inst.term) | free_unknowns(inst.term)
    mixed = {k: (val[k] if k in relevant else other[k]) for k in val}
    trimmed = {k: val[k] for k in val if k in relevant}
    ref = evaluate(val, inst.term)
    for label, v in (("changed", mixed), ("restricted", trimmed)):
        if den_eq(ref, evaluate(v, inst.term), inst.ty, budget) is Verdict.UNEQUAL:
            return f"denotation ignores {label} irrelevant names"
    return None


def _make_letbox(gen: Generator) -> Instance:
    ctx = gen.context()
    ty = gen.type()
    size = max(gen.rng.randint(3, gen.cfg.max_size), 3)
    t = gen._letbox(ctx, ty, size, 0)
    val = gen.valuation(ctx)
    return Instance(ctx, t, ty, {"val": val, "inflated": gen.perturbed(val, ctx)})


def _check_letbox(inst: Instance, budget: ProbeBudget = DEFAULT_BUDGET) -> str | None:
    if not isinstance(inst.term, LetBox):
        return None
    x, s, r = inst.term.x, inst.term.bound, inst.term.body
    for label in ("val", "inflated"):
        val = inst.extra[label]
        lhs = evaluate(val, inst.term)
        rhs = evaluate({**val, x: evaluate(val, s)}, r)
        if den_eq(lhs, rhs, inst.ty, budget) is Verdict.UNEQUAL:
            return f"let box clause under a {label} valuation"
    return None


def _make_exchange(gen: Generator) -> Instance:
    inst = _make_valued(gen)
    atoms = [a for a in inst.ctx if isinstance(a, Atom)]
    unknowns = [x for x in inst.ctx if isinstance(x, Unknown)]
    extra = dict(inst.extra)
    if atoms:
        a = gen.rng.choice(atoms)
        extra["atom"] = (a, gen.term(inst.ctx, inst.ctx[a], gen.rng.randint(1, 8)))
    if unknowns:
        x = gen.rng.choice(unknowns)
        extra["unknown"] = (x, gen.box_intro(inst.ctx, inst.ctx[x], gen.rng.randint(1, 8)))
    return replace(inst, extra=extra)


def _check_exchange(inst: Instance, budget: ProbeBudget = DEFAULT_BUDGET) -> str | None:
    for label in ("val", "inflated"):
        val = inst.extra[label]
        if "atom" in inst.extra:
            a, s = inst.extra["atom"]
            lhs = evaluate(val, subst_atoms(inst.term, {a: s}))
            rhs = evaluate({**val, a: evaluate(val, s)}, inst.term)
            if den_eq(lhs, rhs, inst.ty, budget) is Verdict.UNEQUAL:
                return f"atoms-substitution commutes with denotation ({label})"
        if "unknown" in inst.extra:
            x, b = inst.extra["unknown"]
            lhs = evaluate(val, subst_unknowns(inst.term, {x: b}))
            rhs = evaluate({**val, x: evaluate(val, b)}, inst.term)
            if den_eq(lhs, rhs, inst.ty, budget) is Verdict.UNEQUAL:
                return f"unknowns-substitution commutes with denotation ({label})"
    return None


def _check_shapeliness(inst: Instance, budget: ProbeBudget = DEFAULT_BUDGET) -> str | None:
    x = evaluate(inst.extra["val"], inst.term)
    if shapely(x, inst.ty, budget) is Shapeliness.NOT_SHAPELY:
        return "denotations under shapely valuations are shapely"
    return None


_COMONAD_TYPES = (NAT, O, Arrow(NAT, NAT))


def _make_comonad(gen: Generator) -> Instance:
    ty = gen.rng.choice(_COMONAD_TYPES)
    s, r = gen.term({}, ty, gen.rng.randint(1, 10)), gen.term({}, ty, gen.rng.randint(1, 10))
    v = gen.closed_value(ty)
    arrow_ty = Arrow(CtxBox((), ty), CtxBox((), ty))
    arrows = [gen.term({}, arrow_ty, gen.rng.randint(2, 12)) for _ in range(2)]
    probe_term = CtxBoxIntro((), CtxBoxIntro((), s))
    return Instance({}, probe_term, CtxBox((), CtxBox((), ty)), {"ty": ty, "r": r, "v": v, "arrows": arrows})


def _check_comonad(inst: Instance, budget: ProbeBudget = DEFAULT_BUDGET) -> str | None:
    body = inst.term.body if isinstance(inst.term, CtxBoxIntro) else None
    if not isinstance(body, CtxBoxIntro):
        return None
    ty = inst.extra["ty"]
    probe = DBox(inst.term, DBox(CtxBoxIntro((), inst.extra["r"]), inst.extra["v"]))
    arrows = default_arrows(ty) + [evaluate({}, t) for t in inst.extra["arrows"]]
    report = check_comonad_laws(ty, [probe], arrows, budget=budget)
    if not report.ok:
        return "comonad laws: " + ", ".join(sorted(report.failures))
    return None


def _make_roundtrip(gen: Generator) -> Instance:
    inst = _typed(gen)
    return replace(inst, extra={"renamed": rename_bound(inst.term, gen.rng)})


def _check_roundtrip(inst: Instance, budget: ProbeBudget = DEFAULT_BUDGET) -> str | None:
    t, renamed = inst.term, inst.extra["renamed"]
    if not alpha_eq(parse_term(print_term(t)), t):
        return "printing then parsing gives an alpha-equivalent term"
    if not alpha_eq(t, renamed):
        return "renaming bound names gives an alpha-equivalent term"
    if free_atoms(t) != free_atoms(renamed) or free_unknowns(t) != free_unknowns(renamed):
        return "free names are invariant under renaming"
    if typecheck(inst.ctx, renamed) != inst.ty:
        return "typing is invariant under renaming"
    return None


def rename_bound(t: Term, rng: random.Random) -> Term:
    """Rename every binder of ``t`` to a name not occurring in ``t``."""
    avoid = set(all_names(t))

    def go(t: Term) -> Term:
        match t:
            case Const() | Atom():
                return t
            case App(f, x):
                return App(go(f), go(x))
            case Ext(x, args):
                return Ext(x, tuple(go(r) for r in args))
            case Lam(a, ty, body):
                a2 = _fresh_atom(a)
                return Lam(a2, ty, go(subst_atoms(body, {a: a2})))
            case CtxBoxIntro(binders, body):
                ren = {a: _fresh_atom(a) for a, _ in binders}
                return CtxBoxIntro(tuple((ren[a], ty) for a, ty in binders), go(subst_atoms(body, ren)))
            case LetBox(x, s, r):
                x2 = fresh_unknown(Unknown(x.name + "r"), avoid)
                avoid.add(x2.name)
                return LetBox(x2, go(s), go(rename_unknown(r, x, x2)))
        raise TypeError(t)

    def _fresh_atom(a: Atom) -> Atom:
        a2 = fresh_atom(Atom(a.name + "r" + str(rng.randint(0, 9))), avoid)
        avoid.add(a2.name)
        return a2

    return go(t)


def _make_generator(gen: Generator) -> Instance:
    inst = _typed(gen)
    return replace(inst, extra={"mode": gen.cfg.mode})


SUITES: dict[str, Suite] = {
    s.name: s
    for s in (
        Suite("generator", _make_generator, _check_generator, "generated terms have the requested type"),
        Suite("weakening", _make_weakening, _check_weakening, "typing depends only on free names"),
        Suite("subst-typing-atoms", _make_sigma, _check_sigma, "atoms-substitution preserves typing"),
        Suite("subst-typing-unknowns", _make_theta, _check_theta_typing, "unknowns-substitution preserves typing"),
        Suite("fa-theta", _make_theta, _check_fa_theta, "unknowns-substitution preserves free atoms"),
        Suite("subst-commute", _make_commute, _check_commute, "unknowns-substitutions commute"),
        Suite("subject-reduction", _typed, _check_subject_reduction, "every reduct keeps the type"),
        Suite("soundness", _make_valued, _check_soundness, "denotations lie in their types"),
        Suite("reduction-soundness", _make_reduction, _check_reduction_soundness, "every reduct keeps the denotation"),
        Suite("relevance", _make_relevance, _check_relevance, "denotation depends only on free names"),
        Suite("letbox-clause", _make_letbox, _check_letbox, "let box extends the valuation"),
        Suite("subst-denotation-exchange", _make_exchange, _check_exchange, "substitution commutes with denotation"),
        Suite("shapeliness", _make_valued, _check_shapeliness, "shapely valuations give shapely values"),
        Suite("comonad", _make_comonad, _check_comonad, "comonad laws on random probes"),
        Suite("roundtrip", _make_roundtrip, _check_roundtrip, "printing and renaming respect alpha-equivalence"),
    )
}


# ----------------------------------------------------------------------
# Running and shrinking

MAX_SHRINKS = 200


def _run_check(suite: Suite, inst: Instance, budget: ProbeBudget = DEFAULT_BUDGET) -> str | None:
    try:
        return suite.check(inst, budget)
    except Exception as exc:  # a crash is a failure of the property under test
        return f"{suite.doc}: {type(exc).__name__}: {exc}"


def _positions(ctx: Ctx, t: Term, path=()) -> Iterator[tuple[tuple[int, ...], Ctx, Term]]:
    yield path, ctx, t
    match t:
        case App(f, x):
            yield from _positions(ctx, f, path + (0,))
            yield from _positions(ctx, x, path + (1,))
        case Lam(a, ty, body):
            yield from _positions({**ctx, a: ty}, body, path + (0,))
        case CtxBoxIntro(binders, body):
            inner = {k: v for k, v in ctx.items() if isinstance(k, Unknown)}
            inner.update(dict(binders))
            yield from _positions(inner, body, path + (0,))
        case Ext(_, args):
            for i, r in enumerate(args):
                yield from _positions(ctx, r, path + (i,))
        case LetBox(x, s, r):
            yield from _positions(ctx, s, path + (0,))
            try:
                st = typecheck(ctx, s)
            except TypingError:
                return
            yield from _positions({**ctx, x: st}, r, path + (1,))


def _replace_at(t: Term, path, new: Term) -> Term:
    if not path:
        return new
    i, rest = path[0], path[1:]
    match t:
        case App(f, x):
            return App(_replace_at(f, rest, new), x) if i == 0 else App(f, _replace_at(x, rest, new))
        case Lam(a, ty, body):
            return Lam(a, ty, _replace_at(body, rest, new))
        case CtxBoxIntro(binders, body):
            return CtxBoxIntro(binders, _replace_at(body, rest, new))
        case Ext(x, args):
            return Ext(x, args[:i] + (_replace_at(args[i], rest, new),) + args[i + 1 :])
        case LetBox(x, s, r):
            return LetBox(x, _replace_at(s, rest, new), r) if i == 0 else LetBox(x, s, _replace_at(r, rest, new))
    raise IndexError(path)


def _size(t: Term) -> int:
    match t:
        case App(f, x):
            return 1 + _size(f) + _size(x)
        case Lam(_, _, b) | CtxBoxIntro(_, b):
            return 1 + _size(b)
        case Ext(_, args):
            return 1 + sum(_size(r) for r in args)
        case LetBox(_, s, r):
            return 1 + _size(s) + _size(r)
    return 1


def _candidates(inst: Instance, gen: Generator) -> Iterator[Term]:
    for path, ctx, sub in _positions(inst.ctx, inst.term):
        if _size(sub) <= 1:
            continue
        try:
            ty = typecheck(ctx, sub)
        except TypingError:
            continue
        for _, _, child in _positions(ctx, sub):
            if child is not sub and _size(child) < _size(sub) and has_type(ctx, child, ty):
                yield _replace_at(inst.term, path, child)
        try:
            yield _replace_at(inst.term, path, gen.leaf(ctx, ty))
        except GenExhausted:
            pass


def shrink(suite: Suite, inst: Instance, seed: int, budget: ProbeBudget = DEFAULT_BUDGET) -> tuple[Instance, str]:
    """Greedily replace subterms by smaller terms of the same type while the
    property still fails."""
    failure = _run_check(suite, inst, budget)
    gen = Generator(random.Random(seed), GenConfig(seed=seed))
    attempts = 0
    improved = True
    while improved and attempts < MAX_SHRINKS:
        improved = False
        for cand in _candidates(inst, gen):
            attempts += 1
            if attempts > MAX_SHRINKS:
                break
            if _size(cand) >= _size(inst.term) or not has_type(inst.ctx, cand, inst.ty):
                continue
            trial = replace(inst, term=cand)
            why = _run_check(suite, trial, budget)
            if why is not None:
                inst, failure, improved = trial, why, True
                break
    return inst, failure


def run_case(name: str, seed: int, cfg: GenConfig, budget: ProbeBudget = DEFAULT_BUDGET) -> Failure | None:
    suite = SUITES[name]
    gen = Generator(random.Random(seed), cfg)
    try:
        inst = suite.make(gen)
    except GenExhausted:
        return None
    why = _run_check(suite, inst, budget)
    if why is None:
        return None
    inst, why = shrink(suite, inst, seed, budget)
    return Failure(seed, print_term(inst.term), why)


def run_suite(
    name: str,
    cases: int,
    cfg: GenConfig | None = None,
    *,
    constants: Mapping[str, Den] | None = None,
    budget: ProbeBudget = DEFAULT_BUDGET,
) -> PropReport:
    """Run ``cases`` generated instances of the named suite. ``constants``
    overrides the meaning of some constants, for harness self-tests."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    cfg = cfg or GenConfig()
    if sys.getrecursionlimit() < 20_000:
        sys.setrecursionlimit(20_000)
    failures = []
    with patched_constants(constants or {}):
        for i in range(cases):
            f = run_case(name, case_seed(cfg.seed, i), cfg, budget)
            if f is not None:
                failures.append(f)
    return PropReport(name, cases, tuple(sorted(failures, key=lambda f: f.seed)))


def inflating_natrec() -> Den:
    """A recursor whose box results claim a value one larger than their
    syntax denotes. Used to check that the shapeliness suite notices a
    non-shapely constant."""
    from .denotation import CONSTANTS, DNat

    honest = CONSTANTS["natrec"]

    def corrupt(x: Den) -> Den:
        if isinstance(x, DBox) and x.arity == 0 and isinstance(x.tail, DNat):
            return DBox(x.head, DNat(x.tail.value + 1))
        return x

    def with_z(z):
        inner = honest(z)
        return DFun(lambda s: DFun(lambda n: corrupt(inner(s)(n))))

    return DFun(with_z, "<natrec>")
