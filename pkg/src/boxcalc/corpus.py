"""Named example terms with their declared types, plus golden checks.

Schematic families (unpack, the context-indexed 4 and K, and the structural
rules) are generators taking the types involved; ``instances`` enumerates
them over small contexts.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass

from .denotation import (
    DBox,
    Den,
    DNat,
    ProbeBudget,
    Shapeliness,
    Verdict,
    curry_tail,
    den_eq,
    evaluate,
    shapely,
)
from .parser import parse_term, parse_type
from .reduction import Status, normalize
from .syntax import (
    NAT,
    Arrow,
    CtxBox,
    CtxBoxIntro,
    O,
    TBase,
    Term,
    Type,
    alpha_eq,
    app,
    arrows,
    numeral,
    numeral_value,
    print_term,
    print_type,
)
from .typecheck import Mode, TypingError, typecheck

A, B = TBase("A"), TBase("B")


@dataclass(frozen=True)
class Entry:
    name: str
    term: Term
    ty: Type
    mode: Mode

    def check(self) -> Type:
        """Typecheck in the declared mode; raise if the type differs."""
        got = typecheck({}, self.term, self.mode)
        if got != self.ty:
            raise TypingError(f"{self.name}: declared {print_type(self.ty)}, got {print_type(got)}", self.term)
        return got


def _entry(name: str, src: str, ty: str | Type, mode: Mode = "modal") -> Entry:
    return Entry(name, parse_term(src), parse_type(ty) if isinstance(ty, str) else ty, mode)


def _t(ty: Type) -> str:
    return print_type(ty)


def _ids(ctx: Sequence[Type], stem: str = "x") -> list[str]:
    """The identity substitution on a context, as its atom vector."""
    return [f"{stem}{i + 1}" for i in range(len(ctx))]


def _binders(ctx: Sequence[Type], stem: str = "x") -> str:
    return "[" + ", ".join(f"{a}:{_t(ty)}" for a, ty in zip(_ids(ctx, stem), ctx)) + "]"


def _ext(x: str, args: Sequence[str]) -> str:
    return f"{x}@({', '.join(args)})"


# ----------------------------------------------------------------------
# Modal axioms


def axiom_t(a: Type = A) -> Entry:
    return _entry("T", f"\\a:[]{_t(a)}. let box X = a in X!", Arrow(CtxBox((), a), a))


def axiom_4(a: Type = A) -> Entry:
    return _entry("4", f"\\a:[]{_t(a)}. let box X = a in box box X!", Arrow(CtxBox((), a), CtxBox((), CtxBox((), a))))


def axiom_k(a: Type = A, b: Type = B) -> Entry:
    src = f"\\f:[]({_t(Arrow(a, b))}). \\x:[]{_t(a)}. let box F = f in let box X = x in box (F! X!)"
    return _entry("K", src, arrows(CtxBox((), Arrow(a, b)), CtxBox((), a), CtxBox((), b)))


def axiom_k_staged(a: Type = A, b: Type = B) -> Entry:
    """K with the first unpacking done before the second argument arrives."""
    src = f"\\f:[]({_t(Arrow(a, b))}). let box F = f in \\x:[]{_t(a)}. let box X = x in box (F! X!)"
    return _entry("K_staged", src, arrows(CtxBox((), Arrow(a, b)), CtxBox((), a), CtxBox((), b)))


# ----------------------------------------------------------------------
# Contextual families


def conv_f(a: Type = A, b: Type = B) -> Entry:
    src = f"\\c:[{_t(a)}]{_t(b)}. let box X = c in box (\\a:{_t(a)}. X@(a))"
    return _entry("f", src, Arrow(CtxBox((a,), b), CtxBox((), Arrow(a, b))), "contextual")


def conv_g(a: Type = A, b: Type = B) -> Entry:
    src = f"\\c:[]({_t(Arrow(a, b))}). let box X = c in [a:{_t(a)}] X! a"
    return _entry("g", src, Arrow(CtxBox((), Arrow(a, b)), CtxBox((a,), b)), "contextual")


def unpack(ctx: Sequence[Type], b: Type = B) -> Entry:
    ids = _ids(ctx, "a")
    lams = "".join(f"\\{x}:{_t(ty)}. " for x, ty in zip(ids, ctx))
    src = f"\\b:{_t(CtxBox(tuple(ctx), b))}. let box X = b in {lams}{_ext('X', ids)}"
    return _entry("unpack", src, Arrow(CtxBox(tuple(ctx), b), arrows(*ctx, b)), "contextual")


def four_ctx(ctx: Sequence[Type], a: Type = A) -> Entry:
    boxed = CtxBox(tuple(ctx), a)
    src = f"\\z:{_t(boxed)}. let box Z = z in box {_binders(ctx)} {_ext('Z', _ids(ctx))}"
    return _entry("4_ctx", src, Arrow(boxed, CtxBox((), boxed)), "contextual")


def k_ctx(ctx: Sequence[Type], a: Type = A, b: Type = B) -> Entry:
    ctx = tuple(ctx)
    ids = _ids(ctx)
    src = (
        f"\\f:{_t(CtxBox(ctx, Arrow(a, b)))}. \\x:{_t(CtxBox(ctx, a))}. "
        f"let box F = f in let box X = x in {_binders(ctx)} {_ext('F', ids)} {_ext('X', ids)}"
    )
    return _entry("K_ctx", src, arrows(CtxBox(ctx, Arrow(a, b)), CtxBox(ctx, a), CtxBox(ctx, b)), "contextual")


def weaken(ctx: Sequence[Type], c: Type = NAT, a: Type = A) -> Entry:
    ctx = tuple(ctx)
    src = f"\\z:{_t(CtxBox(ctx, a))}. let box Z = z in {_binders(ctx + (c,))} {_ext('Z', _ids(ctx))}"
    return _entry("weaken", src, Arrow(CtxBox(ctx, a), CtxBox(ctx + (c,), a)), "contextual")


def contract(b: Type = B, a: Type = A) -> Entry:
    src = f"\\z:[{_t(b)}, {_t(b)}]{_t(a)}. let box Z = z in [x:{_t(b)}] Z@(x, x)"
    return _entry("contract", src, Arrow(CtxBox((b, b), a), CtxBox((b,), a)), "contextual")


def exchange(b: Type = B, c: Type = NAT, a: Type = A) -> Entry:
    src = f"\\z:[{_t(b)}, {_t(c)}]{_t(a)}. let box Z = z in [y:{_t(c)}, x:{_t(b)}] Z@(x, y)"
    return _entry("exchange", src, Arrow(CtxBox((b, c), a), CtxBox((c, b), a)), "contextual")


SCHEMAS: dict[str, Callable[..., Entry]] = {
    "unpack": unpack,
    "4_ctx": four_ctx,
    "K_ctx": k_ctx,
    "weaken": weaken,
}


def contexts(max_len: int = 3, base: Sequence[Type] = (NAT, O, B)) -> Iterator[tuple[Type, ...]]:
    for n in range(max_len + 1):
        yield from itertools.product(base, repeat=n)


def instances(max_len: int = 3) -> Iterator[Entry]:
    """Every schematic family at every context of length at most ``max_len``."""
    for ctx in contexts(max_len):
        for gen in SCHEMAS.values():
            yield gen(ctx)
    for b, c in itertools.product((NAT, O, B), repeat=2):
        yield contract(b)
        yield exchange(b, c)
        yield conv_f(b, c)
        yield conv_g(b, c)
    for a, b in itertools.product((NAT, O, A), repeat=2):
        yield axiom_t(a)
        yield axiom_4(a)
        yield axiom_k(a, b)
        yield axiom_k_staged(a, b)


# ----------------------------------------------------------------------
# Programs

EXP = (
    "\\n:nat. natrec[[](nat->nat)] (box (\\b:nat. 1)) "
    "(\\m:nat. \\r:[](nat->nat). let box X = r in box (\\b:nat. times b (X! b))) n"
)
EXP_C = "\\n:nat. natrec[[nat]nat] ([b:nat] 1) (\\m:nat. \\r:[nat]nat. let box X = r in [b:nat] times b X@(b)) n"
REIFY_NAT = "\\n:nat. natrec[[]nat] (box 0) (\\m:nat. \\r:[]nat. let box X = r in box (plus X! 1)) n"


def corpus_entries() -> list[Entry]:
    return [
        _entry("neg_box", "\\a:[]o. let box X = a in box (neg X!)", "[]o -> []o"),
        _entry("and_box", "\\a:[]o. \\b:[]o. let box X = a in let box Y = b in box (and X! Y!)", "[]o -> []o -> []o"),
        _entry("dup_and", "\\a:[]o. let box X = a in box (and X! X!)", "[]o -> []o"),
        _entry("letbox_example", "let box X = box (plus 1 2) in box box X!", "[][]nat"),
        _entry("isapp_app", "isapp (box ((\\a:nat. a) 0))", "o"),
        _entry("isapp_const", "isapp (box 0)", "o"),
        _entry("exp", EXP, "nat -> [](nat -> nat)"),
        _entry("reifyNat", REIFY_NAT, "nat -> []nat"),
        _entry("exp_c", EXP_C, "nat -> [nat]nat", "contextual"),
        axiom_t(),
        axiom_4(),
        axiom_k(),
        axiom_k_staged(),
        conv_f(),
        conv_g(),
        unpack((A, NAT)),
        four_ctx((NAT, O)),
        k_ctx((NAT,)),
        weaken((NAT,)),
        contract(),
        exchange(),
    ]


def entry(name: str) -> Entry:
    for e in corpus_entries():
        if e.name == name:
            return e
    raise KeyError(name)


def applied(name: str, n: int) -> Term:
    return app(entry(name).term, numeral(n))


def shapely_boxes() -> list[tuple[Den, Type]]:
    """Honest box values of contextual and modal type, for checks that need
    shapely inputs."""
    out: list[tuple[Den, Type]] = []
    nn = parse_type("[nat]nat")
    for k in range(12):
        out.append((evaluate({}, applied("exp_c", k)), nn))
        out.append((evaluate({}, applied("reifyNat", k)), CtxBox((), NAT)))
    sources = [
        ("[a:nat, b:nat] plus a b", "[nat, nat]nat"),
        ("[a:nat, b:nat] times a (succ b)", "[nat, nat]nat"),
        ("[a:nat, b:nat] b", "[nat, nat]nat"),
        ("[p:o] neg p", "[o]o"),
        ("[p:o, q:o] and q p", "[o, o]o"),
        ("[p:o] top", "[o]o"),
        ("[f:nat->nat] f (f 1)", "[nat -> nat]nat"),
        ("[f:nat->nat, a:nat] f a", "[nat -> nat, nat]nat"),
        ("[a:nat] \\b:nat. plus a b", "[nat](nat -> nat)"),
        ("[a:nat] box 2", "[nat][]nat"),
        ("[a:nat] natrec[nat] a (\\m:nat. \\r:nat. plus r 2) a", "[nat]nat"),
        ("[a:nat, b:nat, c:nat] plus a (times b c)", "[nat, nat, nat]nat"),
        ("[a:nat, p:o, b:nat] and (isapp ([c:nat] plus c 1)) p", "[nat, o, nat]o"),
        ("box (\\a:nat. a)", "[](nat -> nat)"),
    ]
    for k in range(2):
        for src, ty in sources:
            t = parse_term(src)
            if k:
                t = app(parse_term(f"\\u:{ty}. u"), t)
            out.append((evaluate({}, t), parse_type(ty)))
    return out


# ----------------------------------------------------------------------
# Golden checks


@dataclass(frozen=True)
class Golden:
    name: str
    ok: bool
    detail: str


def _golden(name: str, fn: Callable[[], tuple[bool, str]]) -> Golden:
    try:
        ok, detail = fn()
    except Exception as exc:  # a crashing check is a failing check
        return Golden(name, False, f"{type(exc).__name__}: {exc}")
    return Golden(name, ok, detail)


def _letbox() -> tuple[bool, str]:
    got = evaluate({}, entry("letbox_example").term)
    want = DBox(parse_term("box box (plus 1 2)"), DBox(parse_term("box (plus 1 2)"), DNat(3)))
    ok = (
        alpha_eq(got.head, want.head)
        and isinstance(got.tail, DBox)
        and alpha_eq(got.tail.head, want.tail.head)
        and got.tail.tail == DNat(3)
    )
    return ok, str(got)


def _exp() -> tuple[bool, str]:
    want = parse_term("box (\\b:nat. times b ((\\b:nat. times b ((\\b:nat. 1) b)) b))")
    d = evaluate({}, applied("exp", 2))
    squares = all(d.tail(DNat(k)) == DNat(k * k) for k in range(9))
    norm = normalize(applied("exp", 2))
    ok = alpha_eq(d.head, want) and squares and norm.status is Status.NORMAL and alpha_eq(norm.result, want)
    return ok, print_term(d.head)


def _exp_c() -> tuple[bool, str]:
    want = parse_term("[b:nat] times b (times b 1)")
    d = evaluate({}, applied("exp_c", 2))
    squares = all(d.tail((DNat(k),)) == DNat(k * k) for k in range(9))
    return alpha_eq(d.head, want) and squares, print_term(d.head)


def _reify() -> tuple[bool, str]:
    for n in range(21):
        d = evaluate({}, applied("reifyNat", n))
        if d.tail != DNat(n):
            return False, f"tail of reifyNat {n} is {d.tail}"
        body = normalize(d.head.body).result
        if numeral_value(body) != n:
            return False, f"head of reifyNat {n} normalizes to {print_term(body)}"
    return True, "n = 0..20"


def _t_and_4() -> tuple[bool, str]:
    t = evaluate({}, axiom_t(NAT).term)
    four = evaluate({}, axiom_4(NAT).term)
    for x in t_four_inputs():
        if t(x) != x.tail:
            return False, f"T on {x}"
        want = DBox(CtxBoxIntro((), x.head), x)
        if four(x) != want:
            return False, f"4 on {x}"
    return True, f"{len(t_four_inputs())} inputs"


def t_four_inputs() -> list[DBox]:
    """Inflated values at ``[]nat``: heads from corpus programs, tails
    unrelated naturals."""
    heads = [evaluate({}, applied("reifyNat", k)).head for k in range(5)]
    heads += [parse_term(s) for s in ("box (plus 1 2)", "box (times 2 3)", "box ((\\a:nat. a) 4)", "box 7", "box 0")]
    return [DBox(h, DNat((3 * i + 1) % 11)) for i, h in enumerate(heads + heads[::-1])][:20]


def _typings() -> tuple[bool, str]:
    n = 0
    for e in itertools.chain(corpus_entries(), instances()):
        e.check()
        n += 1
    return True, f"{n} typings"


def _open_box() -> tuple[bool, str]:
    from .typecheck import BoxOpenBody

    try:
        typecheck({}, parse_term("\\a:o. box a"))
    except BoxOpenBody as exc:
        return True, str(exc)
    return False, "accepted"


def _non_shapely() -> tuple[bool, str]:
    s = shapely(DBox(parse_term("box 0"), DNat(1)), CtxBox((), NAT))
    return s is Shapeliness.NOT_SHAPELY, s.value


def _unpack_identity() -> tuple[bool, str]:
    budget = ProbeBudget()
    boxes = shapely_boxes()
    for x, ty in boxes:
        u = evaluate({}, app(unpack(ty.ctx, ty.body).term, x.head))
        if den_eq(curry_tail(x), u, arrows(*ty.ctx, ty.body), budget) is Verdict.UNEQUAL:
            return False, str(x)
    return True, f"{len(boxes)} boxes"


def golden_checks() -> list[Golden]:
    return [
        _golden("typings", _typings),
        _golden("letbox_example", _letbox),
        _golden("exp 2", _exp),
        _golden("exp_c 2", _exp_c),
        _golden("reifyNat", _reify),
        _golden("T and 4", _t_and_4),
        _golden("open box rejected", _open_box),
        _golden("[]0::1 not shapely", _non_shapely),
        _golden("unpack identity", _unpack_identity),
    ]
