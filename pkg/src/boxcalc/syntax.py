"""Types, terms and the name-level operations on them.

One AST serves both systems: the modal calculus is the fragment in which
every box context is empty (``box r`` is ``CtxBoxIntro((), r)`` and ``X!`` is
``Ext(X, ())``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Union

# ----------------------------------------------------------------------
# Types


class Type:
    __slots__ = ()


@dataclass(frozen=True)
class Truth(Type):
    def __str__(self):
        return "o"


@dataclass(frozen=True)
class Nat(Type):
    def __str__(self):
        return "nat"


@dataclass(frozen=True)
class TBase(Type):
    """Uninterpreted base type, used only to state schematic typings."""

    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Arrow(Type):
    dom: Type
    cod: Type

    def __str__(self):
        return print_type(self)


@dataclass(frozen=True)
class CtxBox(Type):
    ctx: tuple[Type, ...]
    body: Type

    def __str__(self):
        return print_type(self)


O = Truth()
NAT = Nat()


def arrows(*tys: Type) -> Type:
    """``arrows(A, B, C)`` is ``A -> B -> C``."""
    out = tys[-1]
    for t in reversed(tys[:-1]):
        out = Arrow(t, out)
    return out


def boxed(ty: Type, *ctx: Type) -> CtxBox:
    return CtxBox(tuple(ctx), ty)


def is_modal_type(ty: Type) -> bool:
    match ty:
        case Arrow(d, c):
            return is_modal_type(d) and is_modal_type(c)
        case CtxBox(ctx, body):
            return not ctx and is_modal_type(body)
        case _:
            return True


def print_type(ty: Type) -> str:
    match ty:
        case Arrow(d, c):
            left = print_type(d)
            if isinstance(d, Arrow):
                left = f"({left})"
            return f"{left} -> {print_type(c)}"
        case CtxBox(ctx, body):
            inner = print_type(body)
            if isinstance(body, Arrow):
                inner = f"({inner})"
            return "[" + ", ".join(print_type(t) for t in ctx) + "]" + inner
        case _:
            return str(ty)


# ----------------------------------------------------------------------
# Names

_ATOM_RE = re.compile(r"[a-z][A-Za-z0-9_']*\Z")
_UNKNOWN_RE = re.compile(r"[A-Z][A-Za-z0-9_']*\Z")


class Term:
    __slots__ = ()

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True)
class Atom(Term):
    """An ordinary variable; doubles as the term that mentions it."""

    name: str
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False, kw_only=True)

    def __post_init__(self):
        if not _ATOM_RE.match(self.name):
            raise ValueError(f"atom names start lowercase: {self.name!r}")


@dataclass(frozen=True)
class Unknown:
    """A second-level variable standing for boxed syntax."""

    name: str

    def __post_init__(self):
        if not _UNKNOWN_RE.match(self.name):
            raise ValueError(f"unknown names start uppercase: {self.name!r}")

    def __str__(self):
        return self.name


Name = Union[Atom, Unknown]


# ----------------------------------------------------------------------
# Terms

CONST_NAMES = ("top", "bot", "isapp", "zero", "succ", "plus", "times", "neg", "and", "natrec")
SCHEMATIC = ("isapp", "natrec")
RESERVED = frozenset(CONST_NAMES) | {"box", "let", "in", "def", "o", "nat"}


@dataclass(frozen=True)
class Const(Term):
    """A constant. ``isapp`` and ``natrec`` may carry a type annotation:
    the box type inspected by ``isapp``, the result type of ``natrec``."""

    name: str
    annot: Type | None = None
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False, kw_only=True)

    def __post_init__(self):
        if self.name not in CONST_NAMES:
            raise ValueError(f"unknown constant {self.name!r}")
        if self.annot is not None and self.name not in SCHEMATIC:
            raise ValueError(f"constant {self.name} takes no annotation")
        if self.name == "isapp" and self.annot is not None and not isinstance(self.annot, CtxBox):
            raise ValueError("isapp is annotated with a box type")


@dataclass(frozen=True)
class Lam(Term):
    binder: Atom
    ty: Type
    body: Term
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class CtxBoxIntro(Term):
    binders: tuple[tuple[Atom, Type], ...]
    body: Term
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False, kw_only=True)

    def __post_init__(self):
        names = [a for a, _ in self.binders]
        if len(set(names)) != len(names):
            raise ValueError("box binders must be pairwise distinct")

    @property
    def atoms(self) -> tuple[Atom, ...]:
        return tuple(a for a, _ in self.binders)

    @property
    def ctx_types(self) -> tuple[Type, ...]:
        return tuple(t for _, t in self.binders)


@dataclass(frozen=True)
class Ext(Term):
    x: Unknown
    args: tuple[Term, ...] = ()
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class LetBox(Term):
    x: Unknown
    bound: Term
    body: Term
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False, kw_only=True)


TOP = Const("top")
BOT = Const("bot")
ZERO = Const("zero")
SUCC = Const("succ")
PLUS = Const("plus")
TIMES = Const("times")
NEG = Const("neg")
AND = Const("and")


def app(f: Term, *args: Term) -> Term:
    for a in args:
        f = App(f, a)
    return f


def box(body: Term, *binders: tuple[Atom, Type]) -> CtxBoxIntro:
    return CtxBoxIntro(tuple(binders), body)


def numeral(n: int) -> Term:
    t: Term = ZERO
    for _ in range(n):
        t = App(SUCC, t)
    return t


def numeral_value(t: Term) -> int | None:
    """The ``n`` such that ``t`` is ``succ^n zero``, else None."""
    n = 0
    while True:
        match t:
            case Const("zero"):
                return n
            case App(Const("succ"), inner):
                n += 1
                t = inner
            case _:
                return None


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Split an application into its head and argument list."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


# ----------------------------------------------------------------------
# Free names


def free_atoms(t: Term) -> frozenset[Atom]:
    match t:
        case Const():
            return frozenset()
        case Atom():
            return frozenset({t})
        case Lam(a, _, body):
            return free_atoms(body) - {a}
        case App(f, x):
            return free_atoms(f) | free_atoms(x)
        case CtxBoxIntro(binders, body):
            return free_atoms(body) - {a for a, _ in binders}
        case Ext(_, args):
            return frozenset().union(*(free_atoms(r) for r in args))
        case LetBox(_, s, r):
            return free_atoms(s) | free_atoms(r)
    raise TypeError(f"not a term: {t!r}")


def free_unknowns(t: Term) -> frozenset[Unknown]:
    match t:
        case Const() | Atom():
            return frozenset()
        case Lam(_, _, body) | CtxBoxIntro(_, body):
            return free_unknowns(body)
        case App(f, x):
            return free_unknowns(f) | free_unknowns(x)
        case Ext(x, args):
            return frozenset({x}).union(*(free_unknowns(r) for r in args))
        case LetBox(x, s, r):
            return free_unknowns(s) | (free_unknowns(r) - {x})
    raise TypeError(f"not a term: {t!r}")


def all_names(t: Term) -> set[str]:
    """Every identifier occurring in ``t``, bound or free."""
    out: set[str] = set()
    stack = [t]
    while stack:
        t = stack.pop()
        match t:
            case Atom(n):
                out.add(n)
            case Lam(a, _, body):
                out.add(a.name)
                stack.append(body)
            case App(f, x):
                stack += [f, x]
            case CtxBoxIntro(binders, body):
                out.update(a.name for a, _ in binders)
                stack.append(body)
            case Ext(x, args):
                out.add(x.name)
                stack += list(args)
            case LetBox(x, s, r):
                out.add(x.name)
                stack += [s, r]
    return out


def is_closed(t: Term) -> bool:
    return not free_atoms(t) and not free_unknowns(t)


# ----------------------------------------------------------------------
# Fresh names

_SUFFIX_RE = re.compile(r"^(.*?)(\d*)$")


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """``base`` itself if unused, else ``base`` stripped of digits plus the
    least numeric suffix not in ``avoid``."""
    avoid = set(avoid)
    if base not in avoid:
        return base
    stem = _SUFFIX_RE.match(base).group(1) or base
    k = 1
    while f"{stem}{k}" in avoid:
        k += 1
    return f"{stem}{k}"


def fresh_atom(a: Atom, avoid: Iterable[str]) -> Atom:
    return Atom(fresh_name(a.name, avoid))


def fresh_unknown(x: Unknown, avoid: Iterable[str]) -> Unknown:
    return Unknown(fresh_name(x.name, avoid))


# ----------------------------------------------------------------------
# Alpha-equivalence


def nameless(t: Term):
    """A canonical hashable form of ``t``: bound atoms and bound unknowns are
    replaced by de Bruijn-style indices into separate binder stacks."""
    return _nameless(t, (), ())


def _nameless(t, atoms, unknowns):
    match t:
        case Const(name, annot):
            return ("C", name, annot)
        case Atom(n):
            for i in range(len(atoms) - 1, -1, -1):
                if atoms[i] == n:
                    return ("a", len(atoms) - 1 - i)
            return ("fa", n)
        case Lam(a, ty, body):
            return ("lam", ty, _nameless(body, atoms + (a.name,), unknowns))
        case App(f, x):
            return ("app", _nameless(f, atoms, unknowns), _nameless(x, atoms, unknowns))
        case CtxBoxIntro(binders, body):
            inner = atoms + tuple(a.name for a, _ in binders)
            return ("box", tuple(ty for _, ty in binders), _nameless(body, inner, unknowns))
        case Ext(x, args):
            ref = ("fv", x.name)
            for i in range(len(unknowns) - 1, -1, -1):
                if unknowns[i] == x.name:
                    ref = ("X", len(unknowns) - 1 - i)
                    break
            return ("ext", ref, tuple(_nameless(r, atoms, unknowns) for r in args))
        case LetBox(x, s, r):
            return (
                "let",
                _nameless(s, atoms, unknowns),
                _nameless(r, atoms, unknowns + (x.name,)),
            )
    raise TypeError(f"not a term: {t!r}")


def alpha_eq(s: Term, t: Term) -> bool:
    return s == t or nameless(s) == nameless(t)


# ----------------------------------------------------------------------
# Printing


def print_term(t: Term) -> str:
    return _pr(t, 0)


# precedence: 0 = binder position (extends right), 1 = application, 2 = argument
def _pr(t: Term, prec: int) -> str:
    n = numeral_value(t)
    if n is not None:
        return str(n)
    match t:
        case Const(name, annot):
            return name if annot is None else f"{name}[{print_type(annot)}]"
        case Atom(name):
            return name
        case Ext(x, args):
            return f"{x.name}@(" + ", ".join(_pr(r, 0) for r in args) + ")"
        case App(f, x):
            s = f"{_pr(f, 1)} {_pr(x, 2)}"
            return s if prec <= 1 else f"({s})"
        case CtxBoxIntro((), body):
            inner = _pr(body, 1) if isinstance(body, CtxBoxIntro) and not body.binders else _pr(body, 2)
            s = f"box {inner}"
            return s if prec <= 1 else f"({s})"
        case Lam(a, ty, body):
            s = f"\\{a.name}:{print_type(ty)}. {_pr(body, 0)}"
        case CtxBoxIntro(binders, body):
            ctx = ", ".join(f"{a.name}:{print_type(ty)}" for a, ty in binders)
            s = f"[{ctx}] {_pr(body, 0)}"
        case LetBox(x, bound, body):
            s = f"let box {x.name} = {_pr(bound, 0)} in {_pr(body, 0)}"
        case _:
            raise TypeError(f"not a term: {t!r}")
    return s if prec == 0 else f"({s})"
