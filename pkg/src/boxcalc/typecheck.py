"""Type synthesis for the contextual rules, with a strict modal mode.

Every rule is syntax-directed, so synthesis is deterministic: ``typecheck``
returns the unique type of a term or raises a ``TypingError`` naming the
rule that failed.
"""

from __future__ import annotations

from collections.abc import Mapping
from typing import Literal

from .substitution import UnknownSubst
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
    O,
    Term,
    Type,
    Unknown,
    arrows,
    free_atoms,
    is_modal_type,
    print_type,
)

Mode = Literal["modal", "contextual"]
TypingCtx = Mapping[Name, Type]


class TypingError(Exception):
    rule = "?"

    def __init__(self, message: str, term: Term | None = None, rule: str | None = None):
        self.term = term
        self.span = getattr(term, "span", None)
        if rule is not None:
            self.rule = rule
        where = f"{self.span[0]}:{self.span[1]}: " if self.span else ""
        super().__init__(f"{where}{type(self).__name__} [{self.rule}] {message}")


class UnboundAtom(TypingError):
    rule = "Hyp"


class UnboundUnknown(TypingError):
    rule = "Ext"


class NotAFunction(TypingError):
    rule = "->E"


class ArgMismatch(TypingError):
    rule = "->E"


class BoxOpenBody(TypingError):
    rule = "[]I"


class ExtArityMismatch(TypingError):
    rule = "Ext"


class ExtArgMismatch(TypingError):
    rule = "Ext"


class LetBoxNotBox(TypingError):
    rule = "[]E"


class NonBoxUnknownInCtx(TypingError):
    rule = "Ext"


class ModalModeViolation(TypingError):
    rule = "[]I"


class Ambiguous(TypingError):
    rule = "Const"


def const_type(c: Const) -> Type:
    """The type of a constant; schematic constants need their annotation."""
    match c.name:
        case "top" | "bot":
            return O
        case "zero":
            return NAT
        case "succ":
            return Arrow(NAT, NAT)
        case "plus" | "times":
            return arrows(NAT, NAT, NAT)
        case "neg":
            return Arrow(O, O)
        case "and":
            return arrows(O, O, O)
        case "isapp":
            if c.annot is None:
                raise Ambiguous("isapp needs an annotation or an argument", c)
            return Arrow(c.annot, O)
        case "natrec":
            if c.annot is None:
                raise Ambiguous("natrec needs an annotation or an argument", c)
            a = c.annot
            return arrows(a, arrows(NAT, a, a), NAT, a)
    raise ValueError(c.name)


def typecheck(ctx: TypingCtx, t: Term, mode: Mode = "contextual") -> Type:
    for name, ty in ctx.items():
        if isinstance(name, Unknown) and not isinstance(ty, CtxBox):
            raise NonBoxUnknownInCtx(f"{name} : {print_type(ty)} is not a box type", t)
        if mode == "modal" and not is_modal_type(ty):
            raise ModalModeViolation(f"context type {print_type(ty)} has a nonempty box context", t)
    return _synth(dict(ctx), t, mode)


def has_type(ctx: TypingCtx, t: Term, ty: Type, mode: Mode = "contextual") -> bool:
    try:
        return typecheck(ctx, t, mode) == ty
    except TypingError:
        return False


def _check_annotation(ty: Type, t: Term, mode: Mode) -> None:
    if mode == "modal" and not is_modal_type(ty):
        raise ModalModeViolation(f"type {print_type(ty)} has a nonempty box context", t)


def _synth(ctx: dict, t: Term, mode: Mode) -> Type:
    match t:
        case Const(annot=annot):
            if annot is not None:
                _check_annotation(annot, t, mode)
            return const_type(t)
        case Atom():
            ty = ctx.get(t)
            if ty is None:
                raise UnboundAtom(f"atom {t.name} is not in the context", t)
            return ty
        case Lam(a, ty, body):
            _check_annotation(ty, t, mode)
            inner = dict(ctx)
            inner[a] = ty
            return Arrow(ty, _synth(inner, body, mode))
        case App(f, x):
            if isinstance(f, Const) and f.annot is None and f.name in ("isapp", "natrec"):
                xt = _synth(ctx, x, mode)
                if f.name == "isapp":
                    if not isinstance(xt, CtxBox):
                        raise ArgMismatch(f"isapp expects a box, got {print_type(xt)}", x)
                    return O
                return arrows(arrows(NAT, xt, xt), NAT, xt)
            ft = _synth(ctx, f, mode)
            if not isinstance(ft, Arrow):
                raise NotAFunction(f"applied term has type {print_type(ft)}", f)
            xt = _synth(ctx, x, mode)
            if xt != ft.dom:
                raise ArgMismatch(f"expected {print_type(ft.dom)}, got {print_type(xt)}", x)
            return ft.cod
        case CtxBoxIntro(binders, body):
            if mode == "modal" and binders:
                raise ModalModeViolation("box with a nonempty context", t)
            bound = {a for a, _ in binders}
            stray = free_atoms(body) - bound
            if stray:
                names = ", ".join(sorted(a.name for a in stray))
                raise BoxOpenBody(f"box body has free atoms {{{names}}} outside its context", t)
            inner = dict(ctx)
            for a, ty in binders:
                _check_annotation(ty, t, mode)
                inner[a] = ty
            return CtxBox(tuple(ty for _, ty in binders), _synth(inner, body, mode))
        case Ext(x, args):
            ty = ctx.get(x)
            if ty is None:
                raise UnboundUnknown(f"unknown {x} is not in the context", t)
            if not isinstance(ty, CtxBox):
                raise NonBoxUnknownInCtx(f"{x} : {print_type(ty)} is not a box type", t)
            if len(ty.ctx) != len(args):
                raise ExtArityMismatch(f"{x} expects {len(ty.ctx)} arguments, got {len(args)}", t)
            for want, r in zip(ty.ctx, args):
                got = _synth(ctx, r, mode)
                if got != want:
                    raise ExtArgMismatch(f"expected {print_type(want)}, got {print_type(got)}", r)
            return ty.body
        case LetBox(x, s, r):
            st = _synth(ctx, s, mode)
            if not isinstance(st, CtxBox):
                raise LetBoxNotBox(f"let box binds a term of type {print_type(st)}", s)
            inner = dict(ctx)
            inner[x] = st
            return _synth(inner, r, mode)
    raise TypeError(f"not a term: {t!r}")


def check_subst_typing_unknowns(ctx: TypingCtx, theta: Mapping[Unknown, Term], mode: Mode = "contextual") -> bool:
    """``ctx |- theta``: each image has the box type its unknown has in ctx."""
    try:
        theta = UnknownSubst(theta)
    except ValueError:
        return False
    for x, img in theta.items():
        want = ctx.get(x)
        if not isinstance(want, CtxBox) or not has_type(ctx, img, want, mode):
            return False
    return True


def check_subst_typing_atoms(ctx: TypingCtx, sigma: Mapping[Atom, Term], mode: Mode = "contextual") -> bool:
    """``ctx |- sigma``: each image has the type its atom has in ctx."""
    for a, img in sigma.items():
        want = ctx.get(a)
        if want is None or not has_type(ctx, img, want, mode):
            return False
    return True


def restrict(ctx: TypingCtx, keep) -> dict:
    return {k: v for k, v in ctx.items() if k in keep}
