"""One-step reduction and normalization.

Reduction happens anywhere except inside a box: under lambdas, in both parts
of a ``let box`` and in extraction arguments. Redexes are enumerated
leftmost-outermost.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from typing import Iterator

from .substitution import ArityError, UnknownSubst, subst_atoms, subst_unknowns
from .syntax import (
    BOT,
    TOP,
    App,
    Const,
    CtxBoxIntro,
    Ext,
    Lam,
    LetBox,
    Term,
    app,
    free_atoms,
    numeral,
    numeral_value,
    spine,
)

DEFAULT_FUEL = 100_000

Path = tuple[int, ...]


@dataclass(frozen=True)
class Step:
    path: Path
    rule: str
    result: Term


class Status(enum.Enum):
    NORMAL = "normal"
    FUEL_EXHAUSTED = "fuel exhausted"


@dataclass(frozen=True)
class NormalizeReport:
    result: Term
    steps: int
    status: Status


def default_fuel() -> int:
    return int(os.environ.get("BOXCALC_FUEL", DEFAULT_FUEL))


def root_redex(t: Term) -> tuple[str, Term] | None:
    """The rule firing at the root of ``t`` and its contractum, if any."""
    match t:
        case App(Lam(a, _, body), arg):
            return "beta", subst_atoms(body, {a: arg})
        case LetBox(x, CtxBoxIntro() as b, body):
            if free_atoms(b):
                return None
            try:
                out = subst_unknowns(body, UnknownSubst({x: b}))
            except ArityError:
                return None
            return ("beta_box" if not b.binders else "beta_ctx"), out
        case App(Const("isapp"), CtxBoxIntro(_, inner)):
            if isinstance(inner, App):
                return "isapp_top", TOP
            # an extraction may still be instantiated with an application
            if isinstance(inner, Ext):
                return None
            return "isapp_bot", BOT
        case App():
            return _delta(t)
    return None


def _delta(t: Term) -> tuple[str, Term] | None:
    head, args = spine(t)
    if not isinstance(head, Const):
        return None
    match head.name, args:
        case ("plus" | "times") as op, [m, n]:
            mv, nv = numeral_value(m), numeral_value(n)
            if mv is None or nv is None:
                return None
            return f"delta_{op}", numeral(mv + nv if op == "plus" else mv * nv)
        case "neg", [Const("top")]:
            return "delta_neg", BOT
        case "neg", [Const("bot")]:
            return "delta_neg", TOP
        case "and", [Const("top" | "bot") as p, Const("top" | "bot") as q]:
            both = p.name == "top" and q.name == "top"
            return "delta_and", TOP if both else BOT
        case "natrec", [z, s, Const("zero")]:
            return "delta_natrec", z
        case "natrec", [z, s, App(Const("succ"), m)]:
            return "delta_natrec", app(s, m, app(head, z, s, m))
    return None


def iter_steps(t: Term) -> Iterator[Step]:
    """Every one-step reduct of ``t``, leftmost-outermost first."""
    hit = root_redex(t)
    if hit is not None:
        yield Step((), hit[0], hit[1])
    match t:
        case App(f, x):
            for s in iter_steps(f):
                yield Step((0,) + s.path, s.rule, App(s.result, x))
            for s in iter_steps(x):
                yield Step((1,) + s.path, s.rule, App(f, s.result))
        case Lam(a, ty, body):
            for s in iter_steps(body):
                yield Step((0,) + s.path, s.rule, Lam(a, ty, s.result))
        case LetBox(x, bound, body):
            for s in iter_steps(bound):
                yield Step((0,) + s.path, s.rule, LetBox(x, s.result, body))
            for s in iter_steps(body):
                yield Step((1,) + s.path, s.rule, LetBox(x, bound, s.result))
        case Ext(x, args):
            for i, r in enumerate(args):
                for s in iter_steps(r):
                    new = args[:i] + (s.result,) + args[i + 1 :]
                    yield Step((i,) + s.path, s.rule, Ext(x, new))


def step_all(t: Term) -> list[Step]:
    return list(iter_steps(t))


def subterm_at(t: Term, path: Path) -> Term:
    for i in path:
        match t:
            case App(f, x):
                t = (f, x)[i]
            case Lam(_, _, body):
                t = body
            case LetBox(_, bound, body):
                t = (bound, body)[i]
            case Ext(_, args):
                t = args[i]
            case _:
                raise IndexError(f"path {path} leaves the term")
    return t


def normalize(t: Term, fuel: int | None = None) -> NormalizeReport:
    fuel = default_fuel() if fuel is None else fuel
    if fuel < 1:
        raise ValueError("fuel must be positive")
    steps = 0
    while steps < fuel:
        step = next(iter_steps(t), None)
        if step is None:
            return NormalizeReport(t, steps, Status.NORMAL)
        t = step.result
        steps += 1
    status = Status.NORMAL if next(iter_steps(t), None) is None else Status.FUEL_EXHAUSTED
    return NormalizeReport(t, steps, status)
