"""Capture-avoiding substitution of atoms and of unknowns.

Substitutions are applied in one shot; there is deliberately no composition
operation. Apply two substitutions by applying them in sequence.
"""

from __future__ import annotations

from collections.abc import Mapping
from typing import Iterator

from .syntax import (
    App,
    Atom,
    Const,
    CtxBoxIntro,
    Ext,
    Lam,
    LetBox,
    Term,
    Unknown,
    all_names,
    free_atoms,
    free_unknowns,
    fresh_atom,
    fresh_unknown,
)


class ArityError(Exception):
    """An extraction supplies a different number of arguments than the
    substituted box binds."""


class MalformedSubst(ValueError):
    pass


class UnknownSubst(Mapping):
    """A finite map from unknowns to boxes with no free atoms.

    The invariant is checked on construction, so a malformed substitution
    cannot be built.
    """

    __slots__ = ("_map",)

    def __init__(self, mapping: Mapping[Unknown, Term] | None = None, /, **kw: Term):
        m = dict(mapping or {})
        m.update({Unknown(k): v for k, v in kw.items()})
        for x, img in m.items():
            if not isinstance(x, Unknown):
                raise MalformedSubst(f"{x!r} is not an unknown")
            if not isinstance(img, CtxBoxIntro):
                raise MalformedSubst(f"image of {x} is not a box: {img}")
            if free_atoms(img):
                raise MalformedSubst(f"image of {x} has free atoms: {img}")
        self._map = m

    def __getitem__(self, x: Unknown) -> CtxBoxIntro:
        return self._map[x]

    def __iter__(self) -> Iterator[Unknown]:
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __repr__(self):
        inner = ", ".join(f"{x} := {t}" for x, t in self._map.items())
        return f"UnknownSubst[{inner}]"

    def without(self, x: Unknown) -> UnknownSubst:
        if x not in self._map:
            return self
        out = UnknownSubst.__new__(UnknownSubst)
        out._map = {k: v for k, v in self._map.items() if k != x}
        return out

    def restrict(self, keep) -> UnknownSubst:
        out = UnknownSubst.__new__(UnknownSubst)
        out._map = {k: v for k, v in self._map.items() if k in keep}
        return out


def fa_subst(sigma: Mapping[Atom, Term]) -> frozenset[Atom]:
    out = set(sigma)
    for img in sigma.values():
        out |= free_atoms(img)
    return frozenset(out)


def fv_subst(theta: Mapping[Unknown, Term]) -> frozenset[Unknown]:
    out = set(theta)
    for img in theta.values():
        out |= free_unknowns(img)
    return frozenset(out)


# ----------------------------------------------------------------------
# Renaming


def rename_unknown(t: Term, old: Unknown, new: Unknown) -> Term:
    match t:
        case Const() | Atom():
            return t
        case Lam(a, ty, body):
            return Lam(a, ty, rename_unknown(body, old, new))
        case App(f, x):
            return App(rename_unknown(f, old, new), rename_unknown(x, old, new))
        case CtxBoxIntro(binders, body):
            return CtxBoxIntro(binders, rename_unknown(body, old, new))
        case Ext(x, args):
            return Ext(new if x == old else x, tuple(rename_unknown(r, old, new) for r in args))
        case LetBox(x, s, r):
            s = rename_unknown(s, old, new)
            return LetBox(x, s, r if x == old else rename_unknown(r, old, new))
    raise TypeError(f"not a term: {t!r}")


# ----------------------------------------------------------------------
# Atoms-substitution


def subst_atoms(t: Term, sigma: Mapping[Atom, Term]) -> Term:
    """Simultaneous capture-avoiding substitution ``t[a := sigma(a)]``."""
    if not sigma:
        return t
    return _sa(t, dict(sigma))


def _sa(t: Term, sigma: dict[Atom, Term]) -> Term:
    match t:
        case Const():
            return t
        case Atom():
            return sigma.get(t, t)
        case App(f, x):
            return App(_sa(f, sigma), _sa(x, sigma))
        case Ext(x, args):
            return Ext(x, tuple(_sa(r, sigma) for r in args))
        case Lam(c, ty, body):
            (c,), body, sub = _enter_atoms(sigma, (c,), body)
            return Lam(c, ty, body if not sub else _sa(body, sub))
        case CtxBoxIntro(binders, body):
            names, body, sub = _enter_atoms(sigma, tuple(a for a, _ in binders), body)
            new_binders = tuple((a, ty) for a, (_, ty) in zip(names, binders))
            return CtxBoxIntro(new_binders, body if not sub else _sa(body, sub))
        case LetBox(y, s, r):
            s = _sa(s, sigma)
            sub = {a: v for a, v in sigma.items() if a in free_atoms(r)}
            if not sub:
                return LetBox(y, s, r)
            image_fv = set().union(*(free_unknowns(v) for v in sub.values()))
            if y in image_fv:
                avoid = {u.name for u in image_fv} | all_names(r)
                y2 = fresh_unknown(y, avoid)
                r = rename_unknown(r, y, y2)
                y = y2
            return LetBox(y, s, _sa(r, sub))
    raise TypeError(f"not a term: {t!r}")


def _enter_atoms(sigma, binders: tuple[Atom, ...], body: Term):
    """Push ``sigma`` under atom binders, renaming any binder in ``fa(sigma)``."""
    body_fa = free_atoms(body)
    sub = {a: v for a, v in sigma.items() if a in body_fa and a not in binders}
    if not sub:
        return binders, body, {}
    danger = fa_subst(sub)
    if not danger.intersection(binders):
        return binders, body, sub
    avoid = {a.name for a in danger} | all_names(body) | {a.name for a in binders}
    renamed = []
    ren: dict[Atom, Term] = {}
    for a in binders:
        if a in danger:
            a2 = fresh_atom(a, avoid)
            avoid.add(a2.name)
            ren[a] = a2
            renamed.append(a2)
        else:
            renamed.append(a)
    body = _sa(body, ren)
    return tuple(renamed), body, sub


# ----------------------------------------------------------------------
# Unknowns-substitution


def subst_unknowns(t: Term, theta: Mapping[Unknown, Term]) -> Term:
    """Capture-avoiding ``t theta``. Raises ArityError when an extraction's
    argument count differs from the arity of the box substituted for it."""
    if not isinstance(theta, UnknownSubst):
        theta = UnknownSubst(theta)
    if not theta:
        return t
    return _su(t, theta)


def _su(t: Term, theta: UnknownSubst) -> Term:
    match t:
        case Const() | Atom():
            return t
        case Lam(a, ty, body):
            return Lam(a, ty, _su(body, theta))
        case App(f, x):
            return App(_su(f, theta), _su(x, theta))
        case CtxBoxIntro(binders, body):
            return CtxBoxIntro(binders, _su(body, theta))
        case Ext(x, args):
            args = tuple(_su(r, theta) for r in args)
            img = theta.get(x)
            if img is None:
                return Ext(x, args)
            if len(img.binders) != len(args):
                raise ArityError(
                    f"{x} is instantiated by a box binding {len(img.binders)} atoms "
                    f"but applied to {len(args)} arguments"
                )
            return subst_atoms(img.body, dict(zip(img.atoms, args)))
        case LetBox(y, s, r):
            s = _su(s, theta)
            inner = theta.without(y)
            inner = inner.restrict(free_unknowns(r))
            if not inner:
                return LetBox(y, s, r)
            image_fv = set().union(*(free_unknowns(v) for v in inner.values()))
            if y in image_fv:
                avoid = {u.name for u in fv_subst(inner)} | all_names(r)
                y2 = fresh_unknown(y, avoid)
                r = rename_unknown(r, y, y2)
                y = y2
            return LetBox(y, s, _su(r, inner))
    raise TypeError(f"not a term: {t!r}")
