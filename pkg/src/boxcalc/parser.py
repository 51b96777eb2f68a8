"""Concrete syntax.

Lowercase identifiers are atoms, uppercase identifiers are unknowns (or, in
type position, uninterpreted base types). ``box r`` abbreviates ``[] r``,
``X!`` abbreviates ``X@()`` and a numeral ``n`` is ``succ^n zero``.
Program files are sequences of ``def name : TYPE = TERM ;`` with ``--`` line
comments; a definition may mention earlier definitions by name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    CONST_NAMES,
    NAT,
    RESERVED,
    App,
    Arrow,
    Atom,
    Const,
    CtxBox,
    CtxBoxIntro,
    Ext,
    Lam,
    LetBox,
    O,
    TBase,
    Term,
    Type,
    Unknown,
    free_atoms,
    numeral,
)

GRAMMAR = """\
type ::= "o" | "nat" | NAME | type "->" type | "[" [type {"," type}] "]" type | "(" type ")"
term ::= atom | UNKNOWN "@(" [term {"," term}] ")" | UNKNOWN "!" | "\\" atom ":" type "." term
       | term term | "[" [atom ":" type {"," atom ":" type}] "]" term | "box" term
       | "let" "box" UNKNOWN "=" term "in" term | const | NUMBER | "(" term ")"
const ::= "top" | "bot" | "isapp" | "zero" | "succ" | "plus" | "times" | "neg" | "and" | "natrec"
        (isapp and natrec accept an adjacent annotation, e.g. isapp[[]nat], natrec[nat])
program ::= { "def" NAME ":" type "=" term ";" }   (only lowercase names can be referenced later)"""


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int, expected: frozenset[str] = frozenset()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = expected
        detail = f" (expected one of: {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"{line}:{col}: {message}{detail}")


@dataclass(frozen=True)
class Token:
    kind: str  # "lower", "upper", "num", "annot", "eof" or the punctuation itself
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+|--[^\n]*)
  | (?P<nl>\n)
  | (?P<num>\d+)
  | (?P<lower>[a-z][A-Za-z0-9_']*)
  | (?P<upper>[A-Z][A-Za-z0-9_']*)
  | (?P<punct>->|[\\λ.:,()\[\]@!=;])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            tok = m.group()
            if kind == "punct":
                kind = "\\" if tok == "λ" else tok
                # an annotation bracket must touch its constant
                if tok == "[" and out and out[-1].text in ("isapp", "natrec") and out[-1].col + len(out[-1].text) == col and out[-1].line == line:
                    kind = "annot"
            out.append(Token(kind, "\\" if tok == "λ" else tok, line, col))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


_TERM_START = frozenset({"lower", "upper", "num", "(", "[", "\\", "box", "let"})


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- token plumbing

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def _kind(self, tok: Token) -> str:
        if tok.kind == "lower" and tok.text in ("box", "let", "in", "def"):
            return tok.text
        return tok.kind

    def peek(self) -> str:
        return self._kind(self.tok)

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, *kinds: str) -> Token:
        if self.peek() not in kinds:
            self.fail(kinds)
        return self.advance()

    def fail(self, expected) -> None:
        tok = self.tok
        what = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"unexpected {what}", tok.line, tok.col, frozenset(expected))

    def at_end(self) -> bool:
        return self.tok.kind == "eof"

    # -- types

    def type(self) -> Type:
        left = self.btype()
        if self.peek() == "->":
            self.advance()
            return Arrow(left, self.type())
        return left

    def btype(self) -> Type:
        k = self.peek()
        tok = self.tok
        if k == "lower" and tok.text == "o":
            self.advance()
            return O
        if k == "lower" and tok.text == "nat":
            self.advance()
            return NAT
        if k == "upper":
            self.advance()
            return TBase(tok.text)
        if k in ("[", "annot"):
            self.advance()
            ctx = []
            if self.peek() != "]":
                ctx.append(self.type())
                while self.peek() == ",":
                    self.advance()
                    ctx.append(self.type())
            self.expect("]")
            return CtxBox(tuple(ctx), self.btype())
        if k == "(":
            self.advance()
            ty = self.type()
            self.expect(")")
            return ty
        self.fail({"o", "nat", "NAME", "[", "("})

    # -- terms

    def atom(self) -> Atom:
        tok = self.expect("lower")
        if tok.text in RESERVED:
            raise ParseError(f"{tok.text!r} is reserved", tok.line, tok.col, frozenset({"atom"}))
        return Atom(tok.text, span=(tok.line, tok.col))

    def term(self) -> Term:
        if self.peek() in ("\\", "[", "let"):
            return self.binder_term()
        head = self.unary()
        while True:
            k = self.peek()
            if k in ("\\", "[", "let"):
                tok = self.tok
                return App(head, self.binder_term(), span=(tok.line, tok.col))
            if k in ("lower", "upper", "num", "(", "box"):
                tok = self.tok
                head = App(head, self.unary(), span=(tok.line, tok.col))
                continue
            return head

    def binder_term(self) -> Term:
        tok = self.tok
        span = (tok.line, tok.col)
        k = self.peek()
        if k == "\\":
            self.advance()
            a = self.atom()
            self.expect(":")
            ty = self.type()
            self.expect(".")
            return Lam(a, ty, self.term(), span=span)
        if k == "[":
            self.advance()
            binders = []
            if self.peek() != "]":
                binders.append(self.binding())
                while self.peek() == ",":
                    self.advance()
                    binders.append(self.binding())
            self.expect("]")
            names = [a.name for a, _ in binders]
            if len(set(names)) != len(names):
                raise ParseError("box binders must be distinct", *span)
            return CtxBoxIntro(tuple(binders), self.term(), span=span)
        self.expect("let")
        self.expect("box")
        x = Unknown(self.expect("upper").text)
        self.expect("=")
        bound = self.term()
        self.expect("in")
        return LetBox(x, bound, self.term(), span=span)

    def binding(self) -> tuple[Atom, Type]:
        a = self.atom()
        self.expect(":")
        return a, self.type()

    def unary(self) -> Term:
        if self.peek() == "box":
            tok = self.advance()
            span = (tok.line, tok.col)
            if self.peek() in ("\\", "[", "let"):
                return CtxBoxIntro((), self.binder_term(), span=span)
            return CtxBoxIntro((), self.unary(), span=span)
        return self.atomic()

    def atomic(self) -> Term:
        tok = self.tok
        span = (tok.line, tok.col)
        k = self.peek()
        if k == "num":
            self.advance()
            return numeral(int(tok.text))
        if k == "lower":
            if tok.text in CONST_NAMES:
                self.advance()
                annot = None
                if self.peek() == "annot":
                    self.advance()
                    annot = self.type()
                    self.expect("]")
                if tok.text == "isapp" and annot is not None and not isinstance(annot, CtxBox):
                    raise ParseError("isapp is annotated with a box type", *span)
                return Const(tok.text, annot, span=span)
            return self.atom()
        if k == "upper":
            self.advance()
            x = Unknown(tok.text)
            if self.peek() == "!":
                self.advance()
                return Ext(x, (), span=span)
            self.expect("@")
            self.expect("(")
            args = []
            if self.peek() != ")":
                args.append(self.term())
                while self.peek() == ",":
                    self.advance()
                    args.append(self.term())
            self.expect(")", ",")
            return Ext(x, tuple(args), span=span)
        if k == "(":
            self.advance()
            t = self.term()
            self.expect(")")
            return t
        self.fail(_TERM_START)


def parse_term(text: str) -> Term:
    p = Parser(text)
    t = p.term()
    if not p.at_end():
        p.fail({"end of input"})
    return t


def parse_type(text: str) -> Type:
    p = Parser(text)
    ty = p.type()
    if not p.at_end():
        p.fail({"end of input", "->"})
    return ty


@dataclass(frozen=True)
class Definition:
    name: str
    ty: Type
    term: Term
    line: int


def parse_program(text: str) -> list[Definition]:
    """Parse a program file. Each definition's term has earlier
    definitions substituted for their names."""
    from .substitution import subst_atoms

    p = Parser(text)
    defs: list[Definition] = []
    env: dict[Atom, Term] = {}
    while not p.at_end():
        tok = p.expect("def")
        # uppercase names are allowed but, reading as unknowns, cannot be referenced
        name = p.atom().name if p.peek() == "lower" else p.expect("upper").text
        p.expect(":")
        ty = p.type()
        p.expect("=")
        t = p.term()
        p.expect(";")
        if name in {d.name for d in defs}:
            raise ParseError(f"duplicate definition {name!r}", tok.line, tok.col)
        used = {a: env[a] for a in free_atoms(t) if a in env}
        if used:
            t = subst_atoms(t, used)
        defs.append(Definition(name, ty, t, tok.line))
        if name[0].islower():
            env[Atom(name)] = t
    return defs
