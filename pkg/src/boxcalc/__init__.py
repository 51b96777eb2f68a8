"""Modal and contextual modal type theory: syntax, typing, reduction and an
inflated denotational semantics in which box values carry their syntax."""

from .denotation import DBool, DBox, Den, DFun, DNat, evaluate, hd, shapely, tl
from .parser import ParseError, parse_program, parse_term, parse_type
from .reduction import normalize, step_all
from .substitution import UnknownSubst, subst_atoms, subst_unknowns
from .syntax import (
    Atom,
    Term,
    Type,
    Unknown,
    alpha_eq,
    free_atoms,
    free_unknowns,
    print_term,
    print_type,
)
from .typecheck import TypingError, typecheck

__all__ = [
    "Atom", "DBool", "DBox", "DFun", "DNat", "Den", "ParseError", "Term", "Type", "TypingError",
    "Unknown", "UnknownSubst", "alpha_eq", "evaluate", "free_atoms", "free_unknowns", "hd",
    "normalize", "parse_program", "parse_term", "parse_type", "print_term", "print_type",
    "shapely", "step_all", "subst_atoms", "subst_unknowns", "tl", "typecheck",
]
