"""Command-line front end.

Exit status is 0 on success, 1 when a program fails to typecheck or
evaluate or a property fails, and 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence

from .corpus import corpus_entries, golden_checks, instances
from .denotation import (
    DBox,
    Den,
    DFun,
    DNat,
    EvalError,
    ProbeBudget,
    evaluate,
    show_den,
)
from .parser import GRAMMAR, Definition, ParseError, parse_program
from .propcheck import SUITES, GenConfig, run_suite
from .reduction import Status, default_fuel, iter_steps, normalize
from .syntax import Arrow, CtxBox, Nat, print_term, print_type
from .typecheck import TypingError, typecheck

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}\n\n{GRAMMAR}", file=sys.stderr)
        raise SystemExit(USAGE)


def _load(path: str) -> list[Definition]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_program(text)
    except ParseError as exc:
        raise UsageError(f"{path}:{exc}\n\n{GRAMMAR}") from None


def _find(defs: list[Definition], name: str) -> Definition:
    for d in defs:
        if d.name == name:
            return d
    raise UsageError(f"no definition named {name!r}; have {', '.join(d.name for d in defs) or 'none'}")


def _checked(d: Definition, mode: str = "contextual") -> None:
    ty = typecheck({}, d.term, mode)
    if ty != d.ty:
        raise TypingError(f"{d.name} is declared {print_type(d.ty)} but has type {print_type(ty)}", d.term)


def _budget(args) -> ProbeBudget:
    return ProbeBudget(nat_probes=tuple(range(args.nat_probes)), fun_probe_depth=args.fun_depth)


# ----------------------------------------------------------------------
# Subcommands


def cmd_check(args) -> int:
    status = OK
    for d in _load(args.file):
        try:
            _checked(d, args.mode)
        except TypingError as exc:
            print(f"{args.file}: {exc}", file=sys.stderr)
            status = FAILED
            continue
        print(f"{d.name} : {print_type(d.ty)}")
    return status


def _tabulate(x: Den, ty, budget: ProbeBudget) -> list[str]:
    rows = []
    if isinstance(x, DFun) and isinstance(ty, Arrow) and isinstance(ty.dom, Nat):
        for k in budget.nat_probes:
            rows.append(f"  {k} -> {show_den(x(DNat(k)))}")
    elif isinstance(x, DBox) and isinstance(ty, CtxBox) and ty.ctx and all(isinstance(t, Nat) for t in ty.ctx):
        for k in budget.nat_probes:
            args = (DNat(k),) * len(ty.ctx)
            rows.append(f"  tail({', '.join(map(str, (k,) * len(ty.ctx)))}) = {show_den(x.tail(args))}")
    return rows


def cmd_eval(args) -> int:
    d = _find(_load(args.file), args.defn)
    try:
        _checked(d)
        value = evaluate({}, d.term)
    except (TypingError, EvalError) as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return FAILED
    print(show_den(value))
    if args.probe:
        for row in _tabulate(value, d.ty, _budget(args)):
            print(row)
    return OK


def cmd_step(args) -> int:
    d = _find(_load(args.file), args.defn)
    try:
        _checked(d)
    except TypingError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return FAILED
    t = d.term
    if args.all:
        for s in iter_steps(t):
            print(f"{s.rule} @ {_path(s.path)} : {print_term(s.result)}")
        return OK
    for _ in range(args.n):
        s = next(iter_steps(t), None)
        if s is None:
            print("normal form")
            break
        print(f"{s.rule} @ {_path(s.path)} : {print_term(s.result)}")
        t = s.result
    return OK


def _path(path) -> str:
    return "/" + "/".join(map(str, path)) if path else "/"


def cmd_normalize(args) -> int:
    d = _find(_load(args.file), args.defn)
    try:
        _checked(d)
    except TypingError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return FAILED
    fuel = args.fuel if args.fuel is not None else default_fuel()
    report = normalize(d.term, fuel)
    print(print_term(report.result))
    note = "normal form" if report.status is Status.NORMAL else "fuel exhausted"
    print(f"-- {note} after {report.steps} steps", file=sys.stderr)
    return OK


def cmd_props(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    modes = ["modal", "contextual"] if args.mode == "both" else [args.mode]
    status = OK
    for mode in modes:
        cfg = GenConfig(seed=args.seed, max_size=args.max_size, mode=mode)
        for name in names:
            report = run_suite(name, args.cases, cfg, budget=_budget(args))
            if args.json:
                print(report.to_json())
            else:
                verdict = "ok" if report.ok else f"{len(report.failures)} FAILED"
                print(f"{name} [{mode}]: {report.cases} cases, {verdict}")
                for f in report.failures:
                    print(f"  seed {f.seed}: {f.property}\n    {f.term}")
            if not report.ok:
                status = FAILED
    return status


def cmd_corpus(args) -> int:
    status = OK
    for e in corpus_entries():
        try:
            e.check()
            print(f"{e.name} : {print_type(e.ty)}  [{e.mode}]")
        except TypingError as exc:
            print(f"{e.name}: {exc}", file=sys.stderr)
            status = FAILED
    print(f"-- {sum(1 for _ in instances())} schematic instances")
    if args.golden:
        for g in golden_checks():
            print(f"{'PASS' if g.ok else 'FAIL'} {g.name}: {g.detail}")
            if not g.ok:
                status = FAILED
    return status


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="boxcalc", description=__doc__.splitlines()[0])
    p.add_argument("--nat-probes", type=int, default=9, metavar="K", help="probe naturals 0..K-1 (default 9)")
    p.add_argument("--fun-depth", type=int, default=2, metavar="D", help="probing depth at function types")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="typecheck every definition")
    c.add_argument("file")
    c.add_argument("--mode", choices=("modal", "contextual"), default="contextual")
    c.set_defaults(func=cmd_check)

    e = sub.add_parser("eval", help="print the denotation of a definition")
    e.add_argument("file")
    e.add_argument("--def", dest="defn", required=True, metavar="NAME")
    e.add_argument("--probe", action="store_true", help="tabulate functions of naturals over the probes")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("step", help="show reduction steps")
    s.add_argument("file")
    s.add_argument("--def", dest="defn", required=True, metavar="NAME")
    s.add_argument("-n", type=int, default=1, help="number of leftmost-outermost steps (default 1)")
    s.add_argument("--all", action="store_true", help="list every one-step reduct instead")
    s.set_defaults(func=cmd_step)

    n = sub.add_parser("normalize", help="reduce to normal form")
    n.add_argument("file")
    n.add_argument("--def", dest="defn", required=True, metavar="NAME")
    n.add_argument("--fuel", type=int, default=None, help="step limit (default $BOXCALC_FUEL or 100000)")
    n.set_defaults(func=cmd_normalize)

    pr = sub.add_parser("props", help="run property suites")
    pr.add_argument("--suite", choices=("all", *SUITES), default="all")
    pr.add_argument("--cases", type=int, default=100)
    pr.add_argument("--seed", type=int, default=1)
    pr.add_argument("--mode", choices=("modal", "contextual", "both"), default="contextual")
    pr.add_argument("--max-size", type=int, default=40)
    pr.add_argument("--json", action="store_true", help="one JSON report per suite")
    pr.set_defaults(func=cmd_props)

    co = sub.add_parser("corpus", help="typecheck the built-in corpus")
    co.add_argument("--golden", action="store_true", help="also run the golden checks")
    co.set_defaults(func=cmd_corpus)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "fuel", None) is not None and args.fuel < 1:
        print("boxcalc: error: fuel must be positive", file=sys.stderr)
        return USAGE
    if args.nat_probes < 1:
        print("boxcalc: error: need at least one nat probe", file=sys.stderr)
        return USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"boxcalc: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
