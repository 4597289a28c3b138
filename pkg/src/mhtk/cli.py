"""Command-line interface.  Exit codes: 0 yes, 1 no, 2 error."""

from __future__ import annotations

import argparse
import os
import random
import re
import sys

from .algebra import FiniteAlgebra, find_falsifying_valuation, find_multi_hyper_counterexample
from .colored import (
    CApp,
    colored_inductive_compose,
    colored_positional_compose,
    parse_colored,
    render_colored,
)
from .deduction import ProofRejected, SearchBudget, check_proof, mh_closure_bounded, parse_proof, prove
from .fileio import parse_equations, parse_monoid, parse_rho
from .hypersub import Hypersubstitution, Monoid
from .multihyp import apply_mhs
from .terms import (
    MhtkError,
    Signature,
    depth,
    infer_signature,
    inductive_compose,
    iter_positions,
    parse_identity,
    parse_position,
    parse_term,
    positional_compose,
    render_position,
    render_term,
)
from .transducer import derive_randomly, from_mhs, parse_productions, run

YES, NO, ERROR = 0, 1, 2


class UsageError(MhtkError):
    pass


def _read(arg: str) -> tuple[str, str]:
    """Return (text, base directory); ``arg`` is a file path or literal text."""
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read().strip(), os.path.dirname(os.path.abspath(arg))
    return arg, os.getcwd()


def _text(arg: str) -> str:
    return _read(arg)[0]


def _is_colored(text: str) -> bool:
    return "^" in text


_RHS_RE = re.compile(r"->\s*(.+)$")


def _snippets(kind: str, text: str) -> list[str]:
    """Term texts inside a file, for signature inference."""
    if kind in ("term", "identity"):
        return [text]
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line or line.startswith("monoid") or line.startswith("["):
            continue
        if kind == "eqs":
            out.append(line)
        elif kind in ("rho", "monoid", "productions"):
            if kind == "productions":
                out.extend(s.strip() for s in line.split("->"))
            else:
                m = _RHS_RE.search(line)
                if m:
                    out.append(m.group(1))
    return out


def _algebra_sig(text: str) -> Signature:
    return FiniteAlgebra.parse(text).sig


class Workspace:
    """Loads inputs against one signature, given by --sig or inferred from every input."""

    def __init__(self, args, inputs: list[tuple[str, str]]):
        self.args = args
        self.texts = {}
        for kind, arg in inputs:
            if arg is not None:
                self.texts[(kind, arg)] = _read(arg)
        if args.sig:
            with open(args.sig, encoding="utf-8") as fh:
                self.sig = Signature.parse(fh.read())
        else:
            sig = Signature()
            snippets = []
            for (kind, _), (text, _) in self.texts.items():
                if kind == "algebra":
                    sig = sig.merge(_algebra_sig(text))
                elif kind != "position":
                    snippets += _snippets(kind, text)
            self.sig = sig.merge(infer_signature(snippets))

    def text(self, kind, arg):
        return self.texts[(kind, arg)][0]

    def base(self, kind, arg):
        return self.texts[(kind, arg)][1]

    def term(self, arg):
        text = self.text("term", arg)
        return parse_colored(text, self.sig) if _is_colored(text) else parse_term(text, self.sig)

    def rho(self, arg):
        return parse_rho(self.text("rho", arg), self.sig, self.base("rho", arg))

    def monoid(self, arg):
        if arg is None:
            return Monoid.explicit([Hypersubstitution.identity(self.sig)], names=("identity",))
        return parse_monoid(self.text("monoid", arg), self.sig)

    def equations(self, arg):
        return parse_equations(self.text("eqs", arg), self.sig)

    def algebra(self, arg):
        return FiniteAlgebra.parse(self.text("algebra", arg), self.sig)


def _render(t) -> str:
    return render_colored(t) if type(t) is CApp or _has_color(t) else render_term(t)


def _has_color(t) -> bool:
    return any(type(u) is CApp for _, u in iter_positions(t))


# ---------------------------------------------------------------- commands


def cmd_parse(args) -> int:
    ws = Workspace(args, [("term", args.term)])
    t = ws.term(args.term)
    print(_render(t))
    if args.positions:
        for p, u in iter_positions(t):
            print(f"  {render_position(p)}\t{_render(u)}")
    if args.verbose:
        print(f"# depth {depth(t)}; signature {ws.sig.render().strip()}", file=sys.stderr)
    return YES


def cmd_compose(args) -> int:
    first_kind = "position" if args.pos else "term"
    ws = Workspace(args, [("term", args.term), (first_kind, args.first), ("term", args.second)])
    t = ws.term(args.term)
    a = ws.term(args.second)
    if args.pos:
        p = parse_position(args.first, ws.sig.maxar if ws.sig.symbols else None)
        if _has_color(t) or _has_color(a):
            out = colored_positional_compose(t, p, a)
        else:
            out = positional_compose(t, [(p, a)])
    else:
        r = ws.term(args.first)
        if _has_color(t) or _has_color(r) or _has_color(a):
            out = colored_inductive_compose(t, r, a)
        else:
            out = inductive_compose(t, [(r, a)])
    print(_render(out))
    return YES


def cmd_apply(args) -> int:
    ws = Workspace(args, [("rho", args.rho), ("term", args.term)])
    rho = ws.rho(args.rho)
    ct = ws.term(args.term)
    print(_render(apply_mhs(rho, ct)))
    return YES


def _identities(ws, args):
    eqs = []
    if args.eqs:
        eqs += ws.equations(args.eqs)
    eqs += [parse_identity(ws.text("identity", e), ws.sig) for e in args.identity]
    return eqs


def cmd_check(args) -> int:
    inputs = [("algebra", args.algebra), ("monoid", args.mhs), ("eqs", args.eqs), ("eqs", args.sigma)]
    inputs += [("identity", e) for e in args.identity]
    inputs += [("proof", args.proof)] if args.proof else []
    ws = Workspace(args, inputs)
    if args.proof:
        m = ws.monoid(args.mhs)
        sigma = ws.equations(args.sigma) if args.sigma else []
        proof = parse_proof(ws.text("proof", args.proof), m)
        try:
            check_proof(sigma, proof, m)
        except ProofRejected as exc:
            print(f"rejected: {exc}")
            return NO
        print(f"ok: {proof.goal}")
        return YES
    if args.algebra is None:
        raise UsageError("check needs --algebra (or --proof)")
    A = ws.algebra(args.algebra)
    eqs = _identities(ws, args)
    if not eqs:
        raise UsageError("no identities to check")
    m = ws.monoid(args.mhs) if args.mhs else None
    all_ok = True
    for e in eqs:
        if m is None:
            v = find_falsifying_valuation(A, e)
            if v is None:
                print(f"holds: {e}")
            else:
                all_ok = False
                print(f"fails: {e}")
                print(f"  valuation: {_valuation(v)}")
            continue
        cex = find_multi_hyper_counterexample(A, e, m)
        if cex is None:
            print(f"multi-hyperidentity: {e}")
            continue
        all_ok = False
        print(f"not a multi-hyperidentity: {e}")
        assignment = ", ".join(f"{side}@{pos}={name}" for (side, pos), name in cex.assignment(m).items())
        print(f"  assignment: {assignment}")
        print(f"  colored: {render_colored(cex.lhs_source)} = {render_colored(cex.rhs_source)}")
        print(f"  image: {cex.image}")
        print(f"  valuation: {_valuation(cex.valuation)}")
        print(f"  values: {cex.lhs_value} != {cex.rhs_value}")
    return YES if all_ok else NO


def _valuation(v) -> str:
    return ", ".join(f"x{i}={a}" for i, a in sorted(v.items()))


def _budget(args) -> SearchBudget:
    return SearchBudget.parse(args.budget) if args.budget else SearchBudget()


def cmd_prove(args) -> int:
    ws = Workspace(args, [("eqs", args.sigma), ("monoid", args.mhs), ("identity", args.goal)])
    sigma = ws.equations(args.sigma) if args.sigma else []
    goal = parse_identity(ws.text("identity", args.goal), ws.sig)
    result = prove(sigma, goal, ws.monoid(args.mhs), _budget(args))
    if result.found:
        sys.stdout.write(result.proof.render())
        return YES
    print(f"not found ({result.status} after {result.rounds} rounds, {result.derived} identities)")
    return NO


def cmd_closure(args) -> int:
    ws = Workspace(args, [("eqs", args.sigma), ("monoid", args.mhs)])
    sigma = ws.equations(args.sigma) if args.sigma else []
    closure = mh_closure_bounded(sigma, ws.monoid(args.mhs), _budget(args))
    for e in closure.ordered:
        if args.include_trivial or e.lhs != e.rhs:
            print(e)
    state = "budget exhausted" if closure.exhausted else "saturated"
    print(f"# {len(closure)} identities, {state}", file=sys.stderr)
    return YES


def cmd_transduce(args) -> int:
    if (args.rho is None) == (args.productions is None):
        raise UsageError("transduce needs exactly one of --rho and --productions")
    ws = Workspace(args, [("rho", args.rho), ("productions", args.productions), ("term", args.term)])
    ct = ws.term(args.term)
    if args.rho:
        T = from_mhs(ws.rho(args.rho))
    else:
        T = parse_productions(ws.text("productions", args.productions), ws.sig)
    if args.random_order:
        out = derive_randomly(T, ct, random.Random(args.seed))
    else:
        out = run(T, ct)
    print(_render(out))
    return YES


def cmd_selftest(args) -> int:
    from .golden import golden_checks

    failed = 0
    for name, check in golden_checks():
        ok = bool(check())
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return YES if failed == 0 else NO


# ---------------------------------------------------------------- wiring


def _global_flags(p: argparse.ArgumentParser, defaults: bool) -> None:
    # accepted before or after the command name
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--sig", default=d(None), help="signature file (lines 'f 2'); inferred from the inputs if omitted")
    p.add_argument("--seed", type=int, default=d(0), help="seed for randomized steps")
    p.add_argument("--budget", default=d(None), help="search budget, e.g. depth=3,count=2000,steps=4,palette=3")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mhtk", description="Colored terms, multi-hypersubstitutions and transducers.")
    _global_flags(ap, defaults=True)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, defaults=False)
    sub = ap.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    p = sub.add_parser("parse", help="parse and re-render a term or colored term")
    p.add_argument("term")
    p.add_argument("--positions", action="store_true", help="list every position with its subterm")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("compose", help="positional (--pos T P S) or inductive (--ind T R S) composition")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--pos", action="store_true")
    mode.add_argument("--ind", action="store_true")
    p.add_argument("term")
    p.add_argument("first", help="position (--pos) or the subterm to replace (--ind)")
    p.add_argument("second", help="the replacement")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("apply", help="apply a multi-hypersubstitution to a colored term")
    p.add_argument("rho")
    p.add_argument("term")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("check", help="check identities in a finite algebra, or check a proof")
    p.add_argument("identity", nargs="*", help="identities 'lhs = rhs' (or files holding one)")
    p.add_argument("--algebra")
    p.add_argument("--mhs", help="monoid file; checks multi-hyperidentities over it")
    p.add_argument("--eqs", help="equation file with identities to check")
    p.add_argument("--proof", help="proof file to validate against --sigma and --mhs")
    p.add_argument("--sigma", help="axioms for --proof")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("prove", help="bounded search for a proof")
    p.add_argument("--sigma", help="equation file of axioms")
    p.add_argument("--goal", required=True)
    p.add_argument("--mhs", help="monoid file (default: the identity only)")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("closure", help="bounded Mh-closure of an equation set")
    p.add_argument("--sigma", help="equation file of axioms")
    p.add_argument("--mhs", help="monoid file (default: the identity only, giving the D-closure)")
    p.add_argument("--include-trivial", action="store_true", help="also print t = t")
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("transduce", help="run a transducer on a colored term")
    p.add_argument("term")
    p.add_argument("--rho", help="ρ file; its Mh-transducer is run")
    p.add_argument("--productions", help="production file")
    p.add_argument("--random-order", action="store_true", help="rewrite redexes in random order (uses --seed)")
    p.set_defaults(func=cmd_transduce)

    p = sub.add_parser("selftest", help="run the built-in worked examples")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return YES
    except (MhtkError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
