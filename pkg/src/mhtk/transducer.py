"""Colored tree transducers and their correspondence with multi-hypersubstitutions.

A production rewrites a colored node ``f^q(r1, ..., rn)`` into a colored
right-hand side in which the auxiliary leaves ξ1..ξn stand for the children.
Rewritten output nodes are marked (:class:`Out`) so a node is never rewritten
twice; a sentential form is in normal form when no unmarked node remains.
"""

from __future__ import annotations

import random
from itertools import product as cartesian
from typing import Iterable, Iterator, Mapping

from .colored import CApp, ColoredTerm
from .hypersub import Hypersubstitution, Monoid, MonoidError
from .multihyp import MultiHypersubstitution, apply_mhs, compose_ch
from .terms import (
    App,
    MhtkError,
    Position,
    PositionError,
    Signature,
    Term,
    TermSyntaxError,
    Var,
    _Parser,
    iter_positions,
    render_position,
    replace_at,
    subterm_at,
)


class TransducerError(MhtkError, ValueError):
    pass


class Aux:
    """Auxiliary leaf ξk of a production right-hand side."""

    __slots__ = ("index",)
    children = ()

    def __init__(self, index: int):
        if index < 1:
            raise TransducerError("auxiliary indices start at 1")
        self.index = index

    def __eq__(self, other):
        return type(other) is Aux and other.index == self.index

    def __hash__(self):
        return hash(("aux", self.index))

    def __repr__(self):
        return f"Aux({self.index})"


class Out(CApp):
    """An output node produced by a derivation step; never rewritten again."""

    __slots__ = ()

    def with_children(self, children) -> Out:
        return Out(self.symbol, self.color, children)


def render_rhs(t) -> str:
    if type(t) is Aux:
        return f"ξ{t.index}"
    if type(t) is Var:
        return f"x{t.index}"
    head = f"{t.symbol}^{t.color}"
    if not t.children:
        return head
    return head + "(" + ",".join(render_rhs(c) for c in t.children) + ")"


def render_form(t) -> str:
    """Sentential forms print like colored terms; output nodes are not distinguished."""
    return render_rhs(t)


class Production:
    __slots__ = ("symbol", "color", "rhs")

    def __init__(self, symbol: str, color: int, rhs, arity: int):
        for _, u in iter_positions(rhs):
            if type(u) is Aux and u.index > arity:
                raise TransducerError(f"ξ{u.index} in a production for {symbol} of arity {arity}")
        self.symbol = symbol
        self.color = color
        self.rhs = rhs

    @property
    def key(self) -> tuple[str, int]:
        return (self.symbol, self.color)

    def __eq__(self, other):
        return isinstance(other, Production) and (self.symbol, self.color, self.rhs) == (
            other.symbol,
            other.color,
            other.rhs,
        )

    def __hash__(self):
        return hash((self.symbol, self.color, self.rhs))

    def render(self, arity: int) -> str:
        args = ",".join(f"ξ{i}" for i in range(1, arity + 1))
        head = f"{self.symbol}^{self.color}" + (f"({args})" if arity else "")
        return f"{head} -> {render_rhs(self.rhs)}"


def _skeleton_rhs(skeleton: Term, color: int):
    """σ(f) with x_i read as ξ_i and every operation node colored ``color``."""
    if type(skeleton) is Var:
        return Aux(skeleton.index)
    return CApp(skeleton.symbol, color, [_skeleton_rhs(c, color) for c in skeleton.children])


def _instantiate(rhs, args, marker=Out):
    if type(rhs) is Aux:
        return args[rhs.index - 1]
    if type(rhs) is Var:
        return rhs
    return marker(rhs.symbol, rhs.color, [_instantiate(c, args, marker) for c in rhs.children])


class ColoredTreeTransducer:
    """A deterministic colored tree transducer.

    ``sentinel`` optionally maps each symbol to a skeleton term used for
    colors without an explicit production; the skeleton is colored with the
    matched node's color.
    """

    def __init__(
        self,
        sig: Signature,
        productions: Iterable[Production],
        sentinel: Mapping[str, Term] | None = None,
    ):
        table = {}
        for prod in productions:
            if prod.symbol not in sig:
                raise TransducerError(f"production for unknown symbol {prod.symbol!r}")
            if prod.key in table and table[prod.key] != prod:
                raise TransducerError(f"two productions for {prod.symbol}^{prod.color}")
            table[prod.key] = prod
        self.sig = sig
        self.productions = dict(sorted(table.items()))
        self.sentinel = dict(sentinel) if sentinel else None

    def rhs_for(self, symbol: str, color: int):
        prod = self.productions.get((symbol, color))
        if prod is not None:
            return prod.rhs
        if self.sentinel is not None and symbol in self.sentinel:
            return _skeleton_rhs(self.sentinel[symbol], color)
        raise TransducerError(f"no production for {symbol}^{color}")

    def render(self) -> str:
        return "".join(p.render(self.sig.arity(p.symbol)) + "\n" for p in self.productions.values())

    def __len__(self):
        return len(self.productions) + (len(self.sentinel) if self.sentinel else 0)


def direct_derive(T: ColoredTreeTransducer, form, p: Position):
    """One derivation step at position ``p`` of a sentential form."""
    try:
        node = subterm_at(form, p)
    except PositionError:
        raise TransducerError(f"position {render_position(p)} is not in the term") from None
    if type(node) is not CApp:
        raise TransducerError(f"nothing to rewrite at {render_position(p)}")
    rhs = T.rhs_for(node.symbol, node.color)
    return replace_at(form, p, _instantiate(rhs, node.children))


def redexes(form) -> list[Position]:
    return [p for p, u in iter_positions(form) if type(u) is CApp]


def finish(form) -> ColoredTerm:
    """Turn a normal form (only output nodes and variables) into a colored term."""
    if type(form) is Var:
        return form
    if type(form) is not Out:
        raise TransducerError("sentential form still has unprocessed nodes")
    return CApp(form.symbol, form.color, [finish(c) for c in form.children])


def derive_randomly(T: ColoredTreeTransducer, ct: ColoredTerm, rng: random.Random, limit: int = 100_000) -> ColoredTerm:
    """Rewrite at uniformly random redexes until none remain."""
    form = ct
    for _ in range(limit):
        spots = redexes(form)
        if not spots:
            return finish(form)
        form = direct_derive(T, form, rng.choice(spots))
    raise TransducerError(f"no normal form within {limit} steps")


def run(T: ColoredTreeTransducer, ct: ColoredTerm) -> ColoredTerm:
    """The bottom-up run: rewrite the children, then the node."""
    if type(ct) is Var:
        return ct
    args = [run(T, c) for c in ct.children]
    return _instantiate(T.rhs_for(ct.symbol, ct.color), args, CApp)


# ---------------------------------------------------------------- Mh-transducers


class MhTransducer(ColoredTreeTransducer):
    """A transducer whose production for color q rewrites f to σ_q(f) colored q, σ_q in the monoid."""

    def __init__(
        self,
        sig: Signature,
        productions: Iterable[Production],
        sentinel: Mapping[str, Term],
        monoid: Monoid,
        origin: tuple[MultiHypersubstitution, frozenset] | None = None,
    ):
        super().__init__(sig, productions, sentinel)
        self.monoid = monoid
        self.origin = origin
        by_color: dict[int, dict[str, Term]] = {}
        for (f, q), prod in self.productions.items():
            skeleton = _uncolor(prod.rhs, q)
            if skeleton is None:
                raise TransducerError(f"production for {f}^{q} is not constantly colored {q}")
            by_color.setdefault(q, {})[f] = skeleton
        for q, mapping in by_color.items():
            missing = [f for f in sig.symbols if f not in mapping]
            if missing:
                raise TransducerError(f"color {q} lacks productions for {missing}")
            if Hypersubstitution(sig, mapping) not in monoid:
                raise MonoidError(f"productions for color {q} do not form a monoid element")
        if Hypersubstitution(sig, self.sentinel) not in monoid:
            raise MonoidError("default productions do not form a monoid element")

    @property
    def colors(self) -> frozenset:
        return frozenset(q for _, q in self.productions)

    def as_mhs(self) -> MultiHypersubstitution:
        """The multi-hypersubstitution this transducer realizes."""
        table = {}
        for (f, q), prod in self.productions.items():
            table.setdefault(q, {})[f] = _uncolor(prod.rhs, q)
        return MultiHypersubstitution(
            {q: Hypersubstitution(self.sig, mp) for q, mp in table.items()},
            Hypersubstitution(self.sig, self.sentinel),
            self.monoid,
        )


def _uncolor(rhs, q) -> Term | None:
    if type(rhs) is Aux:
        return Var(rhs.index)
    if type(rhs) is Var or rhs.color != q:
        return None
    kids = [_uncolor(c, q) for c in rhs.children]
    if any(k is None for k in kids):
        return None
    return App(rhs.symbol, kids)


def from_mhs(rho: MultiHypersubstitution, colors: Iterable[int] = ()) -> MhTransducer:
    """One production per symbol and color in ``colors`` ∪ support(ρ), plus the default."""
    colors = frozenset(colors) | rho.support
    sig = rho.sig
    prods = [
        Production(f, q, _skeleton_rhs(rho.lookup(q).mapping[f], q), sig.arity(f))
        for q in sorted(colors)
        for f in sig.symbols
    ]
    return MhTransducer(sig, prods, dict(rho.default.mapping), rho.monoid, (rho, colors))


def _origin(T: MhTransducer) -> MultiHypersubstitution:
    return T.origin[0] if T.origin else T.as_mhs()


def product(T1: MhTransducer, T2: MhTransducer) -> MhTransducer:
    """The superposition: run T2, then T1.

    If the colorwise composite leaves T1's monoid (the monoid was given as a
    non-closed set), it is formed over all hypersubstitutions instead.
    """
    if T1.sig != T2.sig:
        raise TransducerError("transducers over different signatures")
    r1, r2 = _origin(T1), _origin(T2)
    try:
        rho = compose_ch(r1, r2)
    except MonoidError:
        full = Monoid.predicate(T1.sig, "full")
        rho = compose_ch(
            MultiHypersubstitution(r1.table, r1.default, full),
            MultiHypersubstitution(r2.table, r2.default, full),
        )
    return from_mhs(rho, T1.colors | T2.colors)


# ---------------------------------------------------------------- equivalence probes


def fundamental_colored(sig: Signature, colors: Iterable[int]) -> Iterator[ColoredTerm]:
    for q in sorted(set(colors)):
        for f in sig.symbols:
            yield CApp(f, q, [Var(i) for i in range(1, sig.arity(f) + 1)])


def colored_terms_upto(sig: Signature, max_depth: int, colors: Iterable[int], nvars: int) -> list[ColoredTerm]:
    """Every colored term of depth ≤ max_depth over x1..x_nvars and the given colors."""
    colors = sorted(set(colors))
    level = [Var(i) for i in range(1, nvars + 1)]
    level += [CApp(f, q) for f in sig.symbols if sig.arity(f) == 0 for q in colors]
    for _ in range(max_depth):
        nxt = [Var(i) for i in range(1, nvars + 1)]
        for f in sig.symbols:
            n = sig.arity(f)
            for q in colors:
                if n == 0:
                    nxt.append(CApp(f, q))
                    continue
                for kids in cartesian(level, repeat=n):
                    nxt.append(CApp(f, q, kids))
        level = nxt
    return level


def equiv_to_mhs(
    T: ColoredTreeTransducer,
    rho: MultiHypersubstitution,
    exhaustive_depth: int = 2,
    nvars: int = 2,
    colors: Iterable[int] | None = None,
    random_samples: int = 200,
    random_depth: int = 5,
    seed: int = 0,
) -> ColoredTerm | None:
    """First colored term on which the run of T differs from ρ̄, or None.

    Order: fundamental terms f^q(x1..xn), then an exhaustive sweep, then
    random larger terms.  Colors default to the supports of both sides plus
    one color outside them, so the defaults are probed too.
    """
    if colors is None:
        known = rho.support | (T.colors if isinstance(T, MhTransducer) else {q for _, q in T.productions})
        colors = known | {max(known, default=0) + 1}
    colors = sorted(set(colors))

    def differs(ct):
        try:
            return run(T, ct) != apply_mhs(rho, ct)
        except TransducerError:
            return True

    for ct in fundamental_colored(T.sig, colors):
        if differs(ct):
            return ct
    for ct in colored_terms_upto(T.sig, exhaustive_depth, colors, nvars):
        if differs(ct):
            return ct
    rng = random.Random(seed)
    from .gen import random_colored_term

    for _ in range(random_samples):
        ct = random_colored_term(rng, T.sig, random_depth, colors, nvars + 1)
        if differs(ct):
            return ct
    return None


# ---------------------------------------------------------------- files


def parse_productions(text: str, sig: Signature) -> ColoredTreeTransducer:
    """Lines ``f^q(ξ1,...,ξn) -> rhs``; ``xi1`` may be written for ξ1."""
    prods = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise TransducerError(f"line {lineno}: expected 'lhs -> rhs'")
        lhs_text, rhs_text = (s.strip() for s in line.split("->", 1))
        try:
            lhs = _Parser(lhs_text, sig, colored=True, aux=True).parse(
                lambda f, c, ch: CApp(f, c, ch), Aux
            )
            rhs = _Parser(rhs_text, sig, colored=True, aux=True).parse(
                lambda f, c, ch: CApp(f, c, ch), Aux
            )
        except TermSyntaxError as exc:
            raise TransducerError(f"line {lineno}: {exc}") from None
        if type(lhs) is not CApp or list(lhs.children) != [Aux(i) for i in range(1, len(lhs.children) + 1)]:
            raise TransducerError(f"line {lineno}: left side must be f^q(ξ1,...,ξn)")
        prods.append(Production(lhs.symbol, lhs.color, rhs, sig.arity(lhs.symbol)))
    return ColoredTreeTransducer(sig, prods)


__all__ = [
    "Aux",
    "ColoredTreeTransducer",
    "MhTransducer",
    "Out",
    "Production",
    "TransducerError",
    "colored_terms_upto",
    "derive_randomly",
    "direct_derive",
    "equiv_to_mhs",
    "finish",
    "from_mhs",
    "fundamental_colored",
    "parse_productions",
    "product",
    "redexes",
    "render_form",
    "run",
]
