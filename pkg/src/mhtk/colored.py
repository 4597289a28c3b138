"""Colored terms: terms whose operation nodes each carry a natural-number color.

A colored term is stored as a tree of :class:`CApp` nodes (symbol, color,
children) and plain :class:`~mhtk.terms.Var` leaves, which makes the pair
view ``(term, coloration)`` a derived property rather than two objects kept
in sync.
"""

from __future__ import annotations

from typing import Mapping, Sequence, Union

from .terms import (
    App,
    MhtkError,
    Position,
    PositionError,
    Signature,
    Term,
    Var,
    _check_antichain,
    _Parser,
    iter_nodes,
    iter_positions,
    positions,
    render_position,
    replace_at,
    subterm_at,
    tree_equal,
)


class ColorationError(MhtkError, ValueError):
    pass


class CApp:
    __slots__ = ("symbol", "color", "children", "_hash")

    def __init__(self, symbol: str, color: int, children: Sequence = ()):
        if color < 0:
            raise ColorationError(f"colors are natural numbers, got {color}")
        self.symbol = symbol
        self.color = color
        self.children = tuple(children)
        self._hash = hash((symbol, color, self.children))

    def __eq__(self, other):
        if self is other:
            return True
        return type(other) is type(self) and self._hash == other._hash and tree_equal(self, other)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"CApp({self.symbol!r}, {self.color}, {list(self.children)!r})"

    def __str__(self):
        return render_colored(self)

    def with_children(self, children) -> CApp:
        return CApp(self.symbol, self.color, children)

    @property
    def term(self) -> App:
        return strip(self)

    @property
    def coloration(self) -> dict:
        return coloration_of(self)


ColoredTerm = Union[Var, CApp]
Coloration = Mapping  # Position -> int


def strip(ct) -> Term:
    """Forget the colors."""
    if type(ct) is Var:
        return ct
    return App(ct.symbol, [strip(c) for c in ct.children])


def coloration_of(ct) -> dict:
    return {p: u.color for p, u in iter_positions(ct) if type(u) is CApp}


def attach(t: Term, alpha: Coloration) -> ColoredTerm:
    """Pair a term with a coloration whose domain is exactly its F-positions."""
    f_pos = positions(t).f_pos
    keys = set(alpha)
    if keys != f_pos:
        missing = sorted(f_pos - keys)
        extra = sorted(keys - f_pos)
        raise ColorationError(
            f"coloration domain mismatch for {t}: "
            f"missing {[render_position(p) for p in missing]}, "
            f"extra {[render_position(p) for p in extra]}"
        )

    def build(u, p):
        if type(u) is Var:
            return u
        return CApp(u.symbol, alpha[p], [build(c, p + (i,)) for i, c in enumerate(u.children, 1)])

    return build(t, ())


def constant_coloring(t: Term, color: int) -> ColoredTerm:
    if type(t) is Var:
        return t
    return CApp(t.symbol, color, [constant_coloring(c, color) for c in t.children])


def restrict(ct: ColoredTerm, p: Position) -> ColoredTerm:
    """The colored subterm at ``p``: ⟨sub_t(p), α_t[p]⟩."""
    return subterm_at(ct, p)


def colored_subterms(ct: ColoredTerm) -> set:
    return set(iter_nodes(ct))


def colored_inductive_compose(ct: ColoredTerm, r: ColoredTerm, s: ColoredTerm) -> ColoredTerm:
    """Replace every occurrence of colored subterm ``r`` (colors included) by ``s``."""
    if ct == r:
        return s
    if type(ct) is Var or not ct.children:
        return ct
    new = tuple(colored_inductive_compose(c, r, s) for c in ct.children)
    if new == ct.children:
        return ct
    return CApp(ct.symbol, ct.color, new)


def colored_substitute(ct: ColoredTerm, images: Mapping[int, ColoredTerm]) -> ColoredTerm:
    if type(ct) is Var:
        return images.get(ct.index, ct)
    if not ct.children:
        return ct
    return CApp(ct.symbol, ct.color, [colored_substitute(c, images) for c in ct.children])


def colored_positional_compose(ct: ColoredTerm, p: Position, cs: ColoredTerm) -> ColoredTerm:
    subterm_at(ct, p)
    return replace_at(ct, tuple(p), cs)


def colored_positional_compose_many(ct: ColoredTerm, bindings: Sequence[tuple[Position, ColoredTerm]]) -> ColoredTerm:
    ps = [tuple(p) for p, _ in bindings]
    for p in ps:
        subterm_at(ct, p)
    _check_antichain(ps)
    for p, cs in bindings:
        ct = replace_at(ct, tuple(p), cs)
    return ct


def parse_colored(text: str, sig: Signature | None = None) -> ColoredTerm:
    """Parse ``f^1(f^1(x1,x2),f^2(x1,x2))``; every symbol needs a color."""
    return _Parser(text, sig, colored=True).parse(lambda f, c, ch: CApp(f, c, ch))


def render_colored(ct) -> str:
    if type(ct) is Var:
        return f"x{ct.index}"
    head = f"{ct.symbol}^{ct.color}"
    if not ct.children:
        return head
    return head + "(" + ",".join(render_colored(c) for c in ct.children) + ")"


def colors_used(ct) -> set[int]:
    return {u.color for u in iter_nodes(ct) if type(u) is CApp}


def recolor(ct, mapping: Mapping[int, int]) -> ColoredTerm:
    if type(ct) is Var:
        return ct
    return CApp(ct.symbol, mapping.get(ct.color, ct.color), [recolor(c, mapping) for c in ct.children])


def distinct_coloring(t: Term, start: int = 1) -> tuple[ColoredTerm, int]:
    """Color the F-positions of ``t`` with start, start+1, ... in pre-order.

    Returns the colored term and the next unused color.
    """
    counter = [start]

    def build(u):
        if type(u) is Var:
            return u
        c = counter[0]
        counter[0] += 1
        return CApp(u.symbol, c, [build(ch) for ch in u.children])

    ct = build(t)
    return ct, counter[0]


__all__ = [
    "CApp",
    "ColoredTerm",
    "ColorationError",
    "PositionError",
    "attach",
    "colored_inductive_compose",
    "colored_positional_compose",
    "colored_positional_compose_many",
    "colored_subterms",
    "colored_substitute",
    "coloration_of",
    "colors_used",
    "constant_coloring",
    "distinct_coloring",
    "parse_colored",
    "recolor",
    "render_colored",
    "restrict",
    "strip",
]
