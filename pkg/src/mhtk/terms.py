"""Uncolored terms over a finite signature.

Terms are immutable trees built from :class:`Var` leaves and :class:`App`
nodes.  Positions are tuples of 1-based child indices; the root is ``()``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

Position = tuple  # tuple[int, ...]
ROOT: Position = ()


class MhtkError(Exception):
    """Base class for errors raised by this package."""


class TermSyntaxError(MhtkError, ValueError):
    def __init__(self, message: str, text: str = "", offset: int = -1):
        self.text = text
        self.offset = offset
        if offset >= 0:
            message = f"{message} at offset {offset} in {text!r}"
        super().__init__(message)


class SignatureError(MhtkError, ValueError):
    pass


class PositionError(MhtkError, ValueError):
    pass


class Var:
    __slots__ = ("index", "_hash")

    def __init__(self, index: int):
        if index < 1:
            raise ValueError(f"variable index must be positive, got {index}")
        self.index = index
        self._hash = hash(("x", index))

    def __eq__(self, other):
        return type(other) is Var and other.index == self.index

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.index})"

    def __str__(self):
        return f"x{self.index}"

    @property
    def children(self) -> tuple:
        return ()


class App:
    __slots__ = ("symbol", "children", "_hash")

    def __init__(self, symbol: str, children: Sequence[Term] = ()):
        self.symbol = symbol
        self.children = tuple(children)
        self._hash = hash((symbol, self.children))

    def __eq__(self, other):
        if self is other:
            return True
        return type(other) is App and self._hash == other._hash and tree_equal(self, other)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self.symbol!r}, {list(self.children)!r})"

    def __str__(self):
        return render_term(self)

    def with_children(self, children) -> App:
        return App(self.symbol, children)


Term = Union[Var, App]


def tree_equal(a, b) -> bool:
    """Structural equality, linear in the number of distinct node pairs.

    Images under hypersubstitutions share subtrees whenever a variable is
    duplicated, so the expanded tree can be exponentially larger than the
    objects in memory; pairs already matched are not revisited.
    """
    seen = set()
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        if type(x) is not type(y) or hash(x) != hash(y):
            return False
        key = (id(x), id(y))
        if key in seen:
            continue
        seen.add(key)
        if (
            getattr(x, "symbol", None) != getattr(y, "symbol", None)
            or getattr(x, "color", None) != getattr(y, "color", None)
            or getattr(x, "index", None) != getattr(y, "index", None)
            or len(x.children) != len(y.children)
        ):
            return False
        stack.extend(zip(x.children, y.children))
    return True


@dataclass(frozen=True)
class Signature:
    """Operation symbols with their arities."""

    arities: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for name, n in self.arities.items():
            if not _SYM_RE.fullmatch(name) or _VAR_RE.fullmatch(name):
                raise SignatureError(f"bad symbol name {name!r}")
            if n < 0:
                raise SignatureError(f"negative arity for {name!r}")
        object.__setattr__(self, "arities", dict(self.arities))

    def __hash__(self):
        return hash(tuple(sorted(self.arities.items())))

    def __contains__(self, name):
        return name in self.arities

    def __iter__(self):
        return iter(sorted(self.arities))

    def arity(self, name: str) -> int:
        try:
            return self.arities[name]
        except KeyError:
            raise SignatureError(f"unknown symbol {name!r}") from None

    @property
    def maxar(self) -> int:
        return max(self.arities.values(), default=0)

    @property
    def symbols(self) -> list[str]:
        return sorted(self.arities)

    def has_constants(self) -> bool:
        return any(n == 0 for n in self.arities.values())

    def merge(self, other: Signature) -> Signature:
        merged = dict(self.arities)
        for name, n in other.arities.items():
            if merged.get(name, n) != n:
                raise SignatureError(
                    f"symbol {name!r} used with arities {merged[name]} and {n}"
                )
            merged[name] = n
        return Signature(merged)

    def check(self, t: Term) -> None:
        """Raise SignatureError unless every node of ``t`` respects its arity."""
        for node in iter_nodes(t):
            if type(node) is App:
                n = self.arity(node.symbol)
                if n != len(node.children):
                    raise SignatureError(
                        f"{node.symbol} has arity {n}, applied to {len(node.children)} arguments"
                    )

    @classmethod
    def parse(cls, text: str) -> Signature:
        arities = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise SignatureError(f"line {lineno}: expected 'name arity', got {line!r}")
            if parts[0] in arities:
                raise SignatureError(f"line {lineno}: duplicate symbol {parts[0]!r}")
            arities[parts[0]] = int(parts[1])
        return cls(arities)

    def render(self) -> str:
        return "".join(f"{name} {self.arities[name]}\n" for name in self.symbols)


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term

    def __str__(self):
        return f"{render_term(self.lhs)} = {render_term(self.rhs)}"

    def swapped(self) -> Identity:
        return Identity(self.rhs, self.lhs)

    @property
    def depth(self) -> int:
        return max(depth(self.lhs), depth(self.rhs))


def x(i: int) -> Var:
    return Var(i)


def fundamental(symbol: str, arity: int) -> App:
    """The term f(x1, ..., xn)."""
    return App(symbol, [Var(i) for i in range(1, arity + 1)])


# ---------------------------------------------------------------- parsing

_VAR_RE = re.compile(r"x[0-9]+")
_SYM_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_TOKEN_RE = re.compile(
    r"\s*(?:(?P<aux>(?:ξ|xi)[0-9]+)(?![A-Za-z0-9_])"
    r"|(?P<name>[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<color>\^\s*[0-9]+)"
    r"|(?P<punct>[(),])"
    r"|(?P<bad>\S))"
)


class _Parser:
    """Recursive-descent parser shared by the plain and colored grammars.

    ``build_app`` receives (symbol, color or None, children) and builds a node;
    ``build_aux`` handles auxiliary ξk leaves when the caller allows them.
    """

    def __init__(self, text, sig, colored, aux=False):
        self.text = text
        self.sig = sig
        self.colored = colored
        self.aux = aux
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                break
            kind = m.lastgroup
            if kind == "bad":
                raise TermSyntaxError(f"unexpected character {m.group(kind)!r}", text, m.start(kind))
            value = m.group(kind)
            if kind == "aux" and not aux:
                # ξ tokens only mean something in transducer right-hand sides;
                # "xi1" is otherwise an ordinary symbol name
                if value.startswith("ξ"):
                    raise TermSyntaxError("auxiliary variable outside a production", text, m.start(kind))
                kind = "name"
            self.tokens.append((kind, value, m.start(kind)))
            pos = m.end()
        self.i = 0
        self.used = {}

    def peek(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return (None, None, len(self.text))

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None:
            raise TermSyntaxError("unexpected end of input", self.text, len(self.text))
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            raise TermSyntaxError(f"expected {want!r}, got {tok[1]!r}", self.text, tok[2])
        self.i += 1
        return tok

    def parse(self, build_app, build_aux=None):
        node = self.term(build_app, build_aux)
        tok = self.peek()
        if tok[0] is not None:
            raise TermSyntaxError(f"trailing input {tok[1]!r}", self.text, tok[2])
        return node

    def term(self, build_app, build_aux):
        kind, value, offset = self.peek()
        if kind == "aux":
            self.take()
            return build_aux(int(value.lstrip("ξxi")))
        kind, value, offset = self.take("name")
        if _VAR_RE.fullmatch(value):
            index = int(value[1:])
            if index < 1:
                raise TermSyntaxError("variable index must be at least 1", self.text, offset)
            if self.peek()[0] in ("color",) or self.peek()[1] == "(":
                raise TermSyntaxError(f"variable {value} cannot be applied or colored", self.text, offset)
            return Var(index)
        color = None
        if self.peek()[0] == "color":
            if not self.colored:
                raise TermSyntaxError("color annotation in an uncolored term", self.text, self.peek()[2])
            color = int(self.take()[1][1:].strip())
        elif self.colored:
            raise TermSyntaxError(f"symbol {value} needs a color", self.text, offset)
        children = []
        if self.peek()[1] == "(":
            self.take()
            children.append(self.term(build_app, build_aux))
            while self.peek()[1] == ",":
                self.take()
                children.append(self.term(build_app, build_aux))
            self.take("punct", ")")
        n = len(children)
        if self.sig is not None:
            if value not in self.sig:
                raise SignatureError(f"unknown symbol {value!r} at offset {offset} in {self.text!r}")
            if self.sig.arity(value) != n:
                raise SignatureError(
                    f"arity mismatch: {value} has arity {self.sig.arity(value)}, "
                    f"got {n} arguments at offset {offset} in {self.text!r}"
                )
        elif self.used.setdefault(value, n) != n:
            raise SignatureError(f"symbol {value!r} used with arities {self.used[value]} and {n}")
        return build_app(value, color, children)


def parse_term(text: str, sig: Signature | None = None) -> Term:
    """Parse ``f(x1,g(x2))``-style text.  Without ``sig`` arities are inferred."""
    return _Parser(text, sig, colored=False).parse(lambda f, _c, ch: App(f, ch))


def parse_identity(text: str, sig: Signature | None = None) -> Identity:
    if text.count("=") != 1:
        raise TermSyntaxError(f"identity needs exactly one '=': {text!r}")
    lhs, rhs = text.split("=")
    return Identity(parse_term(lhs, sig), parse_term(rhs, sig))


def infer_signature(texts: Iterable[str]) -> Signature:
    """Collect symbol arities from term/identity texts, colored or not."""
    sig = Signature()
    for text in texts:
        for part in text.split("="):
            stripped = re.sub(r"\^\s*[0-9]+", "", part)
            p = _Parser(stripped, None, colored=False, aux=True)
            p.parse(lambda f, _c, ch: App(f, ch), lambda k: Var(k))
            sig = sig.merge(Signature(p.used))
    return sig


def render_term(t: Term) -> str:
    parts: list[str] = []

    def walk(u):
        if type(u) is Var:
            parts.append(f"x{u.index}")
            return
        parts.append(u.symbol)
        if u.children:
            parts.append("(")
            for i, c in enumerate(u.children):
                if i:
                    parts.append(",")
                walk(c)
            parts.append(")")

    walk(t)
    return "".join(parts)


def parse_position(text: str, maxar: int | None = None) -> Position:
    """``""``/``ε`` is the root; ``212`` or ``2.1.2`` are positions."""
    s = text.strip()
    if s in ("", "ε", "e", "eps"):
        return ROOT
    if "." in s:
        pieces = s.split(".")
    else:
        pieces = list(s)
    if not all(p.isdigit() for p in pieces):
        raise PositionError(f"malformed position {text!r}")
    pos = tuple(int(p) for p in pieces)
    if any(i < 1 for i in pos):
        raise PositionError(f"position entries must be positive: {text!r}")
    if maxar is not None and any(i > maxar for i in pos):
        raise PositionError(f"position entry exceeds maximal arity {maxar}: {text!r}")
    return pos


def render_position(p: Position) -> str:
    if not p:
        return "ε"
    if all(i < 10 for i in p):
        return "".join(map(str, p))
    return ".".join(map(str, p))


# ---------------------------------------------------------------- structure


def iter_nodes(t) -> Iterator:
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        stack.extend(reversed(u.children))


def iter_positions(t) -> Iterator[tuple[Position, object]]:
    """Yield (position, subterm) pairs in pre-order."""
    stack = [((), t)]
    while stack:
        p, u = stack.pop()
        yield p, u
        for i in range(len(u.children), 0, -1):
            stack.append((p + (i,), u.children[i - 1]))


@dataclass(frozen=True)
class Positions:
    all: frozenset
    f_pos: frozenset
    x_pos: frozenset


def positions(t) -> Positions:
    f_pos, x_pos = set(), set()
    for p, u in iter_positions(t):
        (x_pos if type(u) is Var else f_pos).add(p)
    return Positions(frozenset(f_pos | x_pos), frozenset(f_pos), frozenset(x_pos))


def subterm_at(t, p: Position):
    u = t
    for i in p:
        if not 1 <= i <= len(u.children):
            raise PositionError(f"position {render_position(p)} not in term {u}")
        u = u.children[i - 1]
    return u


def subterms(t: Term) -> set:
    return set(iter_nodes(t))


def depth(t) -> int:
    if not t.children:
        return 0
    return 1 + max(depth(c) for c in t.children)


def size(t) -> int:
    return sum(1 for _ in iter_nodes(t))


def variables(t) -> set[int]:
    return {u.index for u in iter_nodes(t) if type(u) is Var}


def max_var(*terms) -> int:
    return max((i for t in terms for i in variables(t)), default=0)


def is_prefix(p: Position, q: Position) -> bool:
    return q[: len(p)] == p


# ---------------------------------------------------------------- composition


def _replace(t, pairs: Mapping):
    # clause (ii) before (iii): a matching node is swapped whole, never entered
    if t in pairs:
        return pairs[t]
    if not t.children:
        return t
    new = tuple(_replace(c, pairs) for c in t.children)
    if new == t.children:
        return t
    return App(t.symbol, new)


def inductive_compose(t: Term, replacements: Sequence[tuple[Term, Term]]) -> Term:
    """Replace every occurrence of each r by its s, simultaneously."""
    pairs = {}
    for r, s in replacements:
        if r in pairs and pairs[r] != s:
            raise ValueError(f"conflicting replacements for {r}")
        pairs[r] = s
    rs = list(pairs)
    for i, ri in enumerate(rs):
        for j, rj in enumerate(rs):
            if i != j and ri in subterms(rj):
                raise ValueError(f"{ri} is a subterm of {rj}; replacements must not nest")
    return _replace(t, pairs)


def substitute(t: Term, images: Mapping[int, Term] | Sequence[Term]) -> Term:
    """The shorthand t(s1, ..., sm): replace x_i by images[i].

    ``images`` may be a sequence (x1 -> images[0], ...) or a dict keyed by index.
    Variables without an image are left alone.
    """
    if not isinstance(images, Mapping):
        images = {i + 1: s for i, s in enumerate(images)}

    def walk(u):
        if type(u) is Var:
            return images.get(u.index, u)
        if not u.children:
            return u
        return App(u.symbol, [walk(c) for c in u.children])

    return walk(t)


def replace_at(t, p: Position, r):
    """Rebuild ``t`` with the node at ``p`` swapped for ``r`` (any node type)."""
    if not p:
        return r
    i = p[0]
    if not 1 <= i <= len(t.children):
        raise PositionError(f"position {render_position(p)} not in term {t}")
    children = list(t.children)
    children[i - 1] = replace_at(children[i - 1], p[1:], r)
    return t.with_children(children)


def _check_antichain(ps: Sequence[Position]) -> None:
    for a in range(len(ps)):
        for b in range(a + 1, len(ps)):
            if is_prefix(ps[a], ps[b]) or is_prefix(ps[b], ps[a]):
                raise PositionError(
                    f"positions {render_position(ps[a])} and {render_position(ps[b])} are comparable"
                )


def positional_compose(t: Term, bindings: Sequence[tuple[Position, Term]]) -> Term:
    """t(p1, ..., pm; r1, ..., rm) for pairwise non-comparable positions."""
    ps = [tuple(p) for p, _ in bindings]
    for p in ps:
        subterm_at(t, p)
    _check_antichain(ps)
    for p, r in bindings:
        t = replace_at(t, tuple(p), r)
    return t


# ---------------------------------------------------------------- variable strings


class NoVariablesError(MhtkError, ValueError):
    pass


def vstr(t: Term) -> list[int]:
    """Left-to-right sequence of variable indices."""
    return [u.index for u in iter_nodes(t) if type(u) is Var]


@dataclass(frozen=True)
class VariableProfile:
    left: int
    right: int
    vstr: tuple


def variable_profile(t: Term) -> VariableProfile:
    s = vstr(t)
    if not s:
        raise NoVariablesError(f"{t} contains no variables")
    return VariableProfile(s[0], s[-1], tuple(s))
