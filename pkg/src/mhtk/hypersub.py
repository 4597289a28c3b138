"""Hypersubstitutions, their extension to terms, and monoids of them."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence

from .terms import (
    Identity,
    MhtkError,
    Signature,
    SignatureError,
    Term,
    Var,
    fundamental,
    parse_term,
    render_term,
    substitute,
    variables,
    vstr,
)


class MonoidError(MhtkError, ValueError):
    pass


class Hypersubstitution:
    """An arity-preserving map from operation symbols to terms."""

    __slots__ = ("sig", "mapping", "_key")

    def __init__(self, sig: Signature, mapping: Mapping[str, Term] | None = None):
        mapping = dict(mapping or {})
        for f in mapping:
            if f not in sig:
                raise SignatureError(f"hypersubstitution maps unknown symbol {f!r}")
        full = {}
        for f in sig.symbols:
            n = sig.arity(f)
            t = mapping.get(f, fundamental(f, n))
            sig.check(t)
            extra = variables(t) - set(range(1, n + 1))
            if extra:
                raise SignatureError(
                    f"image of {f} (arity {n}) uses variables {sorted(extra)}: {render_term(t)}"
                )
            full[f] = t
        self.sig = sig
        self.mapping = full
        self._key = tuple(full[f] for f in sig.symbols)

    def __getitem__(self, f: str) -> Term:
        return self.mapping[f]

    def __eq__(self, other):
        return isinstance(other, Hypersubstitution) and self.sig == other.sig and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return "Hypersubstitution(" + ", ".join(f"{f} -> {render_term(t)}" for f, t in self.mapping.items()) + ")"

    def render(self) -> str:
        return "".join(f"{f} -> {render_term(self.mapping[f])}\n" for f in self.sig.symbols)

    def short(self) -> str:
        return "{" + "; ".join(f"{f}->{render_term(self.mapping[f])}" for f in self.sig.symbols) + "}"

    def is_identity(self) -> bool:
        return all(t == fundamental(f, self.sig.arity(f)) for f, t in self.mapping.items())

    @classmethod
    def identity(cls, sig: Signature) -> Hypersubstitution:
        return cls(sig, {})

    @classmethod
    def parse(cls, text: str, sig: Signature) -> Hypersubstitution:
        """One line per symbol, ``f -> term``.  Unlisted symbols map to themselves."""
        mapping = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "->" not in line:
                raise MhtkError(f"line {lineno}: expected 'f -> term', got {line!r}")
            f, t = (s.strip() for s in line.split("->", 1))
            if f in mapping:
                raise MhtkError(f"line {lineno}: symbol {f!r} mapped twice")
            mapping[f] = parse_term(t, sig)
        return cls(sig, mapping)


def apply_hat(sigma: Hypersubstitution, t: Term) -> Term:
    """The extension σ̂: variables stay, f(t1..tn) -> σ(f)(σ̂[t1], ..., σ̂[tn])."""
    if type(t) is Var:
        return t
    return substitute(sigma.mapping[t.symbol], [apply_hat(sigma, c) for c in t.children])


def compose_h(s1: Hypersubstitution, s2: Hypersubstitution) -> Hypersubstitution:
    """(s1 ∘_h s2)(f) = ŝ1[s2(f)]."""
    if s1.sig != s2.sig:
        raise SignatureError("hypersubstitutions over different signatures")
    return Hypersubstitution(s1.sig, {f: apply_hat(s1, s2.mapping[f]) for f in s1.sig.symbols})


# ---------------------------------------------------------------- K1 / K2


def k1_member(sigma: Hypersubstitution) -> bool:
    """Does σ preserve the leftmost and rightmost variable of every term?

    Without nullary symbols every argument of a term carries a variable and it
    suffices that σ(f) starts with x1 and ends with xn.  With nullary symbols an
    argument may be ground, so every x_i must occur and the first (last)
    occurrences must appear in increasing order.
    """
    constants = sigma.sig.has_constants()
    for f in sigma.sig.symbols:
        n = sigma.sig.arity(f)
        if n == 0:
            continue
        s = vstr(sigma.mapping[f])
        if not s:
            return False
        if not constants:
            if s[0] != 1 or s[-1] != n:
                return False
            continue
        first, last = {}, {}
        for k, i in enumerate(s):
            first.setdefault(i, k)
            last[i] = k
        if set(first) != set(range(1, n + 1)):
            return False
        order = list(range(1, n + 1))
        if sorted(order, key=first.__getitem__) != order or sorted(order, key=last.__getitem__) != order:
            return False
    return True


def k2_member(sigma: Hypersubstitution) -> bool:
    """Does σ preserve the variable string of every term?"""
    return all(
        vstr(sigma.mapping[f]) == list(range(1, sigma.sig.arity(f) + 1)) for f in sigma.sig.symbols
    )


PREDICATES = {
    "k1": k1_member,
    "k2": k2_member,
    "full": lambda sigma: True,
}


# ---------------------------------------------------------------- monoids


@dataclass(frozen=True)
class Monoid:
    """A set of hypersubstitutions given explicitly, by predicate, or both.

    ``kind`` is None for a purely explicit set; otherwise one of ``k1``,
    ``k2``, ``full`` and membership is ``explicit element or predicate``.
    """

    sig: Signature
    elements: tuple = ()
    kind: str | None = None
    names: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.kind is not None and self.kind not in PREDICATES:
            raise MonoidError(f"unknown monoid kind {self.kind!r}")
        seen = []
        for s in self.elements:
            if s.sig != self.sig:
                raise MonoidError("monoid element over a different signature")
            if s not in seen:
                seen.append(s)
        object.__setattr__(self, "elements", tuple(seen))

    @classmethod
    def explicit(cls, elements: Iterable[Hypersubstitution], names: Sequence[str] = ()) -> Monoid:
        elements = list(elements)
        if not elements:
            raise MonoidError("an explicit monoid needs at least one element")
        return cls(elements[0].sig, tuple(elements), None, tuple(names))

    @classmethod
    def predicate(cls, sig: Signature, kind: str) -> Monoid:
        return cls(sig, (), kind)

    @classmethod
    def plus(cls, elements: Iterable[Hypersubstitution], kind: str, sig: Signature | None = None) -> Monoid:
        elements = tuple(elements)
        sig = sig or elements[0].sig
        return cls(sig, elements, kind)

    @property
    def is_explicit(self) -> bool:
        return self.kind is None

    def __contains__(self, sigma: Hypersubstitution) -> bool:
        if sigma in self.elements:
            return True
        return self.kind is not None and PREDICATES[self.kind](sigma)

    def __bool__(self):
        return True

    def __len__(self):
        self.require_explicit()
        return len(self.elements)

    def __iter__(self):
        self.require_explicit()
        return iter(self.elements)

    def require_explicit(self) -> None:
        if not self.is_explicit:
            raise MonoidError(f"monoid of kind {self.kind!r} cannot be enumerated")

    def default_element(self) -> Hypersubstitution:
        ident = Hypersubstitution.identity(self.sig)
        if ident in self:
            return ident
        if self.elements:
            return self.elements[0]
        raise MonoidError("monoid has no element to use as a default")

    def name_of(self, sigma: Hypersubstitution) -> str:
        if sigma in self.elements:
            k = self.elements.index(sigma)
            if k < len(self.names) and self.names[k]:
                return self.names[k]
            return f"#{k + 1}"
        return sigma.short()


@dataclass(frozen=True)
class MonoidViolation:
    reason: str
    pair: tuple = ()

    def __str__(self):
        if self.pair:
            a, b = self.pair
            return f"{self.reason}: {a.short()} ∘ {b.short()}"
        return self.reason


def monoid_check(m: Monoid) -> MonoidViolation | None:
    """Return None if the explicit part is a monoid, else the first violation."""
    if not m.elements and m.kind is not None:
        return None
    ident = Hypersubstitution.identity(m.sig)
    if ident not in m:
        return MonoidViolation("identity hypersubstitution missing")
    for a, b in product(m.elements, repeat=2):
        if compose_h(a, b) not in m:
            return MonoidViolation("not closed under composition", (a, b))
    return None


def generate_monoid(generators: Iterable[Hypersubstitution], limit: int = 256) -> Monoid:
    """Close a finite generator set under ∘_h (with the identity added)."""
    generators = list(generators)
    sig = generators[0].sig
    elements = [Hypersubstitution.identity(sig)]
    for g in generators:
        if g not in elements:
            elements.append(g)
    frontier = list(elements)
    while frontier:
        new = []
        for a in list(elements):
            for b in frontier:
                for c in (compose_h(a, b), compose_h(b, a)):
                    if c not in elements and c not in new:
                        new.append(c)
        elements.extend(new)
        if len(elements) > limit:
            raise MonoidError(f"generated monoid exceeds {limit} elements")
        frontier = new
    return Monoid.explicit(elements)


def chi_M(m: Monoid, eqs: Iterable[Identity]) -> set[Identity]:
    """All images σ̂[u] ≈ σ̂[v] for σ in an explicit monoid."""
    m.require_explicit()
    out = set()
    for e in eqs:
        for sigma in m.elements:
            out.add(Identity(apply_hat(sigma, e.lhs), apply_hat(sigma, e.rhs)))
    return out
