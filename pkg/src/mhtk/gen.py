"""Random and exhaustive generators for terms, colored terms, hypersubstitutions and algebras.

All random generators take an explicit ``random.Random`` so runs are
reproducible from a seed.
"""

from __future__ import annotations

import random
from itertools import product

import numpy as np

from .algebra import FiniteAlgebra
from .colored import CApp
from .hypersub import Hypersubstitution, Monoid
from .multihyp import MultiHypersubstitution
from .terms import App, Identity, Position, Signature, Term, Var, iter_positions, positions

BINARY = Signature({"f": 2})


def random_term(rng: random.Random, sig: Signature, max_depth: int, nvars: int, leaf_bias: float = 0.3) -> Term:
    """A random term of depth ≤ max_depth over x1..x_nvars."""
    ops = [f for f in sig.symbols if sig.arity(f) > 0]
    consts = [f for f in sig.symbols if sig.arity(f) == 0]

    def leaf():
        k = rng.randrange(nvars + len(consts)) if nvars + len(consts) else 0
        if k < nvars:
            return Var(k + 1)
        return App(consts[k - nvars])

    def build(d):
        if d == 0 or not ops or (d < max_depth and rng.random() < leaf_bias):
            return leaf()
        f = rng.choice(ops)
        return App(f, [build(d - 1) for _ in range(sig.arity(f))])

    return build(max_depth)


def random_colored_term(
    rng: random.Random, sig: Signature, max_depth: int, colors, nvars: int, leaf_bias: float = 0.3
):
    colors = sorted(set(colors))
    return color_randomly(rng, random_term(rng, sig, max_depth, nvars, leaf_bias), colors)


def color_randomly(rng: random.Random, t: Term, colors):
    colors = list(colors)
    if type(t) is Var:
        return t
    return CApp(t.symbol, rng.choice(colors), [color_randomly(rng, c, colors) for c in t.children])


def random_position(rng: random.Random, t) -> Position:
    return rng.choice(sorted(positions(t).all))


def random_f_position(rng: random.Random, t) -> Position | None:
    fp = sorted(positions(t).f_pos)
    return rng.choice(fp) if fp else None


def random_hypersub(rng: random.Random, sig: Signature, max_depth: int = 2) -> Hypersubstitution:
    mapping = {}
    for f in sig.symbols:
        n = sig.arity(f)
        mapping[f] = random_term(rng, sig, max_depth, n) if n else random_term(rng, _constants_only(sig), 0, 0)
    return Hypersubstitution(sig, mapping)


def _constants_only(sig: Signature) -> Signature:
    return Signature({f: 0 for f in sig.symbols if sig.arity(f) == 0})


def shallow_binary_pool(symbol: str = "f") -> list[Hypersubstitution]:
    """Images of a binary f that are f applied to variables, or a projection.

    These six form a monoid under composition.
    """
    sig = Signature({symbol: 2})
    x1, x2 = Var(1), Var(2)
    images = [App(symbol, [a, b]) for a, b in product((x1, x2), repeat=2)] + [x1, x2]
    return [Hypersubstitution(sig, {symbol: t}) for t in images]


def random_explicit_monoid(rng: random.Random, sig: Signature, size: int, max_depth: int = 2) -> Monoid:
    """The identity plus random hypersubstitutions; not necessarily closed."""
    elems = [Hypersubstitution.identity(sig)]
    tries = 0
    while len(elems) < size and tries < 100 * size:
        s = random_hypersub(rng, sig, max_depth)
        if s not in elems:
            elems.append(s)
        tries += 1
    return Monoid.explicit(elems)


def random_rho(
    rng: random.Random, m: Monoid, colors, support_size: int | None = None
) -> MultiHypersubstitution:
    colors = sorted(set(colors))
    k = len(colors) if support_size is None else min(support_size, len(colors))
    chosen = rng.sample(colors, k)
    table = {q: rng.choice(m.elements) for q in chosen}
    return MultiHypersubstitution(table, rng.choice(m.elements), m)


def random_rho_over(rng: random.Random, sig: Signature, colors, support_size: int | None = None, max_depth: int = 2):
    """ρ whose entries are arbitrary random hypersubstitutions (the full monoid)."""
    colors = sorted(set(colors))
    k = len(colors) if support_size is None else min(support_size, len(colors))
    table = {q: random_hypersub(rng, sig, max_depth) for q in rng.sample(colors, k)}
    return MultiHypersubstitution(table, random_hypersub(rng, sig, max_depth))


def random_algebra(rng: random.Random, sig: Signature, size: int) -> FiniteAlgebra:
    nprng = np.random.default_rng(rng.randrange(2**32))
    tables = {f: nprng.integers(0, size, (size,) * sig.arity(f)) for f in sig.symbols}
    return FiniteAlgebra(size, tables, sig)


def random_identity(rng: random.Random, sig: Signature, max_depth: int, nvars: int) -> Identity:
    return Identity(random_term(rng, sig, max_depth, nvars), random_term(rng, sig, max_depth, nvars))


def f_positions(t) -> list[Position]:
    return [p for p, u in iter_positions(t) if type(u) is not Var]
