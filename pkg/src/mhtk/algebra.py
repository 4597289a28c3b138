"""Finite algebras given by operation tables.

Carrier elements are 0..n-1.  An n-element algebra stores, for every k-ary
symbol, a numpy array of shape (n,)*k.  Identity checks are exhaustive over
all valuations; the valuation sweep is vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .colored import CApp, ColoredTerm, strip
from .hypersub import Hypersubstitution, Monoid, MonoidError, apply_hat
from .multihyp import (
    EnumerationLimitError,
    MultiHypersubstitution,
    apply_mhs,
    assignment_images,
    canonical_rho,
)
from .terms import Identity, MhtkError, Signature, Term, Var, fundamental, variables

VALUATION_CAP = 10**7


class AlgebraError(MhtkError, ValueError):
    pass


class FiniteAlgebra:
    __slots__ = ("size", "tables", "sig", "_key")

    def __init__(self, size: int, tables: Mapping[str, np.ndarray], sig: Signature | None = None):
        if size < 1:
            raise AlgebraError("carrier must be nonempty")
        tables = {f: np.asarray(tab, dtype=np.int64) for f, tab in tables.items()}
        if sig is None:
            sig = Signature({f: tab.ndim for f, tab in tables.items()})
        for f in sig.symbols:
            if f not in tables:
                raise AlgebraError(f"no table for symbol {f!r}")
            tab = tables[f]
            if tab.shape != (size,) * sig.arity(f):
                raise AlgebraError(f"table for {f} has shape {tab.shape}, expected {(size,) * sig.arity(f)}")
            if tab.size and (tab.min() < 0 or tab.max() >= size):
                raise AlgebraError(f"table for {f} has entries outside 0..{size - 1}")
        for f in tables:
            if f not in sig:
                raise AlgebraError(f"table for unknown symbol {f!r}")
        self.size = size
        self.tables = tables
        self.sig = sig
        self._key = (size,) + tuple((f, tables[f].tobytes()) for f in sig.symbols)

    def __eq__(self, other):
        return isinstance(other, FiniteAlgebra) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"FiniteAlgebra(size={self.size}, symbols={self.sig.symbols})"

    def op(self, f: str, *args: int) -> int:
        return int(self.tables[f][tuple(args)])

    def render(self) -> str:
        lines = [f"carrier {self.size}"]
        for f in self.sig.symbols:
            lines.append(f"{f}: " + " ".join(str(int(v)) for v in self.tables[f].ravel()))
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str, sig: Signature | None = None) -> FiniteAlgebra:
        size = None
        raw = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("carrier"):
                parts = line.split()
                if len(parts) != 2 or not parts[1].isdigit():
                    raise AlgebraError(f"line {lineno}: expected 'carrier n'")
                size = int(parts[1])
                continue
            if ":" not in line:
                raise AlgebraError(f"line {lineno}: expected 'f: entries...'")
            f, entries = line.split(":", 1)
            try:
                raw[f.strip()] = [int(e) for e in entries.split()]
            except ValueError:
                raise AlgebraError(f"line {lineno}: non-integer table entry") from None
        if size is None:
            raise AlgebraError("missing 'carrier n' line")
        tables = {}
        for f, values in raw.items():
            if sig is not None and f in sig:
                k = sig.arity(f)
            else:
                # infer arity from the entry count
                k = 0
                while size**k < len(values):
                    k += 1
                if size**k != len(values):
                    raise AlgebraError(f"table for {f} has {len(values)} entries, not a power of {size}")
                if size == 1 and sig is None:
                    raise AlgebraError("arity cannot be inferred for a 1-element carrier; pass a signature")
            if len(values) != size**k:
                raise AlgebraError(f"table for {f} needs {size ** k} entries, got {len(values)}")
            tables[f] = np.array(values, dtype=np.int64).reshape((size,) * k)
        return cls(size, tables, sig)


# ---------------------------------------------------------------- evaluation


def eval_term(A: FiniteAlgebra, t: Term, v: Mapping[int, int]) -> int:
    if type(t) is Var:
        try:
            return v[t.index]
        except KeyError:
            raise AlgebraError(f"valuation does not cover x{t.index}") from None
    return int(A.tables[t.symbol][tuple(eval_term(A, c, v) for c in t.children)])


def _grids(size: int, indices: Sequence[int]) -> dict[int, np.ndarray]:
    """Flattened coordinate arrays, one per variable, enumerating all valuations."""
    k = len(indices)
    if size**k > VALUATION_CAP:
        raise EnumerationLimitError(f"{size ** k} valuations exceed the cap of {VALUATION_CAP}")
    if k == 0:
        return {}
    mesh = np.indices((size,) * k).reshape(k, -1)
    return {i: mesh[n] for n, i in enumerate(indices)}


def _eval_grid(tables, t, grids, shape):
    if type(t) is Var:
        return grids[t.index]
    args = [_eval_grid(tables, c, grids, shape) for c in t.children]
    if not args:
        return np.broadcast_to(tables[t.symbol], shape)
    return tables[t.symbol][tuple(args)]


def term_values(A: FiniteAlgebra, t: Term, indices: Sequence[int]) -> np.ndarray:
    """Values of ``t`` over every valuation of ``indices`` (row-major order)."""
    grids = _grids(A.size, indices)
    shape = (A.size ** len(indices),)
    return np.broadcast_to(_eval_grid(A.tables, t, grids, shape), shape)


def term_operation(A: FiniteAlgebra, t: Term, arity: int) -> np.ndarray:
    """The table of ``t`` read as an ``arity``-ary operation on x1..x_arity."""
    vals = term_values(A, t, range(1, arity + 1))
    return np.array(vals).reshape((A.size,) * arity)


def valuation_at(size: int, indices: Sequence[int], flat: int) -> dict[int, int]:
    coords = np.unravel_index(flat, (size,) * len(indices)) if indices else ()
    return {i: int(c) for i, c in zip(indices, coords)}


def identity_vars(e: Identity) -> list[int]:
    return sorted(variables(e.lhs) | variables(e.rhs))


def satisfies(A: FiniteAlgebra, e: Identity) -> bool:
    return find_falsifying_valuation(A, e) is None


def find_falsifying_valuation(A: FiniteAlgebra, e: Identity) -> dict[int, int] | None:
    idx = identity_vars(e)
    lv = term_values(A, e.lhs, idx)
    rv = term_values(A, e.rhs, idx)
    bad = np.nonzero(lv != rv)[0]
    if len(bad) == 0:
        return None
    return valuation_at(A.size, idx, int(bad[0]))


def satisfies_all(A: FiniteAlgebra, eqs: Iterable[Identity]) -> bool:
    return all(satisfies(A, e) for e in eqs)


# ---------------------------------------------------------------- derived algebras


def derived_algebra(A: FiniteAlgebra, sigma: Hypersubstitution) -> FiniteAlgebra:
    """Reinterpret every f by the term operation σ(f)^A."""
    return FiniteAlgebra(
        A.size,
        {f: term_operation(A, sigma.mapping[f], A.sig.arity(f)) for f in A.sig.symbols},
        A.sig,
    )


def derived_algebra_mh(
    A: FiniteAlgebra, rho: MultiHypersubstitution, colors: Iterable[int]
) -> dict[tuple[int, str], np.ndarray]:
    """Tables of ρ(q)(f)^A, keyed by (color, symbol)."""
    return {
        (q, f): term_operation(A, rho.lookup(q).mapping[f], A.sig.arity(f))
        for q in sorted(set(colors))
        for f in A.sig.symbols
    }


def eval_colored_in_family(
    family: Mapping[tuple[int, str], np.ndarray], ct: ColoredTerm, v: Mapping[int, int]
) -> int:
    """Evaluate a colored term, reading node ⟨f, q⟩ as the operation family[(q, f)]."""
    if type(ct) is Var:
        return v[ct.index]
    return int(family[(ct.color, ct.symbol)][tuple(eval_colored_in_family(family, c, v) for c in ct.children)])


def colored_values_in_family(family, ct: ColoredTerm, size: int, indices: Sequence[int]) -> np.ndarray:
    grids = _grids(size, indices)
    shape = (size ** len(indices),)

    def walk(u):
        if type(u) is Var:
            return grids[u.index]
        args = [walk(c) for c in u.children]
        tab = family[(u.color, u.symbol)]
        if not args:
            return np.broadcast_to(tab, shape)
        return tab[tuple(args)]

    return np.broadcast_to(walk(ct), shape)


def slice_of_family(A: FiniteAlgebra, family, q: int) -> FiniteAlgebra:
    return FiniteAlgebra(A.size, {f: family[(q, f)] for f in A.sig.symbols}, A.sig)


# ---------------------------------------------------------------- multi-hyperidentities


@dataclass(frozen=True)
class MultiHyperCounterexample:
    """A failing image of an identity.

    ``lhs_source`` and ``rhs_source`` are colorings of the two sides whose
    colors index the monoid elements (1-based); ``rho`` maps each color to its
    element, so ``apply_mhs(rho, source)`` reproduces the failing image.
    """

    lhs_source: ColoredTerm
    rhs_source: ColoredTerm
    rho: MultiHypersubstitution
    image: Identity
    valuation: dict
    lhs_value: int
    rhs_value: int

    def assignment(self, m: Monoid) -> dict:
        """Position -> monoid element name, for both sides."""
        from .terms import iter_positions, render_position

        out = {}
        for side, src in (("lhs", self.lhs_source), ("rhs", self.rhs_source)):
            for p, u in iter_positions(src):
                if type(u) is CApp:
                    out[(side, render_position(p))] = m.name_of(m.elements[u.color - 1])
        return out

    def verify(self, A: FiniteAlgebra) -> bool:
        lhs = strip(apply_mhs(self.rho, self.lhs_source))
        rhs = strip(apply_mhs(self.rho, self.rhs_source))
        if Identity(lhs, rhs) != self.image:
            return False
        return eval_term(A, lhs, self.valuation) != eval_term(A, rhs, self.valuation)


def multi_hyper_counterexamples(
    A: FiniteAlgebra, e: Identity, m: Monoid, cap: int = 10**6
) -> Iterator[MultiHyperCounterexample]:
    """Every failing image ρ̄_{α_l}[lhs] ≈ ρ̄_{α_r}[rhs] with ρ over m, one per distinct image pair."""
    m.require_explicit()
    lhs_images = assignment_images(m, e.lhs, cap)
    rhs_images = assignment_images(m, e.rhs, cap)
    idx = identity_vars(e)
    rho = canonical_rho(m)
    lvals = {img: term_values(A, img, idx) for img in lhs_images}
    rvals = {img: term_values(A, img, idx) for img in rhs_images}
    for l_img, lv in lvals.items():
        for r_img, rv in rvals.items():
            bad = np.nonzero(lv != rv)[0]
            if len(bad):
                flat = int(bad[0])
                yield MultiHyperCounterexample(
                    lhs_images[l_img],
                    rhs_images[r_img],
                    rho,
                    Identity(l_img, r_img),
                    valuation_at(A.size, idx, flat),
                    int(lv[flat]),
                    int(rv[flat]),
                )


def find_multi_hyper_counterexample(
    A: FiniteAlgebra, e: Identity, m: Monoid, cap: int = 10**6
) -> MultiHyperCounterexample | None:
    """Exact check of e against every image under a ρ over m; the first failure or None."""
    return next(multi_hyper_counterexamples(A, e, m, cap), None)


def is_multi_hyperidentity(A: FiniteAlgebra, e: Identity, m: Monoid, cap: int = 10**6) -> bool:
    return find_multi_hyper_counterexample(A, e, m, cap) is None


def is_hyperidentity(A: FiniteAlgebra, e: Identity, m: Monoid) -> bool:
    return all(
        satisfies(A, Identity(apply_hat(s, e.lhs), apply_hat(s, e.rhs))) for s in m.elements
    )


def fixed_by(A: FiniteAlgebra, m: Monoid) -> bool:
    """Does every σ in m leave the operations of A unchanged (σ[A] = A)?"""
    return all(derived_algebra(A, s) == A for s in m.elements)


def multi_hypersatisfies(A: FiniteAlgebra, sigma: Iterable[Identity], m: Monoid) -> bool:
    """Does A satisfy the whole Mh-closure of ``sigma``?

    Reflexivity puts t ≈ t into every closure, and the multi-hypersubstitution
    rule then yields σ̂[t] ≈ σ'̂[t] for any σ, σ' in m.  For a monoid (identity
    included) the closure therefore holds in A exactly when A satisfies
    ``sigma`` and every σ in m fixes A.
    """
    m.require_explicit()
    if Hypersubstitution.identity(m.sig) not in m.elements:
        raise MonoidError("closure semantics needs the identity hypersubstitution in the monoid")
    return fixed_by(A, m) and satisfies_all(A, sigma)


# ---------------------------------------------------------------- constructions


def rect_band(m: int, n: int) -> FiniteAlgebra:
    """The m×n rectangular band: (i,j)·(k,l) = (i,l), pair (i,j) stored as i·n + j."""
    if m < 1 or n < 1:
        raise AlgebraError("rectangular band dimensions must be positive")
    size = m * n
    tab = np.empty((size, size), dtype=np.int64)
    for a, b in product(range(size), repeat=2):
        tab[a, b] = (a // n) * n + (b % n)
    return FiniteAlgebra(size, {"f": tab})


def projection_algebra(sig: Signature, size: int, which: str = "first") -> FiniteAlgebra:
    tables = {}
    for f in sig.symbols:
        k = sig.arity(f)
        grid = np.indices((size,) * k) if k else None
        if k == 0:
            tables[f] = np.array(0)
        else:
            tables[f] = grid[0] if which == "first" else grid[-1]
    return FiniteAlgebra(size, tables, sig)


# ---------------------------------------------------------------- batches


class AlgebraBatch:
    """Many same-size algebras over one signature, evaluated together.

    ``tables[f]`` has shape (N,) + (size,)*arity(f).
    """

    def __init__(self, sig: Signature, size: int, tables: Mapping[str, np.ndarray]):
        self.sig = sig
        self.size = size
        self.tables = {f: np.asarray(t, dtype=np.int8 if size < 128 else np.int64) for f, t in tables.items()}
        lens = {t.shape[0] for t in self.tables.values()}
        if len(lens) > 1:
            raise AlgebraError("tables of unequal batch length")
        self.n = lens.pop() if lens else 1

    def __len__(self):
        return self.n

    @classmethod
    def every(cls, sig: Signature, size: int, cap: int = 200_000) -> AlgebraBatch:
        """Every algebra of the given size over ``sig``."""
        cells = [(f, size ** sig.arity(f)) for f in sig.symbols]
        total_cells = sum(c for _, c in cells)
        count = size**total_cells
        if count > cap:
            raise EnumerationLimitError(f"{count} algebras of size {size} exceed the cap of {cap}")
        flat = np.indices((size,) * total_cells).reshape(total_cells, -1).T if total_cells else np.zeros((1, 0), dtype=np.int64)
        tables, off = {}, 0
        for f, c in cells:
            tables[f] = flat[:, off : off + c].reshape((-1,) + (size,) * sig.arity(f))
            off += c
        return cls(sig, size, tables)

    @classmethod
    def of(cls, algebras: Sequence[FiniteAlgebra]) -> AlgebraBatch:
        A0 = algebras[0]
        return cls(A0.sig, A0.size, {f: np.stack([A.tables[f] for A in algebras]) for f in A0.sig.symbols})

    def __getitem__(self, i: int) -> FiniteAlgebra:
        return FiniteAlgebra(self.size, {f: t[i].astype(np.int64) for f, t in self.tables.items()}, self.sig)

    def select(self, mask: np.ndarray) -> AlgebraBatch:
        return AlgebraBatch(self.sig, self.size, {f: t[mask] for f, t in self.tables.items()})

    def values(self, t: Term, indices: Sequence[int]) -> np.ndarray:
        """Array of shape (N, size**k) with the value of t per algebra and valuation."""
        grids = {i: g[None, :] for i, g in _grids(self.size, indices).items()}
        V = self.size ** len(indices)
        rows = np.arange(self.n)[:, None]

        def walk(u):
            if type(u) is Var:
                return grids[u.index]
            args = [walk(c) for c in u.children]
            tab = self.tables[u.symbol]
            if not args:
                return tab[:, None]
            return tab[(rows,) + tuple(args)]

        return np.broadcast_to(walk(t), (self.n, V))

    def satisfies(self, e: Identity) -> np.ndarray:
        idx = identity_vars(e)
        return np.all(self.values(e.lhs, idx) == self.values(e.rhs, idx), axis=1)

    def fixed_by(self, m: Monoid) -> np.ndarray:
        mask = np.ones(self.n, dtype=bool)
        for s in m.elements:
            for f in self.sig.symbols:
                k = self.sig.arity(f)
                mask &= self.satisfies(Identity(s.mapping[f], fundamental(f, k)))
        return mask
