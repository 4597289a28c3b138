"""Multi-hypersubstitutions: a hypersubstitution chosen per color.

A multi-hypersubstitution is a total map from colors to a monoid of
hypersubstitutions.  Only finitely many colors ever matter for one colored
term, so it is stored as a finite table plus a default used for every other
color.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Iterator, Mapping

from .colored import CApp, ColoredTerm, attach, strip
from .hypersub import Hypersubstitution, Monoid, MonoidError, compose_h
from .terms import Identity, MhtkError, Signature, Term, Var, depth, positions, substitute


class EnumerationLimitError(MhtkError, RuntimeError):
    pass


class MultiHypersubstitution:
    __slots__ = ("table", "default", "monoid")

    def __init__(
        self,
        table: Mapping[int, Hypersubstitution],
        default: Hypersubstitution,
        monoid: Monoid | None = None,
    ):
        if monoid is None:
            monoid = Monoid.predicate(default.sig, "full")
        for q, sigma in list(table.items()) + [("default", default)]:
            if sigma.sig != monoid.sig:
                raise MonoidError("multi-hypersubstitution entry over a different signature")
            if sigma not in monoid:
                raise MonoidError(f"entry for color {q} is not in the monoid: {sigma.short()}")
        self.table = dict(sorted(table.items()))
        self.default = default
        self.monoid = monoid

    @classmethod
    def identity(cls, sig: Signature, monoid: Monoid | None = None) -> MultiHypersubstitution:
        return cls({}, Hypersubstitution.identity(sig), monoid)

    @classmethod
    def constant(cls, sigma: Hypersubstitution, monoid: Monoid | None = None) -> MultiHypersubstitution:
        return cls({}, sigma, monoid)

    @property
    def sig(self) -> Signature:
        return self.default.sig

    @property
    def support(self) -> set[int]:
        return set(self.table)

    def lookup(self, q: int) -> Hypersubstitution:
        return self.table.get(q, self.default)

    __call__ = lookup

    def agrees_with(self, other: MultiHypersubstitution, colors: Iterable[int] = ()) -> bool:
        """Same hypersubstitution on both supports, on ``colors``, and by default."""
        probe = set(colors) | self.support | other.support
        return self.default == other.default and all(self.lookup(q) == other.lookup(q) for q in probe)

    def __eq__(self, other):
        return isinstance(other, MultiHypersubstitution) and self.agrees_with(other)

    def __hash__(self):
        trimmed = tuple((q, s) for q, s in self.table.items() if s != self.default)
        return hash((trimmed, self.default))

    def __repr__(self):
        return f"MultiHypersubstitution({self.short()})"

    def short(self) -> str:
        parts = [f"{q}: {s.short()}" for q, s in self.table.items()]
        parts.append(f"default: {self.default.short()}")
        return "{" + ", ".join(parts) + "}"

    def render(self) -> str:
        lines = []
        kind = self.monoid.kind or "explicit"
        lines.append(f"monoid {kind}")
        for f in self.sig.symbols:
            lines.append(f"default: {f} -> {self.default.mapping[f]}")
        for q, sigma in self.table.items():
            for f in self.sig.symbols:
                lines.append(f"{q}: {f} -> {sigma.mapping[f]}")
        return "\n".join(lines) + "\n"


def lookup(rho: MultiHypersubstitution, q: int) -> Hypersubstitution:
    return rho.lookup(q)


def apply_mhs(rho: MultiHypersubstitution, ct: ColoredTerm) -> ColoredTerm:
    """The extension ρ̄ on colored terms.

    A node ⟨f, m⟩ is replaced by the skeleton σ_m(f), every operation node of
    which gets color m; the skeleton's variable x_i receives the image of the
    i-th child (copied when x_i repeats, dropped when absent).
    """
    if type(ct) is Var:
        return ct
    m = ct.color
    images = [apply_mhs(rho, c) for c in ct.children]
    return _graft(rho.lookup(m).mapping[ct.symbol], m, images)


def _graft(skeleton: Term, color: int, images) -> ColoredTerm:
    if type(skeleton) is Var:
        return images[skeleton.index - 1]
    return CApp(skeleton.symbol, color, [_graft(c, color, images) for c in skeleton.children])


def apply_mhs_term(rho: MultiHypersubstitution, t: Term, alpha: Mapping) -> Term:
    """ρ̄_α[t]: the term part of the image of ⟨t, α⟩."""
    return strip(apply_mhs(rho, attach(t, alpha)))


def compose_ch(r1: MultiHypersubstitution, r2: MultiHypersubstitution) -> MultiHypersubstitution:
    """(r1 ∘_ch r2)(q) = r1(q) ∘_h r2(q), colorwise."""
    if r1.sig != r2.sig:
        raise MonoidError("multi-hypersubstitutions over different signatures")
    table = {q: compose_h(r1.lookup(q), r2.lookup(q)) for q in r1.support | r2.support}
    default = compose_h(r1.default, r2.default)
    return MultiHypersubstitution(table, default, r1.monoid)


# ---------------------------------------------------------------- images of identities


def colorations(t: Term, colors: Iterable[int]) -> Iterator[dict]:
    """Every coloration of ``t`` with values in ``colors``."""
    f_pos = sorted(positions(t).f_pos)
    colors = sorted(set(colors))
    for values in product(colors, repeat=len(f_pos)):
        yield dict(zip(f_pos, values))


def rho_image_of_identity(
    rho: MultiHypersubstitution,
    t: Term,
    s: Term,
    colors: Iterable[int],
    cap: int = 10**6,
) -> set[Identity]:
    """ρ[t ≈ s] with both colorations drawn from a finite color set."""
    colors = sorted(set(colors))
    if not colors:
        raise ValueError("need at least one color")
    nt = len(positions(t).f_pos)
    ns = len(positions(s).f_pos)
    if len(colors) ** (nt + ns) > cap:
        raise EnumerationLimitError(
            f"{len(colors) ** (nt + ns)} coloration pairs exceed the cap of {cap}"
        )
    # lhs and rhs colorations are independent, so image sets factor
    lhs = {strip(apply_mhs(rho, attach(t, a))) for a in colorations(t, colors)}
    rhs = {strip(apply_mhs(rho, attach(s, a))) for a in colorations(s, colors)}
    return {Identity(a, b) for a in lhs for b in rhs}


def canonical_rho(m: Monoid) -> MultiHypersubstitution:
    """The multi-hypersubstitution sending color k to the k-th element of ``m``."""
    m.require_explicit()
    return MultiHypersubstitution(
        {k: sigma for k, sigma in enumerate(m.elements, 1)}, m.default_element(), m
    )


def assignment_images(
    m: Monoid, t: Term, cap: int = 10**6, max_depth: int | None = None
) -> dict[Term, ColoredTerm]:
    """Images of ``t`` under every position-wise choice of monoid elements.

    Returns image -> a colored source realizing it.  Source colors are 1-based
    indices into ``m.elements``, so ``canonical_rho(m)`` maps each source to
    its image, and one such ρ serves both sides of an identity.

    With ``max_depth``, intermediate images deeper than the bound are pruned.
    A kept image of a child occurs inside every parent image that uses it, so
    nothing within the bound is lost; the shallowest image of a child is
    always kept for parents whose skeleton drops that child.
    """
    m.require_explicit()
    elements = m.elements
    budget = [cap]

    def walk(u) -> dict:
        if type(u) is Var:
            return {u: u}
        child_maps = [walk(c) for c in u.children]
        child_items = [list(cm.items()) for cm in child_maps]
        out = {}
        for k, sigma in enumerate(elements, 1):
            skeleton = sigma.mapping[u.symbol]
            for combo in product(*child_items):
                budget[0] -= 1
                if budget[0] < 0:
                    raise EnumerationLimitError(f"more than {cap} position-wise assignments")
                image = substitute(skeleton, [img for img, _ in combo])
                if image not in out:
                    out[image] = CApp(u.symbol, k, [src for _, src in combo])
        if max_depth is not None:
            kept = {img: src for img, src in out.items() if depth(img) <= max_depth}
            if not kept:
                img = min(out, key=depth)
                kept = {img: out[img]}
            out = kept
        return out

    return walk(t)


def chi_Mc(m: Monoid, eqs: Iterable[Identity], cap: int = 10**6) -> set[Identity]:
    """All ρ̄_{α_t}[t] ≈ ρ̄_{α_s}[s] with ρ over a finite explicit monoid.

    Giving every F-position of t and s its own color lets ρ pick any element
    per position, and no coloration can do more, so this enumeration is exact.
    """
    out = set()
    for e in eqs:
        lhs = assignment_images(m, e.lhs, cap)
        rhs = assignment_images(m, e.rhs, cap)
        out.update(Identity(a, b) for a in lhs for b in rhs)
    return out
