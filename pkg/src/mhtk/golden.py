"""Worked reference data: small colored terms, a swap/nest monoid, rectangular-band laws.

:func:`golden_checks` bundles the expected results as named checks; the
``selftest`` command runs them.
"""

from __future__ import annotations

from typing import Callable, Iterator

from .algebra import find_multi_hyper_counterexample, rect_band, satisfies
from .colored import colored_subterms, parse_colored, render_colored, restrict, strip
from .hypersub import Hypersubstitution, Monoid
from .multihyp import MultiHypersubstitution, apply_mhs
from .terms import Identity, Signature, parse_identity, parse_term, positions, render_position

BINARY = Signature({"f": 2})

# three colored terms over a single binary symbol
T_COLORED = "f^1(f^1(x1,x2),f^2(x1,x2))"
S_COLORED = "f^3(f^2(x1,x2),x2)"
R_COLORED = "f^3(x1,x2)"

T_POSITIONS = ["ε", "1", "2", "11", "12", "21", "22"]
T_AT_2 = "f^2(x1,x2)"
T_AT_12 = "x2"
S_SUBTERMS = {S_COLORED, "f^2(x1,x2)", "x1", "x2"}
# t(2; s(12; r)), equivalently t(2; s)(212; r)
NESTED_COMPOSITION = "f^1(f^1(x1,x2),f^3(f^2(x1,f^3(x1,x2)),x2))"
FIRST_COMPOSITION = "f^1(f^1(x1,x2),f^3(f^2(x1,x2),x2))"

SWAP = "f(x2,x1)"
SWAP_NEST = "f(f(x2,x1),x2)"

T_IMAGE = "f^1(f^2(f^2(x2,x1),x2),f^1(x2,x1))"
S_IMAGE = "f^3(f^2(f^2(x2,x1),x2),x2)"

RB_LAWS = [
    "f(x1,f(x2,x3)) = f(f(x1,x2),x3)",
    "f(f(x1,x2),x3) = f(x1,x3)",
    "f(x1,x1) = x1",
]
RB_T = "f(f(x1,x2),f(x1,x2))"
RB_S = "f(f(x1,x2),x2)"


def hyp(image: str) -> Hypersubstitution:
    return Hypersubstitution(BINARY, {"f": parse_term(image, BINARY)})


def swap_nest_monoid() -> Monoid:
    """Identity, swap, and f -> f(f(x2,x1),x2), as an explicit (non-closed) set."""
    return Monoid.explicit(
        [hyp("f(x1,x2)"), hyp(SWAP), hyp(SWAP_NEST)], names=("identity", "swap", "swap_nest")
    )


def swap_nest_rho() -> MultiHypersubstitution:
    """Color 1 -> swap, 2 -> swap_nest, 3 and every other color -> identity."""
    m = swap_nest_monoid()
    return MultiHypersubstitution({1: hyp(SWAP), 2: hyp(SWAP_NEST), 3: hyp("f(x1,x2)")}, hyp("f(x1,x2)"), m)


def rb_laws() -> list[Identity]:
    return [parse_identity(e, BINARY) for e in RB_LAWS]


def rb_pair() -> Identity:
    return Identity(parse_term(RB_T, BINARY), parse_term(RB_S, BINARY))


def golden_checks() -> Iterator[tuple[str, Callable[[], bool]]]:
    from .colored import colored_positional_compose

    t = parse_colored(T_COLORED, BINARY)
    s = parse_colored(S_COLORED, BINARY)
    r = parse_colored(R_COLORED, BINARY)
    rho = swap_nest_rho()

    yield "positions of t", lambda: sorted(render_position(p) for p in positions(t).all) == sorted(T_POSITIONS)
    yield "colored subterm at 2", lambda: render_colored(restrict(t, (2,))) == T_AT_2
    yield "colored subterm at 12", lambda: render_colored(restrict(t, (1, 2))) == T_AT_12
    yield "colored subterms of s", lambda: {render_colored(u) for u in colored_subterms(s)} == S_SUBTERMS
    yield "positional composition t(2;s)", lambda: render_colored(
        colored_positional_compose(t, (2,), s)
    ) == FIRST_COMPOSITION
    yield "nested positional composition", lambda: (
        render_colored(colored_positional_compose(t, (2,), colored_positional_compose(s, (1, 2), r)))
        == render_colored(colored_positional_compose(colored_positional_compose(t, (2,), s), (2, 1, 2), r))
        == NESTED_COMPOSITION
    )
    yield "image of t under rho", lambda: render_colored(apply_mhs(rho, t)) == T_IMAGE
    yield "image of s under rho", lambda: render_colored(apply_mhs(rho, s)) == S_IMAGE

    A = rect_band(2, 2)
    yield "2x2 rectangular band satisfies its laws", lambda: all(satisfies(A, e) for e in rb_laws())
    yield "2x2 rectangular band satisfies t = s", lambda: satisfies(A, rb_pair())

    def rb_not_multi():
        cex = find_multi_hyper_counterexample(A, rb_pair(), swap_nest_monoid())
        return cex is not None and cex.verify(A)

    yield "t = s is not a multi-hyperidentity of the band", rb_not_multi

    def rb_specific_image():
        lhs = strip(apply_mhs(rho, t))
        rhs = strip(apply_mhs(rho, s))
        return (
            satisfies(A, Identity(lhs, parse_term(SWAP, BINARY)))
            and satisfies(A, Identity(rhs, parse_term("x2", BINARY)))
            and not satisfies(A, Identity(lhs, rhs))
        )

    yield "band sends rho-image of t to f(x2,x1) and of s to x2", rb_specific_image
