import random
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mhtk.colored import CApp, attach, colored_positional_compose, coloration_of, parse_colored, strip
from mhtk.gen import random_colored_term, shallow_binary_pool
from mhtk.golden import S_IMAGE, T_IMAGE, hyp, rb_pair, swap_nest_monoid, swap_nest_rho
from mhtk.hypersub import Monoid, MonoidError, apply_hat, chi_M
from mhtk.multihyp import (
    EnumerationLimitError,
    MultiHypersubstitution,
    apply_mhs,
    assignment_images,
    canonical_rho,
    chi_Mc,
    colorations,
    compose_ch,
    rho_image_of_identity,
)
from mhtk.terms import Identity, Var, depth, parse_term, positions, variables

from strategies import BINARY, MIXED, colored_terms, hypersubs, rhos

ID = hyp("f(x1,x2)")
SWAP = hyp("f(x2,x1)")
NEST = hyp("f(f(x2,x1),x2)")


def C(text, sig=BINARY):
    return parse_colored(text, sig)


def T(text):
    return parse_term(text, BINARY)


class TestLookup:
    def test_table_and_default(self):
        rho = MultiHypersubstitution({1: SWAP}, ID)
        assert rho.lookup(1) == SWAP
        assert rho.lookup(99) == ID

    def test_reference_rho(self):
        assert swap_nest_rho().lookup(2).mapping["f"] == T("f(f(x2,x1),x2)")

    def test_entries_must_be_in_monoid(self):
        with pytest.raises(MonoidError):
            MultiHypersubstitution({1: NEST}, ID, Monoid.explicit([ID, SWAP]))

    def test_equality_ignores_redundant_entries(self):
        assert MultiHypersubstitution({4: ID}, ID) == MultiHypersubstitution.identity(BINARY)


class TestApply:
    def test_reference_images(self):
        rho = swap_nest_rho()
        assert apply_mhs(rho, C("f^1(f^1(x1,x2),f^2(x1,x2))")) == C(T_IMAGE)
        assert apply_mhs(rho, C("f^3(f^2(x1,x2),x2)")) == C(S_IMAGE)

    @given(colored_terms(MIXED, 4))
    def test_identity(self, ct):
        assert apply_mhs(MultiHypersubstitution.identity(MIXED), ct) == ct

    def test_projection_takes_child_coloring(self):
        rho = MultiHypersubstitution({1: hyp("x2")}, ID)
        assert apply_mhs(rho, C("f^1(x1,f^2(x2,x3))")) == C("f^2(x2,x3)")

    def test_duplication_copies_colors(self):
        rho = MultiHypersubstitution({1: hyp("f(x2,x2)")}, ID)
        assert apply_mhs(rho, C("f^1(x1,f^5(x2,x3))")) == C("f^1(f^5(x2,x3),f^5(x2,x3))")

    @given(colored_terms(MIXED, 4), rhos(MIXED))
    def test_coloration_well_formed(self, ct, rho):
        out = apply_mhs(rho, ct)
        assert set(coloration_of(out)) == positions(strip(out)).f_pos

    @given(colored_terms(MIXED, 4), hypersubs(MIXED))
    def test_constant_rho_is_plain_extension(self, ct, sigma):
        assert strip(apply_mhs(MultiHypersubstitution.constant(sigma), ct)) == apply_hat(sigma, strip(ct))


class TestCompose:
    def test_unit(self):
        rho = swap_nest_rho()
        rid = MultiHypersubstitution.identity(BINARY)
        for q in range(6):
            assert compose_ch(rid, rho).lookup(q) == rho.lookup(q)

    def test_swap_twice(self):
        rho = MultiHypersubstitution({1: SWAP}, ID)
        both = compose_ch(rho, rho)
        assert both.lookup(1) == ID and both.lookup(7) == ID

    def test_homomorphism_on_reference(self):
        full = Monoid.predicate(BINARY, "full")
        r1 = MultiHypersubstitution(swap_nest_rho().table, ID, full)
        r2 = MultiHypersubstitution({2: SWAP, 3: NEST}, SWAP, full)
        for text in ["f^1(f^1(x1,x2),f^2(x1,x2))", "f^3(f^2(x1,x2),x2)"]:
            ct = C(text)
            assert apply_mhs(compose_ch(r1, r2), ct) == apply_mhs(r1, apply_mhs(r2, ct))

    def test_escape_from_explicit_monoid(self):
        # NEST after NEST is not among the three listed elements
        rho = swap_nest_rho()
        with pytest.raises(MonoidError):
            compose_ch(rho, rho)

    @given(rhos(MIXED), rhos(MIXED), colored_terms(MIXED, 4))
    def test_homomorphism(self, r1, r2, ct):
        assert apply_mhs(compose_ch(r1, r2), ct) == apply_mhs(r1, apply_mhs(r2, ct))

    @given(rhos(MIXED), rhos(MIXED), rhos(MIXED))
    def test_associative(self, a, b, c):
        assert compose_ch(a, compose_ch(b, c)) == compose_ch(compose_ch(a, b), c)


class TestInterchange:
    """Replacing then mapping equals mapping with a fresh placeholder, then substituting."""

    @given(colored_terms(MIXED, 3), colored_terms(MIXED, 3), rhos(MIXED), st.data())
    def test_interchange(self, t, s, rho, data):
        p = data.draw(st.sampled_from(sorted(positions(t).all)))
        j = 1 + max(variables(strip(t)) | variables(strip(s)) | {0})
        left = apply_mhs(rho, colored_positional_compose(t, p, s))
        holed = apply_mhs(rho, colored_positional_compose(t, p, Var(j)))
        right = _plug(holed, j, apply_mhs(rho, s))
        assert left == right


def _plug(ct, j, filler):
    if type(ct) is Var:
        return filler if ct.index == j else ct
    return CApp(ct.symbol, ct.color, [_plug(c, j, filler) for c in ct.children])


class TestRhoImage:
    def test_identity_rho(self):
        e = rb_pair()
        assert rho_image_of_identity(MultiHypersubstitution.identity(BINARY), e.lhs, e.rhs, [1, 2]) == {e}

    def test_contains_reference_image(self):
        e = rb_pair()
        images = rho_image_of_identity(swap_nest_rho(), e.lhs, e.rhs, [1, 2, 3])
        assert Identity(T("f(f(f(x2,x1),x2),f(x2,x1))"), T("f(f(f(x2,x1),x2),x2)")) in images

    def test_counting_bound(self):
        e = rb_pair()
        colors = [1, 2, 3]
        images = rho_image_of_identity(swap_nest_rho(), e.lhs, e.rhs, colors)
        nt, ns = len(positions(e.lhs).f_pos), len(positions(e.rhs).f_pos)
        assert len(images) <= len(colors) ** nt * len(colors) ** ns

    def test_cap(self):
        e = rb_pair()
        with pytest.raises(EnumerationLimitError):
            rho_image_of_identity(swap_nest_rho(), e.lhs, e.rhs, [1, 2, 3], cap=10)


class TestChiMc:
    def test_trivial_monoid(self):
        e = rb_pair()
        assert chi_Mc(Monoid.explicit([ID]), [e]) == {e}

    def test_four_images(self):
        e = Identity(T("f(x1,x2)"), T("f(x1,x2)"))
        out = chi_Mc(Monoid.explicit([ID, SWAP]), [e])
        assert len(out) == 4
        assert Identity(T("f(x1,x2)"), T("f(x2,x1)")) in out

    def test_contains_plain_closure(self):
        m = Monoid.explicit(shallow_binary_pool())
        eqs = [rb_pair(), Identity(T("f(x1,f(x2,x3))"), T("f(f(x1,x2),x3)"))]
        assert chi_M(m, eqs) <= chi_Mc(m, eqs)

    def test_matches_distinct_coloring_enumeration(self):
        # every F-position its own color, ρ ranging over all maps into M
        m = swap_nest_monoid()
        e = rb_pair()
        nt = len(positions(e.lhs).f_pos)
        ns = len(positions(e.rhs).f_pos)
        colors = list(range(1, nt + ns + 1))
        alpha_t = dict(zip(sorted(positions(e.lhs).f_pos), colors[:nt]))
        alpha_s = dict(zip(sorted(positions(e.rhs).f_pos), colors[nt:]))
        brute = set()
        for choice in product(m.elements, repeat=len(colors)):
            rho = MultiHypersubstitution(dict(zip(colors, choice)), ID, m)
            brute.add(Identity(strip(apply_mhs(rho, attach(e.lhs, alpha_t))), strip(apply_mhs(rho, attach(e.rhs, alpha_s)))))
        assert chi_Mc(m, [e]) == brute

    def test_rho_images_with_palette_are_included(self):
        m = swap_nest_monoid()
        e = rb_pair()
        full = chi_Mc(m, [e])
        for choice in product(m.elements, repeat=2):
            rho = MultiHypersubstitution(dict(zip([1, 2], choice)), ID, m)
            assert rho_image_of_identity(rho, e.lhs, e.rhs, [1, 2]) <= full

    def test_predicate_monoid_rejected(self):
        with pytest.raises(MonoidError):
            chi_Mc(Monoid.predicate(BINARY, "k1"), [rb_pair()])


class TestAssignmentImages:
    def test_sources_reproduce_images(self):
        m = swap_nest_monoid()
        rho = canonical_rho(m)
        for img, src in assignment_images(m, T("f(f(x1,x2),x3)")).items():
            assert strip(apply_mhs(rho, src)) == img

    def test_depth_pruning_keeps_shallow_images(self):
        m = swap_nest_monoid()
        t = T("f(f(x1,x2),f(x1,x2))")
        full = assignment_images(m, t)
        pruned = assignment_images(m, t, max_depth=3)
        assert {i for i in full if depth(i) <= 3} == set(pruned)

    def test_cap(self):
        with pytest.raises(EnumerationLimitError):
            assignment_images(swap_nest_monoid(), T("f(f(f(x1,x2),x2),f(x1,x2))"), cap=5)


class TestColorations:
    def test_count(self):
        t = T("f(f(x1,x2),x3)")
        assert len(list(colorations(t, [1, 2, 3]))) == 9

    def test_random_colored_terms_round_trip(self):
        rng = random.Random(3)
        for _ in range(50):
            ct = random_colored_term(rng, MIXED, 4, [1, 2], 3)
            assert attach(strip(ct), coloration_of(ct)) == ct
