import random

import pytest

from mhtk.algebra import FiniteAlgebra, rect_band, satisfies
from mhtk.colored import parse_colored
from mhtk.deduction import (
    Axiom,
    MhRule,
    Proof,
    ProofRejected,
    ProofStep,
    Refl,
    Replace,
    SearchBudget,
    Sym,
    Trans,
    VarSubst,
    check_proof,
    d_closure_bounded,
    mh_closure_bounded,
    parse_proof,
    proof_ok,
    prove,
    render_proof,
    soundness_audit,
)
from mhtk.golden import hyp, rb_laws, rb_pair, swap_nest_monoid, swap_nest_rho
from mhtk.hypersub import Monoid
from mhtk.multihyp import chi_Mc
from mhtk.terms import Identity, parse_identity, parse_term, subterms

from strategies import BINARY

ID = hyp("f(x1,x2)")
SWAP = hyp("f(x2,x1)")
TRIVIAL = Monoid.explicit([ID])
SWAPS = Monoid.explicit([ID, SWAP])
COMM = parse_identity("f(x1,x2) = f(x2,x1)", BINARY)
SMALL = SearchBudget(max_term_depth=2, max_identity_count=1500, max_steps=4)


def T(text):
    return parse_term(text, BINARY)


def E(text):
    return parse_identity(text, BINARY)


def steps(*pairs):
    return tuple(ProofStep(c, r) for c, r in pairs)


def rb_image():
    return Identity(T("f(f(f(x2,x1),x2),f(x2,x1))"), T("f(f(f(x2,x1),x2),x2)"))


def rb_mh_proof():
    rule = MhRule(
        0,
        swap_nest_rho(),
        parse_colored("f^1(f^1(x1,x2),f^2(x1,x2))", BINARY),
        parse_colored("f^3(f^2(x1,x2),x2)", BINARY),
    )
    return Proof(steps((rb_pair(), Axiom()), (rb_image(), rule)), rb_image())


class TestCheck:
    def test_axiom(self):
        check_proof([COMM], Proof(steps((COMM, Axiom())), COMM), TRIVIAL)

    def test_substitution_instance(self):
        goal = E("f(x3,x2) = f(x2,x3)")
        p = Proof(steps((COMM, Axiom()), (goal, VarSubst(0, 1, T("x3")))), goal)
        check_proof([COMM], p, TRIVIAL)

    def test_variable_rename_chain(self):
        # swap x1 and x2 through a spare variable
        goal = E("f(x2,x1) = f(x1,x2)")
        p = Proof(
            steps(
                (COMM, Axiom()),
                (E("f(x3,x2) = f(x2,x3)"), VarSubst(0, 1, T("x3"))),
                (E("f(x3,x1) = f(x1,x3)"), VarSubst(1, 2, T("x1"))),
                (goal, VarSubst(2, 3, T("x2"))),
            ),
            goal,
        )
        check_proof([COMM], p, TRIVIAL)

    def test_sym_trans_refl(self):
        a, b = E("f(x1,x1) = x1"), E("x1 = f(x1,x1)")
        p = Proof(steps((a, Axiom()), (b, Sym(0)), (E("f(x1,x1) = f(x1,x1)"), Trans(0, 1))), E("f(x1,x1) = f(x1,x1)"))
        check_proof([a], p, TRIVIAL)
        check_proof([], Proof(steps((E("x1 = x1"), Refl())), E("x1 = x1")), TRIVIAL)

    def test_replace(self):
        a = E("f(x1,x1) = x1")
        concl = E("f(x2,x1) = f(x2,f(x1,x1))")
        p = Proof(steps((a, Axiom()), (concl, Replace(0, T("f(x2,f(x1,x1))"), (2,)))), concl)
        check_proof([a], p, TRIVIAL)

    def test_band_image_via_mh(self):
        check_proof(rb_laws() + [rb_pair()], rb_mh_proof(), swap_nest_monoid())
        assert not satisfies(rect_band(2, 2), rb_image())

    def test_rejects_non_axiom(self):
        with pytest.raises(ProofRejected) as info:
            check_proof([], Proof(steps((COMM, Axiom())), COMM), TRIVIAL)
        assert info.value.step == 0

    def test_rejects_wrong_instance(self):
        bad = E("f(x3,x2) = f(x3,x2)")
        p = Proof(steps((COMM, Axiom()), (bad, VarSubst(0, 1, T("x3")))), bad)
        with pytest.raises(ProofRejected) as info:
            check_proof([COMM], p, TRIVIAL)
        assert info.value.step == 1

    def test_rejects_absent_variable(self):
        p = Proof(steps((COMM, Axiom()), (COMM, VarSubst(0, 5, T("x1")))), COMM)
        assert not proof_ok([COMM], p, TRIVIAL)

    def test_rejects_forward_premise(self):
        p = Proof(steps((COMM.swapped(), Sym(1)), (COMM, Axiom())), COMM)
        with pytest.raises(ProofRejected) as info:
            check_proof([COMM], p, TRIVIAL)
        assert info.value.step == 0

    def test_rejects_bad_replace_position(self):
        a = E("f(x1,x1) = x1")
        concl = E("f(x2,x1) = f(x2,f(x1,x1))")
        p = Proof(steps((a, Axiom()), (concl, Replace(0, T("f(x2,f(x1,x1))"), (1,)))), concl)
        assert not proof_ok([a], p, TRIVIAL)

    def test_rejects_rho_outside_monoid(self):
        assert not proof_ok(rb_laws() + [rb_pair()], rb_mh_proof(), SWAPS)

    def test_rejects_mismatched_sources(self):
        good = rb_mh_proof()
        rule = good.steps[1].rule
        wrong = MhRule(0, rule.rho, rule.rhs, rule.lhs)
        p = Proof((good.steps[0], ProofStep(rb_image(), wrong)), rb_image())
        assert not proof_ok([rb_pair()], p, swap_nest_monoid())


class TestText:
    def test_round_trip_mh(self):
        m = swap_nest_monoid()
        p = rb_mh_proof()
        again = parse_proof(render_proof(p), m)
        assert again == p
        assert render_proof(again) == render_proof(p)

    def test_format(self):
        p = Proof(steps((E("x1 = x1"), Refl())), E("x1 = x1"))
        assert render_proof(p) == "1. x1 = x1  [refl]\n"

    def test_round_trip_found_proofs(self):
        r = prove(rb_laws(), rb_pair(), TRIVIAL, SearchBudget(max_term_depth=2))
        assert r.found
        assert parse_proof(render_proof(r.proof), TRIVIAL) == r.proof


class TestBudget:
    def test_parse(self):
        b = SearchBudget.parse("depth=2,count=50,steps=3,palette=2")
        assert b == SearchBudget(2, 50, 3, (1, 2))

    @pytest.mark.parametrize("text", ["depth=0", "size=3", "depth=x"])
    def test_parse_rejects(self, text):
        with pytest.raises(ValueError):
            SearchBudget.parse(text)


class TestProve:
    def test_goal_in_sigma(self):
        r = prove([COMM], COMM, TRIVIAL, SMALL)
        assert r.found and len(r.proof) == 1

    def test_symmetry(self):
        r = prove([COMM], COMM.swapped(), SWAPS, SMALL)
        assert r.found
        check_proof([COMM], r.proof, SWAPS)

    def test_band_pair_from_laws(self):
        r = prove(rb_laws(), rb_pair(), TRIVIAL, SearchBudget(max_term_depth=2))
        assert r.found
        check_proof(rb_laws(), r.proof, TRIVIAL)

    def test_band_image_via_engine(self):
        sigma = rb_laws() + [rb_pair()]
        r = prove(sigma, rb_image(), swap_nest_monoid(), SearchBudget(max_term_depth=4, max_steps=1))
        assert r.found
        check_proof(sigma, r.proof, swap_nest_monoid())
        assert any(isinstance(s.rule, MhRule) for s in r.proof.steps)

    def test_commutativity_from_reflexivity(self):
        # t ≈ t plus the rule gives σ̂[t] ≈ σ'̂[t] without any axiom
        r = prove([], COMM, SWAPS, SMALL)
        assert r.found
        check_proof([], r.proof, SWAPS)

    def test_not_found_is_reported(self):
        r = prove([], E("x1 = x2"), TRIVIAL, SMALL)
        assert not r.found and r.status in {"saturated", "exhausted"}

    def test_saturated_vs_exhausted(self):
        r = prove([E("f(x1,x1) = x1")], E("x1 = x2"), TRIVIAL, SearchBudget(1, 10, 1))
        assert r.status == "exhausted"
        r = prove([], E("x1 = x2"), TRIVIAL, SearchBudget(1, 100, 5))
        assert r.status == "saturated"

    def test_projection_law_renames(self):
        r = prove([E("f(x1,x2) = x1")], E("f(x1,x2) = x2"), SWAPS, SMALL)
        assert r.found
        check_proof([E("f(x1,x2) = x1")], r.proof, SWAPS)


class TestClosure:
    def test_empty_sigma_is_reflexive(self):
        c = d_closure_bounded([], BINARY, SMALL)
        assert all(e.lhs == e.rhs for e in c.identities)
        assert E("x1 = x1") in c

    def test_contains_sigma_and_context_consequence(self):
        a = E("f(x1,x1) = x1")
        c = d_closure_bounded([a], BINARY, SMALL)
        assert a in c
        # contexts come from subterms of Σ: x1 inside f(x1,x1) is replaced by f(x1,x1)
        assert E("f(f(x1,x1),x1) = f(x1,x1)") in c

    def test_contains_palette_images(self):
        sigma = [E("f(x1,x1) = x1")]
        c = mh_closure_bounded(sigma, SWAPS, SMALL)
        assert chi_Mc(SWAPS, sigma) <= c.identities

    def test_monotone_in_budget(self):
        sigma = [E("f(x1,x1) = x1")]
        small = mh_closure_bounded(sigma, SWAPS, SearchBudget(2, 300, 2))
        large = mh_closure_bounded(sigma, SWAPS, SearchBudget(2, 600, 3))
        assert small.identities <= large.identities

    def test_monotone_in_sigma_and_monoid(self):
        b = SearchBudget(2, 5000, 2)
        base = mh_closure_bounded([E("f(x1,x1) = x1")], TRIVIAL, b)
        more_sigma = mh_closure_bounded([E("f(x1,x1) = x1"), E("f(f(x1,x2),x3) = f(x1,x3)")], TRIVIAL, b)
        more_m = mh_closure_bounded([E("f(x1,x1) = x1")], SWAPS, b)
        # round limits keep monotonicity; only the count cap (rounds == -1) would not
        assert -1 not in (base.rounds, more_sigma.rounds, more_m.rounds)
        assert base.identities <= more_m.identities
        assert base.identities <= more_sigma.identities

    def test_deterministic(self):
        sigma = [E("f(x1,x1) = x1")]
        a = mh_closure_bounded(sigma, SWAPS, SMALL)
        b = mh_closure_bounded(sigma, SWAPS, SMALL)
        assert a.ordered == b.ordered


SEMILATTICE = FiniteAlgebra(2, {"f": [[0, 0], [0, 1]]})


class TestAudit:
    def test_trivial_algebra(self):
        sigma = [COMM]
        c = mh_closure_bounded(sigma, SWAPS, SMALL)
        assert soundness_audit(sigma, c.identities, [rect_band(1, 1)], SWAPS).ok

    def test_semilattice(self):
        sigma = [COMM]
        c = d_closure_bounded(sigma, BINARY, SMALL)
        assert soundness_audit(sigma, c.identities, [SEMILATTICE], TRIVIAL).ok

    def test_band_premise_fails(self):
        report = soundness_audit(rb_laws(), [], [rect_band(2, 2)], swap_nest_monoid())
        assert report.status == "premise-failed"

    def test_premise_needs_fixed_operations(self):
        # Σ empty, so every axiom is vacuously fine, yet swap changes the band
        report = soundness_audit([], [], [rect_band(2, 2)], SWAPS)
        assert report.status == "premise-failed"

    def test_detects_violation(self):
        report = soundness_audit([], [E("x1 = x2")], [SEMILATTICE], TRIVIAL)
        assert report.status == "violation" and report.identity == E("x1 = x2")


class TestEmptySigmaCounterexample:
    """Axioms alone can hold in A while the closure of Σ does not."""

    def test_commutativity_derivable_but_false(self):
        band = rect_band(2, 2)
        r = prove([], COMM, SWAPS, SMALL)
        assert r.found
        assert not satisfies(band, COMM)
        # Σ = ∅ holds everywhere, so only the fixed-point condition rejects the band
        assert not soundness_audit([], [COMM], [band], SWAPS).ok


class TestEquivalence:
    """Mh-derivability from Σ matches plain derivability from the ρ-images.

    Reflexive instances are included on the plain side because the rule also
    acts on t ≈ t.
    """

    CASES = [
        ([E("f(x1,x1) = x1")], [COMM, E("f(x2,x2) = x2"), E("x1 = x2")]),
        ([E("f(x1,x2) = x1")], [E("f(x2,x1) = x1"), E("f(x1,x2) = x2"), COMM, E("x1 = x2")]),
        ([E("f(f(x1,x2),x3) = f(x1,x3)")], [COMM, E("f(f(x2,x1),x3) = f(x3,x1)")]),
    ]

    @pytest.mark.parametrize("sigma,goals", CASES)
    def test_agree(self, sigma, goals):
        for g in goals:
            mh = prove(sigma, g, SWAPS, SMALL).found
            refl = [Identity(u, u) for e in sigma + [g] for side in (e.lhs, e.rhs) for u in subterms(side)]
            plain = prove(list(chi_Mc(SWAPS, sigma + refl)) + sigma, g, TRIVIAL, SMALL).found
            assert mh == plain, g


class TestSoundnessRandom:
    def test_random_configurations(self):
        from mhtk.algebra import AlgebraBatch
        from mhtk.gen import random_identity

        rng = random.Random(17)
        batch = AlgebraBatch.every(BINARY, 2)
        for _ in range(6):
            sigma = [random_identity(rng, BINARY, 2, 2)]
            m = rng.choice([TRIVIAL, SWAPS])
            c = mh_closure_bounded(sigma, m, SearchBudget(2, 400, 2))
            mask = batch.fixed_by(m)
            for e in sigma:
                mask &= batch.satisfies(e)
            models = batch.select(mask)
            for e in c.identities:
                assert models.satisfies(e).all(), e
