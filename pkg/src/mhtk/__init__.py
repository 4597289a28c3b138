"""Colored terms, multi-hypersubstitutions, finite algebras, deduction and tree transducers."""

from .algebra import (
    AlgebraBatch,
    FiniteAlgebra,
    derived_algebra,
    derived_algebra_mh,
    eval_term,
    find_multi_hyper_counterexample,
    is_multi_hyperidentity,
    multi_hypersatisfies,
    rect_band,
    satisfies,
)
from .colored import CApp, attach, parse_colored, render_colored, strip
from .deduction import Proof, SearchBudget, check_proof, mh_closure_bounded, prove, soundness_audit
from .hypersub import Hypersubstitution, Monoid, apply_hat, compose_h, k1_member, k2_member
from .multihyp import MultiHypersubstitution, apply_mhs, chi_Mc, compose_ch
from .terms import App, Identity, MhtkError, Signature, Var, parse_identity, parse_term, render_term
from .transducer import MhTransducer, from_mhs, run

__all__ = [
    "AlgebraBatch", "App", "CApp", "FiniteAlgebra", "Hypersubstitution", "Identity", "MhTransducer",
    "MhtkError", "Monoid", "MultiHypersubstitution", "Proof", "SearchBudget", "Signature", "Var",
    "apply_hat", "apply_mhs", "attach", "check_proof", "chi_Mc", "compose_ch", "compose_h",
    "derived_algebra", "derived_algebra_mh", "eval_term", "find_multi_hyper_counterexample",
    "from_mhs", "is_multi_hyperidentity", "k1_member", "k2_member", "mh_closure_bounded",
    "multi_hypersatisfies", "parse_colored", "parse_identity", "parse_term", "prove", "rect_band",
    "render_colored", "render_term", "run", "satisfies", "soundness_audit", "strip",
]
