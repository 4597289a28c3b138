"""Compare Mh-provability from Σ with plain provability from the colored images of Σ.

The plain side is given the images of Σ plus those of t = t for every subterm
t of Σ and the goal. Without the reflexive images the two disagree, e.g. for
Σ = ∅ and the commutative law.
"""

import argparse
import random

from mhtk.deduction import SearchBudget, prove
from mhtk.gen import random_identity
from mhtk.golden import hyp
from mhtk.hypersub import Monoid
from mhtk.multihyp import chi_Mc
from mhtk.terms import Identity, Signature, parse_identity, subterms


def plain_side(sigma, goal, m, with_refl):
    refl = [Identity(u, u) for e in sigma + [goal] for side in (e.lhs, e.rhs) for u in subterms(side)]
    return list(chi_Mc(m, sigma + (refl if with_refl else []))) + sigma


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--budget", default="depth=2,count=1500,steps=3")
    args = ap.parse_args()

    sig = Signature({"f": 2})
    m = Monoid.explicit([hyp("f(x1,x2)"), hyp("f(x2,x1)")], names=("identity", "swap"))
    trivial = Monoid.explicit([hyp("f(x1,x2)")])
    budget = SearchBudget.parse(args.budget)
    rng = random.Random(args.seed)

    cases = [([], parse_identity("f(x1,x2) = f(x2,x1)", sig))]
    cases += [([random_identity(rng, sig, 2, 2)], random_identity(rng, sig, 2, 2)) for _ in range(args.trials)]
    tally = {True: 0, False: 0}
    for sigma, goal in cases:
        mh = prove(sigma, goal, m, budget).found
        agree = {w: prove(plain_side(sigma, goal, m, w), goal, trivial, budget).found == mh for w in (True, False)}
        for w in agree:
            tally[w] += agree[w]
        if not agree[True] or not agree[False]:
            print(f"Σ={[str(e) for e in sigma]} goal={goal} mh={mh} agree(refl)={agree[True]} agree(no refl)={agree[False]}")
    print(f"\nagreement with reflexive images:    {tally[True]}/{len(cases)}")
    print(f"agreement without reflexive images: {tally[False]}/{len(cases)}")


if __name__ == "__main__":
    main()
