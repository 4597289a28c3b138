"""Mixed images make the Mh-closure strictly larger than the plain closure.

With Σ = associativity and M = {identity, swap}, coloring the outer f of the
left side with swap gives f(x3,f(x1,x2)) = f(x1,f(x2,x3)). The left-zero band
f(x,y) = x satisfies Σ but not this image, and swap does not fix it. Many other
extras, commutativity among them, come from images of t = t.
"""

import argparse

from mhtk.algebra import fixed_by, projection_algebra, satisfies
from mhtk.deduction import SearchBudget, d_closure_bounded, mh_closure_bounded
from mhtk.golden import hyp
from mhtk.hypersub import Monoid
from mhtk.terms import Signature, parse_identity, render_term


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budget", default="depth=2,count=3000,steps=2")
    args = ap.parse_args()

    sig = Signature({"f": 2})
    sigma = [parse_identity("f(f(x1,x2),x3) = f(x1,f(x2,x3))", sig)]
    m = Monoid.explicit([hyp("f(x1,x2)"), hyp("f(x2,x1)")], names=("identity", "swap"))
    budget = SearchBudget.parse(args.budget)

    plain = d_closure_bounded(sigma, sig, budget)
    mh = mh_closure_bounded(sigma, m, budget)
    extra = sorted(mh.identities - plain.identities, key=lambda e: (len(str(e)), str(e)))
    print(f"plain closure: {len(plain)} identities (exhausted={plain.exhausted})")
    print(f"Mh closure:    {len(mh)} identities (exhausted={mh.exhausted})")
    print(f"only in Mh closure: {len(extra)}")

    lz = projection_algebra(sig, 2, "first")
    print("\nleft-zero band satisfies Σ:", all(satisfies(lz, e) for e in sigma))
    print("left-zero band fixed by swap:", fixed_by(lz, m))
    mixed = parse_identity("f(x3,f(x1,x2)) = f(x1,f(x2,x3))", sig)
    print("\nmixed image", mixed, "in Mh closure:", mixed in mh, "in plain closure:", mixed in plain)
    print("left-zero band satisfies it:", satisfies(lz, mixed))
    failing = [e for e in extra if not satisfies(lz, e)]
    print(f"extra identities false in it: {len(failing)}")
    for e in failing[:8]:
        print("  ", render_term(e.lhs), "=", render_term(e.rhs))


if __name__ == "__main__":
    main()
