"""K1/K2 membership over shallow binary hypersubstitutions and a closure failure of K1 ∪ {swap}."""

from mhtk.gen import shallow_binary_pool
from mhtk.golden import hyp
from mhtk.hypersub import Monoid, compose_h, k1_member, k2_member, monoid_check


def main():
    deeper = ["f(f(x1,x2),x2)", "f(x1,f(x1,x2))", "f(f(x1,x2),f(x1,x2))", "f(x1,f(x2,x1))", "f(f(x2,x1),x2)"]
    pool = shallow_binary_pool() + [hyp(t) for t in deeper]
    print(f"{'image':<28} K1    K2")
    for s in pool:
        print(f"{s.short():<28} {k1_member(s)!s:<5} {k2_member(s)!s:<5}")
    print(f"\nK1: {sum(map(k1_member, pool))}/{len(pool)}  K2: {sum(map(k2_member, pool))}/{len(pool)}")

    swap, inner = hyp("f(x2,x1)"), hyp("f(f(x1,x2),x2)")
    composite = compose_h(swap, inner)
    print("\nswap ∘ (f -> f(f(x1,x2),x2)) =", composite.short(), "in K1:", k1_member(composite))
    v = monoid_check(Monoid.plus([hyp("f(x1,x2)"), swap, inner], "k1"))
    print("K1 ∪ {swap} closed on these elements:", v is None)
    if v is not None:
        print("  escaping pair:", v.pair[0].short(), "∘", v.pair[1].short())


if __name__ == "__main__":
    main()
