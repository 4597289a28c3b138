"""Search the 2x2 rectangular band for failing images of f(f(x1,x2),f(x1,x2)) = f(f(x1,x2),x2)
under every coloring by the set {identity, swap, swap_nest}."""

import argparse

from mhtk.algebra import multi_hyper_counterexamples, rect_band, satisfies
from mhtk.colored import render_colored
from mhtk.golden import rb_laws, rb_pair, swap_nest_monoid
from mhtk.terms import render_term


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--limit", type=int, default=5, help="how many failing images to print")
    args = ap.parse_args()

    A, m, e = rect_band(2, 2), swap_nest_monoid(), rb_pair()
    print("band laws hold:", all(satisfies(A, law) for law in rb_laws()))
    print("pair holds as a plain identity:", satisfies(A, e))
    total = 0
    for cex in multi_hyper_counterexamples(A, e, m):
        total += 1
        if total <= args.limit:
            print(f"\n#{total}")
            print("  lhs coloring:", render_colored(cex.lhs_source))
            print("  rhs coloring:", render_colored(cex.rhs_source))
            print("  image:", render_term(cex.image.lhs), "=", render_term(cex.image.rhs))
            print("  valuation:", cex.valuation, "values:", cex.lhs_value, "vs", cex.rhs_value)
    print(f"\nfailing image pairs: {total}")


if __name__ == "__main__":
    main()
