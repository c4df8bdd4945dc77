"""Decompose every builtin problem and print a one-line summary per problem."""
import argparse
import time

from gaugeint.corpus.problems import builtin_names, builtin_problem
from gaugeint.decomposition import decompose


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", help="problems to run (default: all)")
    ap.add_argument("--policy", default="henstock")
    args = ap.parse_args()
    names = args.names or builtin_names()
    print(f"{'problem':<14} {'verdict':<19} {'delta_F':>12} {'riemann':>12} {'residue':>12} {'gap':>10} {'time':>7}")
    for name in names:
        t0 = time.perf_counter()
        r = decompose(builtin_problem(name), policy=args.policy)
        gap = "n/a" if r.identity_gap is None else f"{r.identity_gap:.2e}"
        print(
            f"{name:<14} {r.verdict:<19} {r.delta_F:>12.9f} {r.riemann.value:>12.9f} "
            f"{r.residue.value:>12.9f} {gap:>10} {time.perf_counter() - t0:>6.2f}s"
        )


if __name__ == "__main__":
    main()
