"""Print (or save as CSV) the refinement trace of the generalized Riemann integral."""
import argparse
import sys

from gaugeint.cli import trace_csv
from gaugeint.corpus.problems import resolve_problem
from gaugeint.integrator import GaugeSchedule, gr_integral


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("problem", nargs="?", default="sqrt")
    ap.add_argument("--tol", type=float)
    ap.add_argument("--policy", default="henstock")
    ap.add_argument("--csv", help="write the trace here instead of a table")
    args = ap.parse_args()
    p = resolve_problem(args.problem)
    tol = args.tol or p.tol or 1e-6
    r = gr_integral(p.f_ex, p.ambient, p.E, args.policy, tol, GaugeSchedule.from_dict(p.gauge))
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(trace_csv(r.trace))
    else:
        print(f"{'k':>3} {'h_k':>10} {'gamma_k':>10} {'cells':>9} {'value':>20} {'spread':>10}")
        for row in r.trace:
            print(f"{row.k:>3} {row.h:>10.3e} {row.gamma:>10.3e} {row.cells:>9} {row.value:>20.15f} {row.spread:>10.2e}")
    expected = p.expected.get("riemann")
    print(f"{r.status}: {r.value!r}" + (f" (expected {expected})" if expected is not None else ""), file=sys.stderr)


if __name__ == "__main__":
    main()
