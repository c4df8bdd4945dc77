"""Command line front end.

Exit codes: 0 success, 1 usage/schema/IO error, 2 verdict NOT_BS or
INDETERMINATE_FORM, 3 budget exhausted, 4 a check or identity failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys

from . import checks, decomposition, integrator, residue
from .corpus import problems
from .decomposition import dumps, report_dict, trace_row_dict
from .errors import GaugeIntError, ParseError, PartitionBudgetError, ProblemIOError, SchemaError
from .integrator import GaugeSchedule, gr_integral
from .partition import DEFAULT_MAX_CELLS, TagPolicy

EXIT_OK, EXIT_USAGE, EXIT_NOT_APPLICABLE, EXIT_BUDGET, EXIT_FAILED = 0, 1, 2, 3, 4
DEFAULT_TOL = 1e-6
BUDGET_ENV = "GAUGEINT_CELL_BUDGET"

VERDICT_EXIT = {
    decomposition.IDENTITY_HOLDS: EXIT_OK,
    decomposition.INDETERMINATE_FORM: EXIT_NOT_APPLICABLE,
    decomposition.NOT_BS: EXIT_NOT_APPLICABLE,
    decomposition.BUDGET: EXIT_BUDGET,
    decomposition.IDENTITY_VIOLATED: EXIT_FAILED,
}
INTEGRAL_EXIT = {
    integrator.CONVERGED: EXIT_OK,
    integrator.DIVERGENT: EXIT_NOT_APPLICABLE,
    integrator.BUDGET_EXHAUSTED: EXIT_BUDGET,
}
RESIDUE_EXIT = {
    residue.SUMMABLE: EXIT_OK,
    residue.NOT_BS: EXIT_NOT_APPLICABLE,
    residue.BUDGET_EXHAUSTED: EXIT_BUDGET,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _seed(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _tol(text):
    value = float(text)
    if not value >= 1e-12:
        raise argparse.ArgumentTypeError("tol must be at least 1e-12")
    return value


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="gaugeint", description=__doc__.splitlines()[0], formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def common(p, problem=True):
        if problem:
            p.add_argument("problem", help="builtin name, or a path containing '/' or starting with '.'")
            p.add_argument(
                "--tol", type=_tol, default=None,
                help=f"tolerance (default: the problem's own tol, else {DEFAULT_TOL:g})",
            )
            p.add_argument(
                "--policy", default="henstock", choices=[t.value for t in TagPolicy], help="tag policy"
            )
        p.add_argument("--seed", type=_seed, default=0, help="seed for randomized steps")
        p.add_argument("-o", "--output", default="-", help="output file ('-' for stdout)")

    p = sub.add_parser("integrate", help="generalized Riemann integral of f with its trace", formatter_class=fmt)
    common(p)
    p.add_argument("--no-trace", action="store_true", help="omit the refinement trace")
    p.add_argument("--trace-csv", metavar="PATH", help="also write the trace as CSV (k, h_k, gamma_k, cells, value)")

    p = sub.add_parser("residue", help="residue sum of F over E", formatter_class=fmt)
    common(p)
    p.add_argument("--no-trace", action="store_true", help="omit the probe list")
    p.add_argument("--profile", type=int, metavar="N", default=0, help="also report residues on an N-point grid")

    p = sub.add_parser("decompose", help="total change = Riemann part + residue sum", formatter_class=fmt)
    common(p)
    p.add_argument("--no-trace", action="store_true", help="omit traces and probes")

    p = sub.add_parser("corpus", help="list the builtin problems", formatter_class=fmt)
    common(p, problem=False)

    p = sub.add_parser("check", help="run property suites", formatter_class=fmt)
    p.add_argument("suites", nargs="*", default=["all"], metavar="SUITE",
                   help=f"'all' or any of: {', '.join(checks.SUITES)}")
    p.add_argument("--seed", type=_seed, default=0, help="seed for the randomized suites")
    return parser


def _cell_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None or raw == "":
        return DEFAULT_MAX_CELLS
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value <= 0:
        raise UsageError(f"{BUDGET_ENV} must be a positive integer, got {raw!r}")
    return value


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _tol_for(args, problem):
    if args.tol is not None:
        return args.tol
    return problem.tol if problem.tol is not None else DEFAULT_TOL


def trace_csv(trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "h_k", "gamma_k", "cells", "value"])
    for row in trace:
        w.writerow([row.k, format(row.h, ".17g"), format(row.gamma, ".17g"), row.cells, format(row.value, ".17g")])
    return buf.getvalue()


def cmd_integrate(args):
    p = problems.resolve_problem(args.problem)
    tol = _tol_for(args, p)
    res = gr_integral(
        p.f_ex, p.ambient, p.E, args.policy, tol, GaugeSchedule.from_dict(p.gauge), max_cells=_cell_budget()
    )
    out = {
        "problem": p.name,
        "status": res.status,
        "value": res.value,
        "message": res.message,
        "tol": tol,
        "policy": args.policy,
    }
    if not args.no_trace:
        out["trace"] = [trace_row_dict(r) for r in res.trace]
    _write(args.output, dumps(out))
    if args.trace_csv:
        _write(args.trace_csv, trace_csv(res.trace))
    return INTEGRAL_EXIT[res.status]


def cmd_residue(args):
    p = problems.resolve_problem(args.problem)
    tol = _tol_for(args, p)
    res = residue.basic_sum(p.F_ex, p.E, tol, ambient=p.ambient)
    out = {"problem": p.name, "status": res.status, "value": res.value, "message": res.message, "tol": tol}
    if args.profile:
        prof = residue.residue_function_profile(p.F_ex, p.E, args.profile, tol, p.ambient)
        out["profile"] = [{"x": x, "residue": r} for x, r in prof]
    if not args.no_trace:
        out["probes"] = [{"scale": pr.scale, "ratio": pr.ratio, "value": pr.value} for pr in res.probes]
    _write(args.output, dumps(out))
    return RESIDUE_EXIT[res.status]


def cmd_decompose(args):
    p = problems.resolve_problem(args.problem)
    report = decomposition.decompose(p, _tol_for(args, p), args.policy, _cell_budget())
    _write(args.output, dumps(report_dict(report, trace=not args.no_trace)))
    return VERDICT_EXIT[report.verdict]


def cmd_corpus(args):
    rows = [problems.builtin_problem(n).to_json() for n in problems.builtin_names()]
    _write(args.output, dumps({"problems": rows}))
    return EXIT_OK


def cmd_check(args):
    names = args.suites
    if "all" in names:
        names = list(checks.SUITES)
    unknown = [n for n in names if n not in checks.SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s): {', '.join(unknown)}; choose from all, {', '.join(checks.SUITES)}")
    failed = 0
    for name in names:
        r = checks.run_suite(name, args.seed)
        mark = "PASS" if r.passed else "FAIL"
        print(f"{mark} {r.name}: {r.cases} cases, {len(r.failures)} failures", flush=True)
        for msg in r.failures[:5]:
            print(f"    {msg}", flush=True)
        failed += not r.passed
    print(f"{len(names) - failed}/{len(names)} suites passed", flush=True)
    return EXIT_FAILED if failed else EXIT_OK


COMMANDS = {
    "integrate": cmd_integrate,
    "residue": cmd_residue,
    "decompose": cmd_decompose,
    "corpus": cmd_corpus,
    "check": cmd_check,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:  # --help and --version
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    except (SchemaError, ParseError, ProblemIOError) as err:
        print(f"gaugeint: {err}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as err:
        print(f"gaugeint: {err}", file=sys.stderr)
        return EXIT_USAGE
    except PartitionBudgetError as err:
        print(f"gaugeint: {err}", file=sys.stderr)
        return EXIT_BUDGET
    except (GaugeIntError, ValueError) as err:
        print(f"gaugeint: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
