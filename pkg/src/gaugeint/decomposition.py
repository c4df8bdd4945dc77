"""Split the total change of F into a generalized Riemann part and a residue sum.

``decompose`` computes the three numbers independently and then compares
them; nothing on one side is derived from the other.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from . import integrator, residue
from .corpus.problems import ProblemSpec
from .integrator import GaugeSchedule, IntegralResult, gr_integral
from .kernel import delta_F
from .partition import DEFAULT_MAX_CELLS, TagPolicy
from .residue import ResidueResult, basic_sum

IDENTITY_HOLDS = "IDENTITY_HOLDS"
IDENTITY_VIOLATED = "IDENTITY_VIOLATED"
INDETERMINATE_FORM = "INDETERMINATE_FORM"
NOT_BS = "NOT_BS"
BUDGET = "BUDGET"

VERDICTS = (IDENTITY_HOLDS, IDENTITY_VIOLATED, INDETERMINATE_FORM, NOT_BS, BUDGET)


@dataclass
class DecompositionReport:
    problem: str
    delta_F: float
    riemann: IntegralResult
    residue: ResidueResult
    identity_gap: float | None
    verdict: str
    tol: float
    length: float
    policy: str = "henstock"
    max_cells: int = DEFAULT_MAX_CELLS
    notes: list = field(default_factory=list)

    @property
    def bound(self):
        return self.tol * (self.length + 1)


def total_integral(p: ProblemSpec) -> float:
    """Change of the extended antiderivative across the problem interval."""
    return delta_F(p.F_ex, p.ambient)


def _verdict(riemann_status, residue_status, gap, bound):
    if riemann_status == integrator.DIVERGENT:
        return INDETERMINATE_FORM
    if residue_status == residue.NOT_BS:
        return NOT_BS
    if integrator.BUDGET_EXHAUSTED in (riemann_status, residue_status):
        return BUDGET
    return IDENTITY_HOLDS if gap <= bound else IDENTITY_VIOLATED


def decompose(
    p: ProblemSpec,
    tol: float | None = None,
    policy=TagPolicy.HENSTOCK,
    max_cells: int = DEFAULT_MAX_CELLS,
    schedule: GaugeSchedule | None = None,
) -> DecompositionReport:
    tol = tol if tol is not None else (p.tol if p.tol is not None else 1e-6)
    if not tol >= 1e-12:
        raise ValueError("tol must be at least 1e-12")
    policy = TagPolicy.parse(policy)
    schedule = schedule or GaugeSchedule.from_dict(p.gauge)
    total = total_integral(p)
    R = gr_integral(p.f_ex, p.ambient, p.E, policy, tol, schedule, max_cells=max_cells)
    S = basic_sum(p.F_ex, p.E, tol, ambient=p.ambient)
    notes = []
    if p.flags.get("absolutely_continuous") and not p.E.is_empty:
        S, note = _absolutely_continuous(S, tol)
        notes.append(note)
    gap = None
    if R.status == integrator.CONVERGED and S.status == residue.SUMMABLE:
        gap = abs(total - (R.value + S.value))
    n = p.ambient.length
    verdict = _verdict(R.status, S.status, gap, tol * (n + 1))
    return DecompositionReport(p.name, total, R, S, gap, verdict, tol, n, policy.value, max_cells, notes)


def _absolutely_continuous(S: ResidueResult, tol: float):
    """An absolutely continuous F has no variation on a null set, so its residue sum is 0.

    The numeric estimate is kept as a cross-check: the flag is only trusted
    when the estimate is within tol of 0.
    """
    if S.status == residue.SUMMABLE and abs(S.value) <= tol:
        msg = f"absolutely continuous F: residue sum set to 0 (estimate {S.value:.3g})"
        return ResidueResult(0.0, residue.SUMMABLE, S.probes, msg), msg
    return S, f"absolutely_continuous flag not confirmed by the estimate ({S.status}, {S.value:.3g})"


def verify_identity(report: DecompositionReport, tol: float | None = None) -> bool:
    """Re-check the stored numbers against tol*(|[a, b]| + 1); nothing is recomputed."""
    tol = report.tol if tol is None else tol
    if report.identity_gap is None or not math.isfinite(report.identity_gap):
        return False
    return report.identity_gap <= tol * (report.length + 1)


def _num(v):
    if v is None:
        return None
    v = float(v)
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    return float(format(v, ".17g"))


def report_dict(report: DecompositionReport, trace: bool = True) -> dict:
    R, S = report.riemann, report.residue
    out = {
        "problem": report.problem,
        "verdict": report.verdict,
        "delta_F": _num(report.delta_F),
        "riemann": {"value": _num(R.value), "status": R.status, "message": R.message},
        "residue": {"value": _num(S.value), "status": S.status, "message": S.message},
        "identity_gap": _num(report.identity_gap) if report.identity_gap is not None else "NOT_APPLICABLE",
        "tolerances": {"tol": _num(report.tol), "identity_bound": _num(report.bound)},
        "policy": report.policy,
        "max_cells": report.max_cells,
    }
    if report.notes:
        out["notes"] = list(report.notes)
    if trace:
        out["riemann"]["trace"] = [trace_row_dict(r) for r in R.trace]
        out["residue"]["probes"] = [
            {"scale": _num(pr.scale), "ratio": _num(pr.ratio), "value": _num(pr.value)} for pr in S.probes
        ]
    return out


def trace_row_dict(row) -> dict:
    return {
        "k": row.k,
        "h_k": _num(row.h),
        "gamma_k": _num(row.gamma),
        "window_k": _num(row.window),
        "cells": row.cells,
        "value": _num(row.value),
        "spread": _num(row.spread),
    }


def dumps(obj) -> str:
    """JSON text with 17 significant digits for every float."""
    return _encode(obj, 0) + "\n"


def _encode(obj, depth):
    pad = "  " * (depth + 1)
    end = "  " * depth
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, depth + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _encode(v, depth + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format(obj, ".17g") if math.isfinite(obj) else json.dumps(str(obj))
    if isinstance(obj, int):
        return str(obj)
    return json.dumps(obj, ensure_ascii=False)
