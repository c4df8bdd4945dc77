import json
import math

import pytest

from gaugeint import integrator, residue
from gaugeint.corpus.problems import builtin_problem
from gaugeint.decomposition import (
    BUDGET,
    IDENTITY_HOLDS,
    IDENTITY_VIOLATED,
    INDETERMINATE_FORM,
    NOT_BS,
    VERDICTS,
    DecompositionReport,
    _verdict,
    decompose,
    dumps,
    report_dict,
    total_integral,
    verify_identity,
)
from gaugeint.integrator import IntegralResult
from gaugeint.residue import ResidueResult


@pytest.mark.parametrize("name,want", [("polynomial", 1.0), ("cantor", 1.0), ("heaviside", 1.0), ("sqrt", 1.0)])
def test_total_integral(name, want):
    assert total_integral(builtin_problem(name)) == want


def test_total_integral_oscillatory():
    assert total_integral(builtin_problem("oscillatory")) == pytest.approx(math.sin(1), abs=1e-15)


@pytest.mark.parametrize("name", ["heaviside", "cantor"])
def test_jump_and_cantor_decompositions(name):
    r = decompose(builtin_problem(name))
    assert r.verdict == IDENTITY_HOLDS
    assert r.delta_F == 1.0 and r.riemann.value == 0.0
    assert abs(r.residue.value - 1) <= 1e-9
    assert verify_identity(r)


def test_log_divergent():
    r = decompose(builtin_problem("log_divergent"))
    assert r.verdict == INDETERMINATE_FORM
    assert r.riemann.status == integrator.DIVERGENT
    assert r.residue.status == residue.NOT_BS
    assert r.delta_F == 0.0 and r.identity_gap is None
    assert not verify_identity(r)


def test_verify_identity_examples():
    assert verify_identity(decompose(builtin_problem("polynomial"), tol=1e-8))
    assert verify_identity(decompose(builtin_problem("sqrt"), tol=1e-4))
    fake = DecompositionReport("x", 1.0, IntegralResult(0.5, "CONVERGED"), ResidueResult(0.0, "SUMMABLE"),
                               0.5, IDENTITY_VIOLATED, 1e-3, 1.0)
    assert not verify_identity(fake)


def test_verdict_totality():
    statuses_r = (integrator.CONVERGED, integrator.DIVERGENT, integrator.BUDGET_EXHAUSTED)
    statuses_s = (residue.SUMMABLE, residue.NOT_BS, residue.BUDGET_EXHAUSTED)
    for a in statuses_r:
        for b in statuses_s:
            for gap in (0.0, 1.0):
                assert _verdict(a, b, gap, 0.5) in VERDICTS
    assert _verdict(integrator.DIVERGENT, residue.NOT_BS, None, 1) == INDETERMINATE_FORM
    assert _verdict(integrator.CONVERGED, residue.NOT_BS, None, 1) == NOT_BS
    assert _verdict(integrator.BUDGET_EXHAUSTED, residue.SUMMABLE, None, 1) == BUDGET
    assert _verdict(integrator.CONVERGED, residue.SUMMABLE, 2.0, 1) == IDENTITY_VIOLATED


def test_budget_verdict():
    r = decompose(builtin_problem("sin"), max_cells=50)
    assert r.verdict == BUDGET and r.identity_gap is None


def test_json_report():
    r = decompose(builtin_problem("heaviside"))
    text = dumps(report_dict(r))
    d = json.loads(text)
    assert d["verdict"] == IDENTITY_HOLDS and d["residue"]["value"] == 1
    assert d["riemann"]["trace"][0]["k"] == 0
    assert dumps(report_dict(decompose(builtin_problem("heaviside")))) == text
    bad = json.loads(dumps(report_dict(decompose(builtin_problem("log_divergent")), trace=False)))
    assert bad["identity_gap"] == "NOT_APPLICABLE" and "trace" not in bad["riemann"]


def test_floats_keep_17_digits():
    assert dumps({"v": 0.1}) == '{\n  "v": 0.10000000000000001\n}\n'
    assert json.loads(dumps({"v": math.pi}))["v"] == math.pi


def test_absolutely_continuous_flag():
    r = decompose(builtin_problem("sqrt"))
    assert r.residue.value == 0.0 and r.residue.summable
    assert r.notes and "absolutely continuous" in r.notes[0]
    assert abs(r.residue.probes[-1].value) <= 1e-4


def test_flag_is_cross_checked():
    import dataclasses

    p = dataclasses.replace(builtin_problem("heaviside"), flags={"absolutely_continuous": True})
    r = decompose(p)
    assert r.residue.value == 1.0 and "not confirmed" in r.notes[0]
