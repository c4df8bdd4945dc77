import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaugeint.corpus.expr import ExprFunction
from gaugeint.corpus.problems import builtin_problem
from gaugeint.exceptional import EMPTY, FinitePoints
from gaugeint.integrator import (
    BUDGET_EXHAUSTED,
    CONVERGED,
    DIVERGENT,
    GaugeSchedule,
    SingularityAdapted,
    Uniform,
    gr_integral,
    limit_check,
    limit_scan,
    ordinary_riemann,
    proximity_check,
)
from gaugeint.kernel import Interval, TaggedPartition, extend, riemann_sum
from gaugeint.partition import Gauge, TagPolicy, cousin_partition, random_partition

UNIT = Interval(0.0, 1.0)
SYM = Interval(-1.0, 1.0)
ZERO = FinitePoints((0.0,), SYM)


def fx(src, E=EMPTY):
    return extend(ExprFunction(src), E)


def test_strategy_invariants():
    with pytest.raises(ValueError):
        SingularityAdapted(0.1, 0.5, 0.2)
    with pytest.raises(ValueError):
        SingularityAdapted(0.1, 0.0, 0.01)
    with pytest.raises(ValueError):
        Uniform(0.0)
    g = SingularityAdapted(0.1, 0.5, 1e-4).build(None, ZERO)
    assert g(0.0) == 1e-4
    assert g(0.5) == 0.1
    assert g(0.01) == pytest.approx(0.005)
    assert g(1e-6) == 1e-4


def test_linear_integrand():
    r = gr_integral(fx("2*x"), UNIT, tol=1e-8)
    assert r.status == CONVERGED and abs(r.value - 1) <= 1e-8
    r = ordinary_riemann(fx("2*x"), UNIT, tol=1e-8)
    assert r.converged and abs(r.value - 1) <= 1e-8


def test_unbounded_integrand():
    f = fx("1/(2*sqrt(x))", ZERO)
    r = gr_integral(f, SYM, ZERO, tol=1e-4, schedule=GaugeSchedule(c=0.125))
    assert r.status == CONVERGED
    assert abs(r.value - 1) <= 1e-4


def test_harmonic_diverges():
    r = gr_integral(fx("1/x", ZERO), SYM, ZERO, tol=1e-6)
    assert r.status == DIVERGENT
    assert r.trace


def test_sine_ordinary():
    r = ordinary_riemann(fx("sin(x)"), Interval(0.0, math.pi), tol=1e-6)
    assert r.converged and abs(r.value - 2) <= 1e-6


def test_dirichlet_finite_modification():
    p = builtin_problem("dirichlet")
    r = ordinary_riemann(p.f_ex, p.ambient, tol=p.tol)
    assert r.converged and abs(r.value) <= p.tol


def test_budget_exhaustion():
    r = gr_integral(fx("sin(x)"), UNIT, tol=1e-12, max_cells=200)
    assert r.status == BUDGET_EXHAUSTED and r.message


def test_tol_floor():
    with pytest.raises(ValueError):
        gr_integral(fx("x"), UNIT, tol=1e-13)


def test_limit_check_examples():
    assert limit_check(fx("x^2"), fx("2*x"), UNIT, eps=1e-3) == []
    assert limit_check(fx("x^2"), fx("3*x"), UNIT, eps=1e-3) != []
    assert limit_check(fx("abs(x)", ZERO), fx("sign(x)", ZERO), SYM, ZERO, eps=1e-3) == []


def test_limit_scan_reports_violating_cells():
    bad, unresolved = limit_scan(fx("x^2"), fx("3*x"), UNIT, eps=1e-3, sample_count=50)
    assert unresolved == [] or len(bad) > 40
    v = bad[0]
    assert v.cell.lo <= v.tag <= v.cell.hi
    assert abs(v.quotient - 2 * v.tag) < 1e-2 and v.value == pytest.approx(3 * v.tag)


def test_proximity_examples():
    F, f = fx("x^2"), fx("2*x")
    fine = random_partition(UNIT, Gauge.constant(0.01), seed=4)
    assert proximity_check(F, f, fine, eps=0.1)
    assert not proximity_check(F, f, TaggedPartition(UNIT, [0.0], [1.0], [0.0]), eps=1e-3)
    assert proximity_check(fx("5"), fx("0"), fine, eps=1e-12)


def test_policy_sanity():
    f = fx("cos(3*x) + x^2")
    want = math.sin(3) / 3 + 1 / 3
    values = [gr_integral(f, UNIT, policy=p, tol=1e-5).value for p in TagPolicy]
    assert max(values) - min(values) <= 2e-5
    assert all(abs(v - want) <= 1e-5 for v in values)


def test_trace_shape_and_determinism():
    p = builtin_problem("sqrt")
    run = lambda: gr_integral(p.f_ex, p.ambient, p.E, tol=p.tol, schedule=GaugeSchedule.from_dict(p.gauge))
    a, b = run(), run()
    assert a.trace == b.trace and a.value == b.value
    hs = [row.h for row in a.trace]
    cells = [row.cells for row in a.trace]
    assert all(x > y for x, y in zip(hs, hs[1:]))
    assert all(x <= y for x, y in zip(cells, cells[1:]))
    assert [row.k for row in a.trace] == list(range(len(a.trace)))


@pytest.mark.parametrize("name", ["polynomial", "sin", "sqrt"])
def test_oracle_equivalence(name):
    p = builtin_problem(name)
    r = gr_integral(p.f_ex, p.ambient, p.E, tol=p.tol, schedule=GaugeSchedule.from_dict(p.gauge))
    assert r.converged
    assert abs(r.value - p.expected["delta_F"]) <= p.tol


@settings(max_examples=25)
@given(st.integers(0, 2**32), st.sampled_from(list(TagPolicy)))
def test_fine_random_partitions_agree_with_converged_value(seed, policy):
    # the sampled stand-in for "every delta-fine partition"
    f = fx("exp(x)*sin(2*x)")
    gauge = Gauge.constant(1e-3)
    P = random_partition(UNIT, gauge, policy=policy, seed=seed)
    want = (math.exp(1) * (math.sin(2) - 2 * math.cos(2)) + 2) / 5
    assert abs(riemann_sum(f, P) - want) < 5e-3


def test_cousin_partition_of_strategy_is_compatible():
    g = SingularityAdapted(0.25, 0.5, 1e-3).build(None, ZERO)
    P = cousin_partition(SYM, g, ZERO)
    at_zero = (P.lo <= 0) & (P.hi >= 0)
    assert np.all(P.tags[at_zero] == 0.0)
