import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaugeint.corpus.cantor import cantor_array
from gaugeint.corpus.expr import ExprFunction
from gaugeint.exceptional import EMPTY, CantorSet, FinitePoints
from gaugeint.kernel import Interval, extend
from gaugeint.residue import (
    BUDGET_EXHAUSTED,
    NOT_BS,
    SUMMABLE,
    basic_sum,
    cantor_level_sums,
    point_residue,
    residue_function_profile,
)

UNIT = Interval(0.0, 1.0)
SYM = Interval(-1.0, 1.0)
ZERO = FinitePoints((0.0,), SYM)
STEP = "piecewise(x < 0: 0, 1)"


def Fx(src, E):
    return extend(ExprFunction(src), E)


def test_point_residue_examples():
    r = point_residue(Fx(STEP, ZERO), 0.0, 1e-9)
    assert r.status == SUMMABLE and r.value == 1.0
    r = point_residue(Fx("x^2", ZERO), 0.0, 1e-9)
    assert r.status == SUMMABLE and abs(r.value) <= 1e-9
    r = point_residue(Fx("ln(abs(x))", ZERO), 0.0, 1e-6)
    assert r.status == NOT_BS


def test_probes_cover_all_ratios():
    r = point_residue(Fx(STEP, ZERO), 0.0, 1e-9)
    assert {p.ratio for p in r.probes} == {1.0, 0.5, 0.125}


def test_slow_limit_is_budget_not_verdict():
    r = point_residue(Fx("sqrt(abs(x))", ZERO), 0.0, 1e-12, k_max=10)
    assert r.status == BUDGET_EXHAUSTED


def test_basic_sum_examples():
    cantor = CantorSet(UNIT)
    r = basic_sum(extend(cantor_array, cantor), cantor, 1e-9)
    assert r.status == SUMMABLE and abs(r.value - 1) <= 1e-9
    r = basic_sum(Fx(STEP, ZERO), ZERO, 1e-9)
    assert r.status == SUMMABLE and r.value == 1.0
    r = basic_sum(Fx("sqrt(x)", ZERO), ZERO, 1e-4)
    assert r.status == SUMMABLE and abs(r.value) <= 1e-4
    assert basic_sum(Fx("x", EMPTY), EMPTY, 1e-9).value == 0.0


@given(st.lists(st.integers(-9, 9).filter(bool), min_size=1, max_size=4, unique=True),
       st.lists(st.floats(-3, 3), min_size=4, max_size=4))
def test_additivity_over_jumps(positions, heights):
    pts = tuple(sorted(p / 10 for p in positions))
    E = FinitePoints(pts, SYM)
    jumps = [round(h, 3) for h in heights[: len(pts)]]
    pieces = [f"{j}*piecewise(x < {p}: 0, 1)" for p, j in zip(pts, jumps)]
    F = Fx(" + ".join(pieces), E)
    r = basic_sum(F, E, 1e-9)
    assert r.status == SUMMABLE
    assert abs(r.value - math.fsum(jumps)) <= 1e-9
    singles = [point_residue(F, p, 1e-9).value for p in pts]
    assert abs(r.value - math.fsum(singles)) <= 1e-12


@pytest.mark.parametrize("ratios", [(1.0, 0.5, 0.125), (1.0, 1 / 3, 1 / 16), (1.0, 0.75)])
def test_ratio_robustness(ratios):
    assert basic_sum(Fx(STEP, ZERO), ZERO, 1e-9, ratios=ratios).value == 1.0
    assert basic_sum(Fx("ln(abs(x))", ZERO), ZERO, 1e-6, ratios=ratios).status == NOT_BS


def test_profiles():
    cantor = CantorSet(UNIT)
    prof = residue_function_profile(extend(cantor_array, cantor), cantor, 100, 1e-6, UNIT)
    assert len(prof) > 0 and all(abs(r) <= 1e-6 for _, r in prof)
    prof = dict(residue_function_profile(Fx(STEP, ZERO), ZERO, 20, 1e-9, SYM))
    assert prof.pop(0.0) == 1.0
    assert all(r == 0.0 for r in prof.values())
    prof = residue_function_profile(Fx("x^2", EMPTY), EMPTY, 10, 1e-9, UNIT)
    assert all(abs(r) <= 1e-9 for _, r in prof)


def test_level_sums():
    s = cantor_level_sums(20)
    assert s[:2] == [1.0, 1.0]
    assert all(abs(v - 1) <= 1e-12 for v in s)
    with pytest.raises(ValueError):
        cantor_level_sums(31)


def test_level_sum_matches_float_oracle():
    # independent route: evaluate the Cantor function on the cover cells in floating point
    E = CantorSet(UNIT)
    for n in (3, 7, 12):
        cov = E.cover(n)
        s = math.fsum(cantor_array(cov.hi) - cantor_array(cov.lo))
        assert abs(s - 1) <= 1e-12
        assert abs(cov.total_length - (2 / 3) ** n) <= 1e-12
