from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaugeint.errors import CoverOverlapError
from gaugeint.exceptional import EMPTY, CantorSet, FinitePoints, contains, cover, pick_tag
from gaugeint.kernel import Interval


def cantor_member(q: Fraction, depth: int) -> bool:
    """Exact ternary oracle: q in [0, 1] avoids digit 1 (allowing the 0.0222.. form) for depth digits."""
    for _ in range(depth):
        if q in (0, 1):
            return True
        q *= 3
        if q < 1:
            continue
        if q > 2:
            q -= 2
            continue
        return q in (1, 2)
    return True


def test_contains_examples():
    assert contains(FinitePoints((0.0,)), 0.0)
    C = CantorSet()
    assert contains(C, 1 / 3, 30)
    assert not contains(C, 0.5, 30)
    with pytest.raises(ValueError):
        contains(C, 0.5, 0)


@given(st.integers(1, 3**12 - 1))
def test_cantor_membership_on_triadic_grid(p):
    x = p / 3**12
    assert contains(CantorSet(), x, 40) == cantor_member(Fraction(p, 3**12), 40)


def test_ambient_endpoints_are_not_members():
    C = CantorSet(Interval(2.0, 5.0))
    assert not contains(C, 2.0) and not contains(C, 5.0)
    assert contains(C, 3.0) and contains(C, 4.0)
    assert not contains(C, 3.5)


def test_cover_examples():
    c1 = cover(CantorSet(), 1)
    assert [(c.lo, c.hi) for c in c1.cells] == [(0.0, 1 / 3), (2 / 3, 1.0)]
    c2 = cover(CantorSet(), 2)
    assert len(c2) == 4
    assert np.allclose(c2.hi - c2.lo, 1 / 9, rtol=0, atol=1e-16)
    c3 = cover(FinitePoints((0.0,), Interval(-1, 1)), 3, 0.8)
    assert [(c.lo, c.hi) for c in c3.cells] == [(-0.1, 0.1)]


def test_cover_errors():
    with pytest.raises(CoverOverlapError):
        cover(FinitePoints((0.0, 0.1)), 0, 1.0)
    with pytest.raises(CoverOverlapError):
        cover(FinitePoints((0.9,), Interval(0, 1)), 0, 0.5)
    assert len(cover(EMPTY, 3)) == 0


@given(st.integers(0, 12))
def test_cantor_cover_refines_and_shrinks(n):
    C = CantorSet(Interval(-1.0, 2.0))
    a, b = cover(C, n), cover(C, n + 1)
    assert len(b) == 2 * len(a)
    parent = np.searchsorted(a.lo, b.lo, side="right") - 1
    assert np.all(a.lo[parent] <= b.lo) and np.all(b.hi <= a.hi[parent])
    assert b.total_length == pytest.approx((2 / 3) ** (n + 1) * 3, rel=1e-12)


@given(st.integers(1, 12))
def test_cantor_cover_interior_endpoints_are_members(n):
    C = CantorSet()
    cv = cover(C, n)
    ends = np.concatenate([cv.lo[1:], cv.hi[:-1]])
    assert C.contains_array(ends, n).all()


@given(st.integers(0, 10), st.floats(0.01, 0.49))
def test_finite_cover_radius(n, r):
    cv = cover(FinitePoints((-0.5, 0.5), Interval(-1, 1)), n, r)
    assert np.allclose(cv.hi - cv.lo, 2 * r * 2.0**-n)
    assert np.all((cv.lo <= [-0.5, 0.5]) & ([-0.5, 0.5] <= cv.hi))


def test_pick_tag_examples():
    E = FinitePoints((0.0,))
    assert pick_tag(E, Interval(-0.5, 0.5)) == 0
    assert pick_tag(CantorSet(), Interval(0.6, 0.7)) == pytest.approx(2 / 3, abs=1e-16)
    assert pick_tag(E, Interval(0.2, 0.4)) is None
    assert pick_tag(EMPTY, Interval(0, 1)) is None


@given(st.floats(0, 1), st.floats(1e-9, 0.5))
def test_cantor_pick_tag_is_member_and_inside(a, w):
    I = Interval(a, min(1.0, a + w))
    t = pick_tag(CantorSet(), I)
    if t is not None:
        assert I.lo <= t <= I.hi
        assert contains(CantorSet(), t, 40)


@given(st.floats(0, 1))
def test_cantor_dist_matches_gaps(x):
    C = CantorSet()
    d = float(C.dist_array(np.array([x]))[0])
    assert d >= 0
    if d > 0:
        assert pick_tag(C, Interval(max(0, x - 0.999 * d), min(1, x + 0.999 * d))) is None


def test_finite_points_validation():
    with pytest.raises(ValueError):
        FinitePoints((0.5, 0.2))
    with pytest.raises(ValueError):
        FinitePoints((0.0,), Interval(0, 1))
    with pytest.raises(ValueError):
        FinitePoints(())
