import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaugeint.corpus.cantor import cantor_array, cantor_function, cantor_triadic, triadic_numerators
from gaugeint.errors import DomainError


def oracle(q: Fraction, depth: int = 80) -> Fraction:
    """Self-similar definition evaluated on exact rationals."""
    out, weight = Fraction(0), Fraction(1)
    for _ in range(depth):
        if q <= Fraction(1, 3):
            q, weight = 3 * q, weight / 2
        elif q >= Fraction(2, 3):
            out += weight / 2
            q, weight = 3 * q - 2, weight / 2
        else:
            return out + weight / 2
        if q == 0:
            return out
        if q == 1:
            return out + weight
    return out


@pytest.mark.parametrize("x,want", [(0.0, 0.0), (1.0, 1.0), (1 / 3, 0.5), (0.25, 1 / 3), (2 / 3, 0.5), (0.5, 0.5)])
def test_examples(x, want):
    assert cantor_function(x) == want
    assert cantor_array(np.array([x]))[0] == want


def test_domain():
    with pytest.raises(DomainError):
        cantor_function(-0.1)
    with pytest.raises(DomainError):
        cantor_function(1.5)
    assert np.isnan(cantor_array(np.array([-0.1, 1.5]))).all()


@given(st.floats(0, 1))
def test_matches_rational_oracle(x):
    want = float(oracle(Fraction(x)))
    assert abs(cantor_function(x) - want) <= 2 * math.ulp(want or 1.0) + 1e-15


@given(st.integers(0, 3**10))
def test_triadic_grid_is_exact(p):
    want = oracle(Fraction(p, 3**10))
    assert cantor_triadic(np.array([p]), 10)[0] == float(want)
    assert cantor_function(p / 3**10) == float(want)


def test_triadic_numerators_are_integers():
    m = triadic_numerators(np.arange(28), 3)
    assert m.dtype == np.int64 and m[0] == 0 and m[-1] == 8


def test_monotone_on_random_pairs():
    rng = np.random.default_rng(5)
    x, y = rng.random(100_000), rng.random(100_000)
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    assert np.all(cantor_array(lo) <= cantor_array(hi))


@given(st.floats(0, 1), st.floats(0, 1))
def test_monotone_scalar(x, y):
    lo, hi = min(x, y), max(x, y)
    assert cantor_function(lo) <= cantor_function(hi)


@given(st.floats(0, 1))
def test_self_similarity(x):
    right = cantor_function(x) / 2
    assert abs(cantor_function(x / 3) - right) <= 2 * math.ulp(right or 1.0)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=50))
def test_array_agrees_with_scalar(xs):
    a = cantor_array(np.array(xs))
    s = np.array([cantor_function(v) for v in xs])
    assert np.allclose(a, s, rtol=0, atol=1e-9)
