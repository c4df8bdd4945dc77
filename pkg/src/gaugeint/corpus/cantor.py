"""The Cantor function (devil's staircase) on [0, 1].

Three evaluators share the ternary-digit rule (copy 2s as binary 1s up to the
first ternary 1, which contributes a final binary 1):

* ``cantor_function``: scalar, exact rational arithmetic on the float's value.
* ``cantor_array``: vectorized float recursion, used inside sums.
* ``cantor_triadic``: exact on integer grids p / 3**n.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..errors import DomainError

SNAP_DEPTH = 20
DIGIT_DEPTH = 64
_EPS = 2.0**-52


def _digits_value(digits):
    """Binary value of a finite ternary digit string, as (numerator, bits)."""
    num, bits = 0, 0
    for d in digits:
        bits += 1
        num <<= 1
        if d == 2:
            num |= 1
        elif d == 1:
            num |= 1
            break
    return num, bits


def _snap(x: float):
    """Smallest-denominator triadic p / 3**k (k <= SNAP_DEPTH) within 2 ulp of x."""
    n, d = x.as_integer_ratio()
    tn, td = (2 * math.ulp(x)).as_integer_ratio()
    scale = 1
    for k in range(SNAP_DEPTH + 1):
        num = n * scale
        p = (2 * num + d) // (2 * d)
        if abs(num - p * d) * td <= tn * scale * d:
            return p, k
        scale *= 3
    return None


def _ternary(p: int, k: int):
    digits = []
    for _ in range(k):
        p, d = divmod(p, 3)
        digits.append(d)
    return digits[::-1]


def cantor_function(x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"Cantor function is defined on [0, 1], got {x}")
    if x == 1.0:
        return 1.0
    snapped = _snap(x)
    if snapped is not None:
        p, k = snapped
        if p == 3**k:
            return 1.0
        num, bits = _digits_value(_ternary(p, k))
        return math.ldexp(num, -bits)
    n, d = x.as_integer_ratio()
    digits = []
    for _ in range(DIGIT_DEPTH):
        n *= 3
        q, n = divmod(n, d)
        digits.append(q)
        if q == 1 or n == 0:
            break
    num, bits = _digits_value(digits)
    return float(Fraction(num, 1 << bits))


def cantor_array(xs) -> np.ndarray:
    """Vectorized Cantor function; nan outside [0, 1].

    Triadic endpoints up to level 20 and points in the removed gaps come out
    exact.  Elsewhere float error in the ternary recursion limits accuracy to
    roughly 1e-10, which is the conditioning of the function itself.
    """
    x = np.asarray(xs, dtype=float)
    y = np.atleast_1d(x).ravel().copy()
    out = np.zeros(y.shape)
    out[~((y >= 0) & (y <= 1))] = np.nan
    active = (y >= 0) & (y <= 1)
    tol = 2 * _EPS * np.maximum(np.abs(y), _EPS)
    weight = 0.5
    for level in range(DIGIT_DEPTH):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        z = y[idx]
        t = tol[idx] if level < SNAP_DEPTH else np.zeros(idx.size)
        at0 = z <= t
        at1 = z >= 1 - t
        at13 = np.abs(z - 1 / 3) <= t
        at23 = np.abs(z - 2 / 3) <= t
        snapped = at0 | at1 | at13 | at23
        mid = ~snapped & (z > 1 / 3) & (z < 2 / 3)
        inc = np.where(at1, 2 * weight, np.where(at13 | at23 | mid, weight, 0.0))
        out[idx] += inc
        stop = snapped | mid
        active[idx[stop]] = False
        rest = ~stop
        hi_third = rest & (z > 2 / 3)
        out[idx[hi_third]] += weight
        z = np.where(z > 2 / 3, 3 * z - 2, 3 * z)
        y[idx[rest]] = z[rest]
        tol[idx] = tol[idx] * 3
        weight /= 2
    return out.reshape(np.shape(x))


_CHUNK = 5


def _chunk_tables(width):
    """Binary bits and 'saw a 1' flag for every block of ``width`` ternary digits."""
    bits = np.zeros(3**width, dtype=np.int64)
    stop = np.zeros(3**width, dtype=bool)
    for c in range(3**width):
        num, _ = _digits_value(_ternary(c, width))
        digits = _ternary(c, width)
        hit = 1 in digits
        if hit:
            num <<= width - (digits.index(1) + 1)
        bits[c], stop[c] = num, hit
    return bits, stop


_TABLES = {w: _chunk_tables(w) for w in range(1, _CHUNK + 1)}


def triadic_numerators(p, n: int) -> np.ndarray:
    """Integers m with C(p / 3**n) = m / 2**n, for integer arrays 0 <= p <= 3**n, n <= 39.

    Ternary digits are consumed five at a time through lookup tables.
    """
    if not 0 <= n <= 39:
        raise ValueError("triadic level must lie in 0..39")
    p = np.asarray(p, dtype=np.int64)
    num = np.zeros(p.shape, dtype=np.int64)
    live = np.ones(p.shape, dtype=bool)
    rest = p.copy()
    left = n
    while left > 0:
        w = left % _CHUNK or _CHUNK
        left -= w
        c, rest = np.divmod(rest, 3**left)
        c = np.minimum(c, 3**w - 1)
        bits, stop = _TABLES[w]
        num <<= w
        num |= np.where(live, bits[c], 0)
        live &= ~stop[c]
    return np.where(p == 3**n, np.int64(1) << n, num)


def cantor_triadic(p, n: int) -> np.ndarray:
    """Exact C(p / 3**n) for integer arrays 0 <= p <= 3**n, n <= 39."""
    return np.ldexp(triadic_numerators(p, n).astype(float), -n)
