"""Point residues, the residue sum over E and the Cantor level sums.

A point residue is the limit of F(x + rho*h) - F(x - h) as h shrinks, probed
with several asymmetry ratios rho.  If the limit depends on rho, F is not
basically summable at x.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import SimpleNamespace

import numpy as np

from .corpus.cantor import triadic_numerators
from .exceptional import CantorSet, ExceptionalSet, FinitePoints
from .kernel import ExtendedFunction, Interval, interval_sum

SUMMABLE = "SUMMABLE"
NOT_BS = "NOT_BASICALLY_SUMMABLE"
BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"

DEFAULT_RATIOS = (1.0, 0.5, 0.125)
MAX_CANTOR_LEVEL = 30
_BLOCK_LEVEL = 20  # level sums beyond this are evaluated in blocks of 2**20 cells


@dataclass(frozen=True)
class Probe:
    scale: float
    ratio: float
    value: float


@dataclass
class ResidueResult:
    value: float
    status: str
    probes: list = field(default_factory=list)
    message: str = ""

    @property
    def summable(self):
        return self.status == SUMMABLE


def _eval(F, xs):
    return np.asarray(F(np.asarray(xs, dtype=float)), dtype=float)


def point_residue(
    F: ExtendedFunction,
    x: float,
    tol: float,
    h0: float = 1e-2,
    ratios=DEFAULT_RATIOS,
    k_max: int = 40,
) -> ResidueResult:
    """Jump limit of F at x over cells [x - h, x + rho*h], h = h0 / 2**k.

    SUMMABLE once the ratios agree within tol and the common value moved by
    less than tol on two consecutive scales.  NOT_BASICALLY_SUMMABLE when the
    ratios still disagree by more than 10*tol at the finest two scales reached
    and the disagreement has stopped shrinking.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    rho = np.asarray(ratios, dtype=float)
    probes = []
    spreads, centers = [], []
    stable = 0
    for k in range(k_max + 1):
        h = math.ldexp(h0, -k)
        lo = x - h
        hi = x + rho * h
        if not (lo < x and np.all(hi > x)):
            break
        vals = _eval(F, hi) - _eval(F, np.full(rho.shape, lo))
        probes.extend(Probe(h, float(r), float(v)) for r, v in zip(rho, vals))
        if not np.all(np.isfinite(vals)):
            return ResidueResult(math.nan, NOT_BS, probes, f"non-finite increment at scale {h:g}")
        spread = float(vals.max() - vals.min())
        center = float(vals[0])
        if centers:
            moved = abs(center - centers[-1])
            stable = stable + 1 if (spread <= tol and moved <= tol) else 0
            if stable >= 2:
                return ResidueResult(center, SUMMABLE, probes)
        spreads.append(spread)
        centers.append(center)
    if len(spreads) >= 4 and min(spreads[-2:]) > 10 * tol and spreads[-1] >= 0.9 * spreads[-4]:
        return ResidueResult(
            centers[-1], NOT_BS, probes, f"increment depends on cell shape (spread {spreads[-1]:.3g})"
        )
    value = centers[-1] if centers else math.nan
    return ResidueResult(value, BUDGET_EXHAUSTED, probes, "scale ladder ended without a stable limit")


def _cantor_sum(F, E: CantorSet, tol: float, n_max: int) -> ResidueResult:
    n_len = E.ambient.length
    A, B = E.ambient.lo, E.ambient.hi
    probes, prev, stable = [], None, 0
    for n in range(1, n_max + 1):
        cov = E.cover(n)
        eta = n_len * 3.0 ** -(n + 4)
        lo = np.maximum(cov.lo - eta, A)
        hi = np.minimum(cov.hi + eta, B)
        s = interval_sum(F, SimpleNamespace(lo=lo, hi=hi))
        probes.append(Probe(3.0**-n * n_len, 1.0, s))
        if prev is not None:
            stable = stable + 1 if abs(s - prev) < tol else 0
            if stable >= 2:
                return ResidueResult(s, SUMMABLE, probes)
        prev = s
    return ResidueResult(prev, BUDGET_EXHAUSTED, probes, f"level sums not stable by n = {n_max}")


def basic_sum(
    F: ExtendedFunction,
    E: ExceptionalSet,
    tol: float,
    h0: float | None = None,
    ratios=DEFAULT_RATIOS,
    ambient: Interval | None = None,
    n_max: int = MAX_CANTOR_LEVEL,
) -> ResidueResult:
    """Residue sum of F over E.

    Finite sets add up their point residues.  For the Cantor set the level-n
    cover cells are widened by 3**-(n+4) of the ambient length so that their
    endpoints leave E, then F's increments over them are summed.
    """
    if E.is_empty:
        return ResidueResult(0.0, SUMMABLE, [], "empty exceptional set")
    if isinstance(E, CantorSet):
        return _cantor_sum(F, E, tol, min(n_max, MAX_CANTOR_LEVEL))
    if isinstance(E, FinitePoints):
        amb = ambient or E.ambient
        if h0 is None:
            h0 = 1e-2 * amb.length if amb is not None else 1e-2
        parts = [point_residue(F, p, tol / len(E.points), h0, ratios) for p in E.points]
        probes = [pr for r in parts for pr in r.probes]
        value = math.fsum(r.value for r in parts)
        for status in (NOT_BS, BUDGET_EXHAUSTED):
            bad = [p for p, r in zip(E.points, parts) if r.status == status]
            if bad:
                return ResidueResult(value, status, probes, f"{status} at x = {bad[0]}")
        return ResidueResult(value, SUMMABLE, probes)
    raise TypeError(f"unsupported exceptional set {E!r}")


def residue_function_profile(
    F: ExtendedFunction,
    E: ExceptionalSet,
    grid_count: int,
    tol: float,
    ambient: Interval | None = None,
) -> list:
    """(x, residue estimate) on a uniform interior grid of non-E points plus E's points."""
    if grid_count < 1:
        raise ValueError("grid_count must be at least 1")
    amb = ambient or getattr(E, "ambient", None) or Interval(0.0, 1.0)
    xs = amb.lo + amb.length * (np.arange(1, grid_count + 1) - 0.5) / grid_count
    if not E.is_empty:
        xs = xs[~E.contains_array(xs)]
        if isinstance(E, FinitePoints):
            xs = np.union1d(xs, np.asarray(E.points))
    h0 = 0.5 * amb.length / (grid_count + 1)
    return [(float(x), point_residue(F, float(x), tol, h0).value) for x in xs]


def cantor_level_sums(n_max: int) -> list:
    """S_n, the sum over the 2**n level-n Cantor cells of the Cantor function's increments.

    Cell endpoints are exact triadic rationals, so the increments are dyadic
    and are summed as integers over the common denominator 2**n.
    """
    if not 1 <= n_max <= MAX_CANTOR_LEVEL:
        raise ValueError(f"n_max must lie in 1..{MAX_CANTOR_LEVEL}")
    out = []
    for n in range(1, n_max + 1):
        m = max(0, n - _BLOCK_LEVEL)
        suffix = _left_ends(n - m)
        total = 0
        for prefix in _left_ends(m):
            p = prefix * 3 ** (n - m) + suffix
            total += int(np.sum(triadic_numerators(p + 1, n) - triadic_numerators(p, n)))
        out.append(math.ldexp(total, -n))
    return out


def _left_ends(n):
    """Integer numerators p of the level-n Cantor cells [p / 3**n, (p + 1) / 3**n]."""
    p = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        p = np.stack([3 * p, 3 * p + 2], axis=1).ravel()
    return p
