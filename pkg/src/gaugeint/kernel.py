"""Intervals, tagged partitions, zero-extended functions and the two basic sums.

Evaluators throughout the package are numpy-vectorized callables: they take a
float array and return a float array of the same shape, with ``nan`` (or an
infinity) standing for an undefined value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import ZeroLengthError

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError(f"interval endpoints must be finite, got [{lo}, {hi}]")
        if lo > hi:
            raise ValueError(f"interval lower end exceeds upper end: [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __iter__(self):
        yield self.lo
        yield self.hi


def length(I: Interval) -> float:
    return I.hi - I.lo


@dataclass(frozen=True)
class TaggedPair:
    cell: Interval
    tag: float


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class TaggedPartition:
    """Finite tagged partition of ``ambient``, stored as three parallel arrays.

    Cells are sorted by their left end on construction.  Zero-length cells are
    rejected here; gaps, overlaps and tag placement are left to ``validate`` so
    that invalid partitions can still be inspected.
    """

    __slots__ = ("ambient", "lo", "hi", "tags")

    def __init__(self, ambient: Interval, lo, hi, tags):
        lo = np.asarray(lo, dtype=float).ravel()
        hi = np.asarray(hi, dtype=float).ravel()
        tags = np.asarray(tags, dtype=float).ravel()
        if not (lo.shape == hi.shape == tags.shape):
            raise ValueError("lo, hi and tags must have equal lengths")
        bad = np.flatnonzero(~(hi > lo))
        if bad.size:
            i = int(bad[0])
            raise ZeroLengthError(f"cell {i} [{lo[i]}, {hi[i]}] has no positive length")
        if lo.size > 1 and np.any(np.diff(lo) < 0):
            order = np.argsort(lo, kind="stable")
            lo, hi, tags = lo[order], hi[order], tags[order]
        self.ambient = ambient
        self.lo = _frozen(lo)
        self.hi = _frozen(hi)
        self.tags = _frozen(tags)

    @classmethod
    def from_pairs(cls, ambient: Interval, pairs: Iterable):
        pairs = [p if isinstance(p, TaggedPair) else TaggedPair(Interval(*p[0]), p[1]) for p in pairs]
        return cls(
            ambient,
            [p.cell.lo for p in pairs],
            [p.cell.hi for p in pairs],
            [p.tag for p in pairs],
        )

    def __len__(self):
        return self.lo.size

    @property
    def lengths(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def pairs(self) -> list:
        return [
            TaggedPair(Interval(a, b), t)
            for a, b, t in zip(self.lo.tolist(), self.hi.tolist(), self.tags.tolist())
        ]

    def __eq__(self, other):
        if not isinstance(other, TaggedPartition):
            return NotImplemented
        return (
            self.ambient == other.ambient
            and np.array_equal(self.lo, other.lo)
            and np.array_equal(self.hi, other.hi)
            and np.array_equal(self.tags, other.tags)
        )

    def __repr__(self):
        return f"TaggedPartition({self.ambient.lo}..{self.ambient.hi}, {len(self)} cells)"


class ExtendedFunction:
    """A point function set to 0 on its singular set and wherever it is undefined."""

    def __init__(self, base: Evaluator, singular_set=None):
        self.base = base
        self.singular_set = singular_set

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        with np.errstate(all="ignore"):
            v = np.asarray(self.base(xs), dtype=float)
        v = np.broadcast_to(v, xs.shape).copy()
        bad = ~np.isfinite(v)
        if self.singular_set is not None:
            bad |= self.singular_set.contains_array(xs)
        v[bad] = 0.0
        return float(v[0]) if scalar else v

    value = __call__


def extend(base: Evaluator, E=None) -> ExtendedFunction:
    """Zero-extend ``base`` onto ``E`` and onto the points where it is undefined."""
    if isinstance(base, ExtendedFunction) and base.singular_set is E:
        return base
    return ExtendedFunction(base, E)


def delta_F(F: ExtendedFunction, I: Interval) -> float:
    hi, lo = F(np.array([I.hi, I.lo]))
    return float(hi - lo)


def difference_quotient(F: ExtendedFunction, I: Interval) -> float:
    n = I.hi - I.lo
    if n <= 0:
        raise ZeroLengthError(f"difference quotient over degenerate interval [{I.lo}, {I.hi}]")
    return delta_F(F, I) / n


def _bounds(pairs):
    if hasattr(pairs, "lo") and hasattr(pairs, "hi") and not isinstance(pairs, Interval):
        return np.asarray(pairs.lo, dtype=float), np.asarray(pairs.hi, dtype=float)
    cells = [p.cell if isinstance(p, TaggedPair) else p for p in pairs]
    lo = np.array([c.lo if isinstance(c, Interval) else c[0] for c in cells], dtype=float)
    hi = np.array([c.hi if isinstance(c, Interval) else c[1] for c in cells], dtype=float)
    return lo, hi


def riemann_sum(f: ExtendedFunction, P) -> float:
    """Sum of f(tag) * |cell| over the pairs of a partition or restriction."""
    if len(P) == 0:
        return 0.0
    return math.fsum(f(P.tags) * (P.hi - P.lo))


def interval_sum(F: ExtendedFunction, pairs) -> float:
    """Sum of F(hi) - F(lo) over the cells of ``pairs``.

    Accepts a partition, a restriction, a cover, or a plain list of pairs or
    intervals.
    """
    lo, hi = _bounds(pairs)
    if lo.size == 0:
        return 0.0
    return math.fsum(F(hi) - F(lo))
