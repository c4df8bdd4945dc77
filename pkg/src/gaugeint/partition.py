"""Gauges, tag policies, Cousin-style construction and validation of fine partitions."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import CellBudgetExceeded, DepthExceeded
from .exceptional import EMPTY, TAG_DEPTH, ExceptionalSet
from .kernel import Interval, TaggedPair, TaggedPartition

DEFAULT_MAX_DEPTH = 60
DEFAULT_MAX_CELLS = 20_000_000

# split position used when the midpoint of a segment lands on E
_OFF_E_SPLIT = 0.5625


class Gauge:
    """A strictly positive point function, evaluated on numpy arrays."""

    def __init__(self, fn, name="gauge"):
        self.fn = fn
        self.name = name

    @classmethod
    def constant(cls, value):
        value = float(value)
        return cls(lambda x: np.full(np.shape(x), value), f"const({value})")

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        d = np.broadcast_to(np.asarray(self.fn(xs), dtype=float), xs.shape)
        if not np.all(d > 0):
            bad = xs[~(d > 0)][0]
            raise ValueError(f"{self.name} is not strictly positive at x = {bad}")
        return float(d[0]) if scalar else d

    def __repr__(self):
        return f"Gauge({self.name})"


class TagPolicy(enum.Enum):
    HENSTOCK = "henstock"
    MCSHANE = "mcshane"
    LEFT = "left"
    RIGHT = "right"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ValueError(f"unknown tag policy {name!r}; choose from {[p.value for p in cls]}") from None

    def default_tags(self, lo, hi):
        if self is TagPolicy.LEFT:
            return lo.copy()
        if self is TagPolicy.RIGHT:
            return hi.copy()
        return 0.5 * (lo + hi)


@dataclass(frozen=True)
class Violation:
    kind: str
    index: int
    detail: str = ""


@dataclass(frozen=True)
class Restriction:
    lo: np.ndarray
    hi: np.ndarray
    tags: np.ndarray
    indices: np.ndarray

    def __len__(self):
        return int(self.lo.size)

    @property
    def pairs(self):
        return [
            TaggedPair(Interval(a, b), t)
            for a, b, t in zip(self.lo.tolist(), self.hi.tolist(), self.tags.tolist())
        ]


def _fits(lo, hi, tags, d):
    return (lo > tags - d) & (hi < tags + d)


def is_delta_fine(P: TaggedPartition, gauge: Gauge) -> bool:
    if len(P) == 0:
        return True
    return bool(np.all(_fits(P.lo, P.hi, P.tags, gauge(P.tags))))


def _split_points(lo, hi, E, frac):
    m = lo + frac * (hi - lo)
    if not E.is_empty and m.size:
        on_e = E.contains_array(m)
        if on_e.any():
            alt = lo[on_e] + _OFF_E_SPLIT * (hi[on_e] - lo[on_e])
            keep = ~E.contains_array(alt)
            m[np.flatnonzero(on_e)[keep]] = alt[keep]
    return m


def _check_caps(depth, emitted, pending, max_depth, max_cells):
    if emitted + pending > max_cells:
        raise CellBudgetExceeded(
            f"more than {max_cells} cells needed (reached {emitted} emitted, {pending} pending at depth {depth})"
        )
    if pending and depth >= max_depth:
        raise DepthExceeded(f"{pending} segments still too coarse at depth {max_depth}")


def _assemble(ambient, los, his, tags):
    lo = np.concatenate(los) if los else np.empty(0)
    hi = np.concatenate(his) if his else np.empty(0)
    tg = np.concatenate(tags) if tags else np.empty(0)
    order = np.argsort(lo, kind="stable")
    return TaggedPartition(ambient, lo[order], hi[order], tg[order])


def cousin_partition(
    ambient: Interval,
    gauge: Gauge,
    E: ExceptionalSet = EMPTY,
    policy=TagPolicy.HENSTOCK,
    max_depth: int = DEFAULT_MAX_DEPTH,
    max_cells: int = DEFAULT_MAX_CELLS,
) -> TaggedPartition:
    """Gauge-fine, E-compatible tagged partition of ``ambient`` by bisection.

    A segment is kept once some admissible tag has a gauge window covering it:
    the leftmost point of E in the segment if there is one, otherwise the
    point the tag policy designates.  Every other segment is halved.  The
    work is done level by level on arrays, so the output does not depend on
    traversal order.
    """
    policy = TagPolicy.parse(policy)
    if not ambient.length > 0:
        raise ValueError("ambient interval must have positive length")
    lo, hi = np.array([ambient.lo]), np.array([ambient.hi])
    out_lo, out_hi, out_t = [], [], []
    emitted = 0
    for depth in range(max_depth + 1):
        _check_caps(depth, emitted, lo.size, max_depth, max_cells)
        if lo.size == 0:
            break
        etag = E.pick_tag_array(lo, hi)
        meets = ~np.isnan(etag)
        tags = np.where(meets, etag, policy.default_tags(lo, hi))
        ok = _fits(lo, hi, tags, gauge(tags))
        out_lo.append(lo[ok])
        out_hi.append(hi[ok])
        out_t.append(tags[ok])
        emitted += int(ok.sum())
        lo, hi = lo[~ok], hi[~ok]
        m = _split_points(lo, hi, E, 0.5)
        if np.any((m <= lo) | (m >= hi)):
            raise DepthExceeded("segments shrank to float resolution before fitting the gauge")
        lo, hi = np.concatenate([lo, m]), np.concatenate([m, hi])
    return _assemble(ambient, out_lo, out_hi, out_t)


def random_partition(
    ambient: Interval,
    gauge: Gauge,
    E: ExceptionalSet = EMPTY,
    policy=TagPolicy.HENSTOCK,
    seed: int = 0,
    max_depth: int = DEFAULT_MAX_DEPTH,
    max_cells: int = DEFAULT_MAX_CELLS,
) -> TaggedPartition:
    """Like ``cousin_partition`` but with seeded random split points and tags.

    Segments that already fit are sometimes split further, so the output
    exercises uneven cell sizes.  The same seed always gives the same
    partition.
    """
    policy = TagPolicy.parse(policy)
    rng = np.random.default_rng(seed)
    lo, hi = np.array([ambient.lo]), np.array([ambient.hi])
    out_lo, out_hi, out_t = [], [], []
    emitted = 0
    for depth in range(max_depth + 1):
        _check_caps(depth, emitted, lo.size, max_depth, max_cells)
        if lo.size == 0:
            break
        n = lo.size
        u = rng.random(n)
        extra = rng.random(n)
        frac = rng.uniform(0.3, 0.7, n)
        width = hi - lo
        etag = E.pick_tag_array(lo, hi)
        meets = ~np.isnan(etag)
        if policy is TagPolicy.HENSTOCK:
            free = lo + u * width
        elif policy is TagPolicy.MCSHANE:
            free = np.clip(lo + (2 * u - 0.5) * width, ambient.lo, ambient.hi)
        else:
            free = policy.default_tags(lo, hi)
        tags = np.where(meets, etag, free)
        ok = _fits(lo, hi, tags, gauge(tags))
        fallback = ~ok & ~meets
        if fallback.any():
            alt = policy.default_tags(lo[fallback], hi[fallback])
            alt_ok = _fits(lo[fallback], hi[fallback], alt, gauge(alt))
            idx = np.flatnonzero(fallback)[alt_ok]
            tags[idx] = alt[alt_ok]
            ok[idx] = True
        ok &= ~((extra < 0.25) & (depth < 8))
        out_lo.append(lo[ok])
        out_hi.append(hi[ok])
        out_t.append(tags[ok])
        emitted += int(ok.sum())
        lo, hi, frac = lo[~ok], hi[~ok], frac[~ok]
        m = _split_points(lo, hi, E, frac)
        if np.any((m <= lo) | (m >= hi)):
            raise DepthExceeded("segments shrank to float resolution before fitting the gauge")
        lo, hi = np.concatenate([lo, m]), np.concatenate([m, hi])
    return _assemble(ambient, out_lo, out_hi, out_t)


def restriction(P: TaggedPartition, E: ExceptionalSet) -> Restriction:
    """Pairs whose cell meets E and whose tag lies in E."""
    if E.is_empty or len(P) == 0:
        empty = np.empty(0)
        return Restriction(empty, empty, empty, np.empty(0, dtype=int))
    mask = E.meets_array(P.lo, P.hi) & E.contains_array(P.tags, TAG_DEPTH)
    idx = np.flatnonzero(mask)
    return Restriction(P.lo[idx], P.hi[idx], P.tags[idx], idx)


def validate(
    P: TaggedPartition,
    ambient: Interval,
    gauge: Gauge | None = None,
    policy=TagPolicy.HENSTOCK,
    E: ExceptionalSet = EMPTY,
) -> list:
    """Every failed predicate, one Violation per offending pair.

    Cells meeting E must carry a tag that lies in E and inside the cell; the
    tag policy constrains the remaining cells.
    """
    policy = TagPolicy.parse(policy)
    out = []
    n = len(P)
    if n == 0:
        return [Violation("EMPTY", -1, "partition has no cells")]
    lo, hi, t = P.lo, P.hi, P.tags
    if lo[0] != ambient.lo:
        out.append(Violation("UNION_GAP", 0, f"first cell starts at {lo[0]}, not {ambient.lo}"))
    if hi[-1] != ambient.hi:
        out.append(Violation("UNION_GAP", n - 1, f"last cell ends at {hi[-1]}, not {ambient.hi}"))
    for i in np.flatnonzero(lo[1:] > hi[:-1]) + 1:
        out.append(Violation("UNION_GAP", int(i), f"gap ({hi[i - 1]}, {lo[i]})"))
    for i in np.flatnonzero(lo[1:] < hi[:-1]) + 1:
        out.append(Violation("OVERLAP", int(i), f"cell starts at {lo[i]} before previous end {hi[i - 1]}"))
    for i in np.flatnonzero((t < ambient.lo) | (t > ambient.hi)):
        out.append(Violation("TAG_RANGE", int(i), f"tag {t[i]} outside {ambient}"))
    meets = E.meets_array(lo, hi) if not E.is_empty else np.zeros(n, dtype=bool)
    in_cell = (t >= lo) & (t <= hi)
    if meets.any():
        in_e = E.contains_array(t, TAG_DEPTH)
        for i in np.flatnonzero(meets & ~in_e):
            out.append(Violation("E_TAG", int(i), f"cell meets E but tag {t[i]} is not in E"))
        for i in np.flatnonzero(meets & ~in_cell):
            out.append(Violation("POLICY", int(i), f"E-tag {t[i]} outside its cell"))
    free = ~meets
    if policy is TagPolicy.HENSTOCK:
        bad = free & ~in_cell
    elif policy is TagPolicy.LEFT:
        bad = free & (t != lo)
    elif policy is TagPolicy.RIGHT:
        bad = free & (t != hi)
    else:
        bad = np.zeros(n, dtype=bool)
    for i in np.flatnonzero(bad):
        out.append(Violation("POLICY", int(i), f"tag {t[i]} breaks the {policy.value} rule"))
    if gauge is not None:
        for i in np.flatnonzero(~_fits(lo, hi, t, gauge(t))):
            out.append(Violation("NOT_FINE", int(i), f"cell [{lo[i]}, {hi[i]}] leaves the gauge window of {t[i]}"))
    return sorted(out, key=lambda v: (v.index, v.kind))
