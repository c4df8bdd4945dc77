"""Measure-zero exceptional sets: empty, finite point sets, middle-thirds Cantor set.

Every set answers the same vectorized queries (membership, distance, leftmost
member inside a cell) plus the scalar wrappers ``contains``, ``cover`` and
``pick_tag``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CoverOverlapError
from .kernel import Interval

EPS = 2.0**-52
MAX_MEMBER_DEPTH = 60
TAG_DEPTH = 40
DIST_DEPTH = 30


class Cover:
    """Closed cells of a level-n cover, held as read-only endpoint arrays."""

    def __init__(self, depth: int, lo=(), hi=()):
        self.depth = depth
        self.lo = np.array(lo, dtype=float)
        self.hi = np.array(hi, dtype=float)
        self.lo.setflags(write=False)
        self.hi.setflags(write=False)

    @property
    def cells(self):
        return tuple(Interval(a, b) for a, b in zip(self.lo.tolist(), self.hi.tolist()))

    @property
    def total_length(self):
        return math.fsum((self.hi - self.lo).tolist())

    def __len__(self):
        return int(self.lo.size)

    def __repr__(self):
        return f"Cover(depth={self.depth}, cells={len(self)})"


class ExceptionalSet:
    kind = "abstract"

    @property
    def is_empty(self) -> bool:
        return False

    def contains_array(self, xs, depth=TAG_DEPTH) -> np.ndarray:
        raise NotImplementedError

    def dist_array(self, xs) -> np.ndarray:
        raise NotImplementedError

    def pick_tag_array(self, lo, hi) -> np.ndarray:
        """Leftmost member of E in each cell [lo, hi], nan where there is none."""
        raise NotImplementedError

    def cover(self, n: int, base_radius: float = 1.0) -> Cover:
        raise NotImplementedError

    def meets_array(self, lo, hi) -> np.ndarray:
        return ~np.isnan(self.pick_tag_array(lo, hi))

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=True)
class EmptySet(ExceptionalSet):
    kind = "empty"

    @property
    def is_empty(self):
        return True

    def contains_array(self, xs, depth=TAG_DEPTH):
        return np.zeros(np.shape(xs), dtype=bool)

    def dist_array(self, xs):
        return np.full(np.shape(xs), np.inf)

    def pick_tag_array(self, lo, hi):
        return np.full(np.shape(lo), np.nan)

    def cover(self, n, base_radius=1.0):
        return Cover(n, ())

    def to_json(self):
        return {"type": "empty"}


EMPTY = EmptySet()


@dataclass(frozen=True, eq=True)
class FinitePoints(ExceptionalSet):
    points: tuple
    ambient: Interval | None = None
    _arr: np.ndarray = field(init=False, repr=False, compare=False)

    kind = "points"

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        if not pts:
            raise ValueError("FinitePoints needs at least one point; use EMPTY instead")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("points must be strictly increasing")
        if self.ambient is not None and not all(self.ambient.lo < p < self.ambient.hi for p in pts):
            raise ValueError("points must lie strictly inside the ambient interval")
        object.__setattr__(self, "points", pts)
        arr = np.array(pts)
        arr.setflags(write=False)
        object.__setattr__(self, "_arr", arr)

    def contains_array(self, xs, depth=TAG_DEPTH):
        return np.isin(np.asarray(xs, dtype=float), self._arr)

    def dist_array(self, xs):
        xs = np.asarray(xs, dtype=float)
        p = self._arr
        i = np.searchsorted(p, xs)
        right = np.abs(p[np.minimum(i, p.size - 1)] - xs)
        left = np.abs(xs - p[np.maximum(i - 1, 0)])
        return np.minimum(left, right)

    def pick_tag_array(self, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        p = self._arr
        i = np.searchsorted(p, lo, side="left")
        cand = p[np.minimum(i, p.size - 1)]
        ok = (i < p.size) & (cand <= hi)
        return np.where(ok, cand, np.nan)

    def cover(self, n, base_radius=1.0):
        if n < 0 or not base_radius > 0:
            raise ValueError("cover needs n >= 0 and a positive base radius")
        r = math.ldexp(base_radius, -n)
        pts = self.points
        for a, b in zip(pts, pts[1:]):
            if b - a <= 2 * r:
                raise CoverOverlapError(f"cells around {a} and {b} overlap at radius {r}")
        if self.ambient is not None and (pts[0] - r < self.ambient.lo or pts[-1] + r > self.ambient.hi):
            raise CoverOverlapError(f"radius {r} pushes a cell outside {self.ambient}")
        return Cover(n, self._arr - r, self._arr + r)

    def to_json(self):
        return {"type": "points", "points": list(self.points)}


def _snap_tol(scale):
    return 2 * EPS * (scale + 1.0)


@dataclass(frozen=True, eq=True)
class CantorSet(ExceptionalSet):
    """Middle-thirds Cantor set mapped affinely onto ``ambient``.

    The two ambient endpoints are treated as outside the set, so that the
    problem interval's endpoints never belong to E.  Membership and tag
    searches snap to triadic endpoints within a tolerance of a couple of ulps
    that grows by a factor 3 per ternary level.
    """

    ambient: Interval = Interval(0.0, 1.0)

    kind = "cantor"

    def __post_init__(self):
        if not self.ambient.length > 0:
            raise ValueError("Cantor ambient interval needs positive length")

    def _normalize(self, xs):
        a, n = self.ambient.lo, self.ambient.length
        scale = max(abs(self.ambient.lo), abs(self.ambient.hi)) / n
        return (np.asarray(xs, dtype=float) - a) / n, _snap_tol(scale)

    def contains_array(self, xs, depth=TAG_DEPTH):
        depth = min(int(depth), MAX_MEMBER_DEPTH)
        y, tol = self._normalize(xs)
        y = np.atleast_1d(y).astype(float)
        shape = np.shape(xs)
        y = y.ravel().copy()
        out = np.zeros(y.shape, dtype=bool)
        active = (y > 0) & (y < 1)
        for _ in range(depth):
            if not active.any():
                break
            idx = np.flatnonzero(active)
            z = y[idx]
            near = np.minimum.reduce([z, np.abs(z - 1 / 3), np.abs(z - 2 / 3), 1 - z]) <= tol
            left = ~near & (z < 1 / 3)
            right = ~near & (z > 2 / 3)
            out[idx[near]] = True
            active[idx[near | ~(left | right)]] = False
            y[idx[left]] = 3 * z[left]
            y[idx[right]] = 3 * z[right] - 2
            tol *= 3
        out[active] = True
        return out.reshape(shape)

    def dist_array(self, xs):
        y, _ = self._normalize(xs)
        y = np.atleast_1d(y).astype(float).ravel()
        n = self.ambient.length
        out = np.zeros(y.shape)
        out[y < 0] = -y[y < 0] * n
        out[y > 1] = (y[y > 1] - 1) * n
        active = (y >= 0) & (y <= 1)
        z = y.copy()
        s = n
        for _ in range(DIST_DEPTH):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            w = z[idx]
            mid = (w > 1 / 3) & (w < 2 / 3)
            out[idx[mid]] = s * np.minimum(w[mid] - 1 / 3, 2 / 3 - w[mid])
            active[idx[mid]] = False
            lft = w <= 1 / 3
            z[idx[lft]] = 3 * w[lft]
            z[idx[~lft & ~mid]] = 3 * w[~lft & ~mid] - 2
            s /= 3
        return out.reshape(np.shape(xs))

    def pick_tag_array(self, lo, hi):
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        A, B, n = self.ambient.lo, self.ambient.hi, self.ambient.length
        y, tol = self._normalize(lo)
        ans = np.full(y.shape, np.nan)
        ans[y <= 0] = 0.0
        active = (y > 0) & (y <= 1)
        base = np.zeros(y.shape)
        s = 1.0
        for _ in range(TAG_DEPTH):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            L = base[idx]
            z = (y[idx] - L) / s
            res = np.full(idx.shape, np.nan)
            res = np.where(z <= tol, L, res)
            res = np.where(np.isnan(res) & (np.abs(z - 1 / 3) <= tol), L + s / 3, res)
            res = np.where(np.isnan(res) & (np.abs(z - 2 / 3) <= tol), L + 2 * s / 3, res)
            res = np.where(np.isnan(res) & (z >= 1 - tol), L + s, res)
            res = np.where(np.isnan(res) & (z > 1 / 3) & (z < 2 / 3), L + 2 * s / 3, res)
            done = ~np.isnan(res)
            ans[idx[done]] = res[done]
            active[idx[done]] = False
            go_right = ~done & (z > 2 / 3)
            base[idx[go_right]] = L[go_right] + 2 * s / 3
            s /= 3
            tol *= 3
        ans[active] = y[active]
        t = A + n * ans
        tiny = n * 3.0**-TAG_DEPTH
        at_lo = ans <= 0
        t[at_lo] = np.maximum(A + tiny, np.nextafter(A, np.inf))
        at_hi = ans >= 1
        t[at_hi] = np.minimum(B - tiny, np.nextafter(B, -np.inf))
        t = np.where(at_hi & (t < lo), np.nan, np.maximum(t, lo))
        t[~(t <= hi) | np.isnan(ans)] = np.nan
        return t

    def cover(self, n, base_radius=1.0):
        if not 0 <= n <= 40:
            raise ValueError("Cantor cover depth must lie in 0..40")
        # ends are the correctly rounded triadic rationals p / 3**n, so a child
        # shares its outer end with its parent bit for bit and covers nest exactly
        p = np.zeros(1, dtype=np.int64)
        for _ in range(n):
            p = np.stack([3 * p, 3 * p + 2], axis=1).ravel()
        A, L = self.ambient.lo, self.ambient.length
        los = A + L * (p / 3**n)
        his = A + L * ((p + 1) / 3**n)
        his[-1] = self.ambient.hi
        return Cover(n, los, his)

    def to_json(self):
        return {"type": "cantor", "interval": [self.ambient.lo, self.ambient.hi]}


def contains(E: ExceptionalSet, x: float, depth: int = 30) -> bool:
    if not 1 <= depth <= MAX_MEMBER_DEPTH:
        raise ValueError(f"depth must lie in 1..{MAX_MEMBER_DEPTH}")
    return bool(E.contains_array(np.array([x], dtype=float), depth)[0])


def cover(E: ExceptionalSet, n: int, base_radius: float = 1.0) -> Cover:
    return E.cover(n, base_radius)


def pick_tag(E: ExceptionalSet, I: Interval):
    """A point of E inside I, or None when the intersection is empty at working depth."""
    t = E.pick_tag_array(np.array([I.lo]), np.array([I.hi]))[0]
    return None if math.isnan(t) else float(t)
