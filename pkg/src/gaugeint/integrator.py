"""Generalized Riemann integration by gauge refinement, plus derivative checks.

``gr_integral`` walks a schedule of ever finer gauges.  At level k it builds
the Cousin partition for the level-k gauge and records its Riemann sum.  When
E is a finite point set it also re-cuts the cell around each point of E with
left/right extents in ratios 1, 1/2 and 1/8.  A genuine limit must not care
about that cell's shape, so the spread of those sums is a divergence witness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import PartitionBudgetError
from .exceptional import EMPTY, ExceptionalSet, FinitePoints
from . import kernel
from .kernel import ExtendedFunction, Interval, TaggedPartition
from .partition import (
    DEFAULT_MAX_CELLS,
    DEFAULT_MAX_DEPTH,
    Gauge,
    TagPolicy,
    cousin_partition,
    restriction,
)

CONVERGED = "CONVERGED"
DIVERGENT = "DIVERGENT"
BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"

MAGNITUDE_CAP = 1e12
GROWTH_RUN = 5
SPREAD_LAG = 3
PROBE_RATIOS = (1.0, 0.5, 0.125)


@dataclass(frozen=True)
class Uniform:
    h: float

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("uniform gauge needs h > 0")

    @property
    def gamma(self):
        return self.h

    @property
    def window(self):
        return self.h

    def build(self, f=None, E: ExceptionalSet = EMPTY) -> Gauge:
        h = self.h
        return Gauge(lambda x: np.full(np.shape(x), h), f"uniform({h:g})")


@dataclass(frozen=True)
class SingularityAdapted:
    """delta(x) = max(min(h, c*dist(x, E), slope), gamma) off E; ``window`` on E.

    ``slope`` is ``slope_eps / |f'(x)|`` with f' estimated by central
    differences; it is only used when ``slope_eps`` is set.  ``window``
    defaults to ``gamma``.
    """

    h: float
    c: float
    gamma: float
    window: float | None = None
    slope_eps: float | None = None

    def __post_init__(self):
        if not (self.h > 0 and self.c > 0 and self.gamma > 0):
            raise ValueError("h, c and gamma must be positive")
        if self.gamma > self.h:
            raise ValueError("gamma must not exceed h")
        if self.window is None:
            object.__setattr__(self, "window", self.gamma)
        if not self.window > 0:
            raise ValueError("window must be positive")

    def build(self, f=None, E: ExceptionalSet = EMPTY) -> Gauge:
        h, c, gamma, window, eps = self.h, self.c, self.gamma, self.window, self.slope_eps

        def delta(x):
            base = np.minimum(h, c * E.dist_array(x))
            if eps is not None and f is not None:
                base = np.minimum(base, _slope_limit(f, x, base, eps))
            d = np.maximum(base, gamma)
            if not E.is_empty:
                d = np.where(E.contains_array(x), window, d)
            return d

        return Gauge(delta, f"adapted(h={h:g}, c={c:g}, gamma={gamma:g}, window={window:g})")


def _slope_limit(f, x, base, eps):
    with np.errstate(all="ignore"):
        s = np.maximum(1e-3 * base, 1e-300)
        fp = np.abs(f(x + s) - f(x - s)) / (2 * s)
        s = np.minimum(s, 1e-2 * eps / np.maximum(fp, 1e-300))
        fp = np.abs(f(x + s) - f(x - s)) / (2 * s)
        return np.where(fp > 0, eps / fp, np.inf)


@dataclass(frozen=True)
class GaugeSchedule:
    """Level-k gauge parameters; ``None`` fields take ambient-relative defaults.

    h_k = h0 / 2**k, gamma_k = gamma0 / 4**k, window_k = window0 / window_decay**k,
    slope_eps_k = slope_eps0 / slope_decay**k.
    """

    h0: float | None = None
    c: float = 0.5
    gamma0: float | None = None
    window0: float | None = None
    window_decay: float = 4.0
    slope_eps0: float | None = None
    slope_decay: float = 2.0

    def at(self, k: int, ambient: Interval) -> SingularityAdapted:
        n = ambient.length
        h0 = self.h0 if self.h0 is not None else n / 8
        gamma0 = self.gamma0 if self.gamma0 is not None else 1e-6 * n
        window0 = self.window0 if self.window0 is not None else gamma0
        slope = None if self.slope_eps0 is None else self.slope_eps0 / self.slope_decay**k
        h = h0 / 2**k
        gamma = min(gamma0 / 4**k, h)
        return SingularityAdapted(h, self.c, gamma, window0 / self.window_decay**k, slope)

    @classmethod
    def from_dict(cls, d: dict | None):
        return cls(**(d or {}))


@dataclass(frozen=True)
class TraceRow:
    k: int
    h: float
    gamma: float
    window: float
    cells: int
    value: float
    spread: float = 0.0


@dataclass
class IntegralResult:
    value: float
    status: str
    trace: list = field(default_factory=list)
    message: str = ""

    @property
    def converged(self):
        return self.status == CONVERGED


def skewed_partition(
    P: TaggedPartition,
    gauge: Gauge,
    E: FinitePoints,
    policy,
    half_width: float,
    ratio: float,
    max_depth: int = DEFAULT_MAX_DEPTH,
    max_cells: int = DEFAULT_MAX_CELLS,
) -> TaggedPartition:
    """Copy of P whose cell around each point e of E is [e - w, e + ratio*w].

    Cells of P overlapping the new cell are dropped and the leftover slivers
    are re-partitioned; the result stays gauge-fine as long as the gauge at e
    exceeds ``half_width``.
    """
    lo, hi, t = P.lo, P.hi, P.tags
    keep = np.ones(lo.size, dtype=bool)
    new_lo, new_hi, new_t = [], [], []
    for e in E.points:
        L, R = e - half_width, e + ratio * half_width
        if L <= P.ambient.lo or R >= P.ambient.hi:
            raise ValueError(f"skewed cell around {e} leaves the ambient interval")
        keep &= (hi <= L) | (lo >= R)
        left = hi[hi <= L]
        right = lo[lo >= R]
        frag = []
        if left.size and left.max() < L:
            frag.append(Interval(left.max(), L))
        if right.size and right.min() > R:
            frag.append(Interval(R, right.min()))
        new_lo.append([L])
        new_hi.append([R])
        new_t.append([e])
        for I in frag:
            Q = cousin_partition(I, gauge, E, policy, max_depth, max_cells)
            new_lo.append(Q.lo)
            new_hi.append(Q.hi)
            new_t.append(Q.tags)
    lo = np.concatenate([lo[keep], *new_lo])
    hi = np.concatenate([hi[keep], *new_hi])
    t = np.concatenate([t[keep], *new_t])
    return TaggedPartition(P.ambient, lo, hi, t)


def _probe_spread(f, P, gauge, E, policy, window, ratios, caps):
    if not isinstance(E, FinitePoints):
        return 0.0, []
    values = []
    for r in ratios:
        Q = skewed_partition(P, gauge, E, policy, 0.5 * window, r, *caps)
        values.append(kernel.riemann_sum(f, Q))
    return max(values) - min(values), values


def _refine(f, ambient, E, policy, tol, strategy_at, k_max, caps, probe_ratios):
    trace = []
    values = []
    spreads = []
    stable = grow = flat = 0
    prev_d = None
    for k in range(k_max + 1):
        strat = strategy_at(k)
        gauge = strat.build(f, E)
        try:
            P = cousin_partition(ambient, gauge, E, policy, *caps)
            v = kernel.riemann_sum(f, P)
            spread = 0.0
            if probe_ratios:
                spread, _ = _probe_spread(f, P, gauge, E, policy, strat.window, probe_ratios, caps)
        except PartitionBudgetError as err:
            last = values[-1] if values else math.nan
            return IntegralResult(last, BUDGET_EXHAUSTED, trace, f"level {k}: {err}")
        trace.append(TraceRow(k, strat.h, strat.gamma, strat.window, len(P), v, spread))
        values.append(v)
        if not math.isfinite(v) or abs(v) > MAGNITUDE_CAP:
            return IntegralResult(v, DIVERGENT, trace, f"|value| exceeded {MAGNITUDE_CAP:g} at level {k}")
        # the spread may cycle with the grid phase, so compare against three levels back
        if len(spreads) >= SPREAD_LAG and spread >= tol and spread >= 0.9 * spreads[-SPREAD_LAG]:
            flat += 1
        else:
            flat = 0
        spreads.append(spread)
        if flat >= GROWTH_RUN:
            return IntegralResult(v, DIVERGENT, trace, f"sums depend on the E-cell shape (spread {spread:.3g})")
        if k == 0:
            continue
        d = abs(v - values[-2])
        stable = stable + 1 if (d < tol / 2 and spread < tol / 2) else 0
        if stable >= 2:
            return IntegralResult(v, CONVERGED, trace)
        grow = grow + 1 if (prev_d is not None and d > prev_d) else 0
        if grow >= GROWTH_RUN:
            return IntegralResult(v, DIVERGENT, trace, "successive differences kept growing")
        prev_d = d
    return IntegralResult(values[-1], BUDGET_EXHAUSTED, trace, f"no convergence within {k_max} levels")


def gr_integral(
    f: ExtendedFunction,
    ambient: Interval,
    E: ExceptionalSet = EMPTY,
    policy=TagPolicy.HENSTOCK,
    tol: float = 1e-6,
    schedule: GaugeSchedule | None = None,
    k_max: int = 40,
    max_depth: int = DEFAULT_MAX_DEPTH,
    max_cells: int = DEFAULT_MAX_CELLS,
    probe_ratios=PROBE_RATIOS,
) -> IntegralResult:
    """Generalized Riemann integral of f_ex over ``ambient``; see module docstring."""
    if not tol >= 1e-12:
        raise ValueError("tol must be at least 1e-12")
    schedule = schedule or GaugeSchedule()
    policy = TagPolicy.parse(policy)
    return _refine(
        f, ambient, E, policy, tol,
        lambda k: schedule.at(k, ambient),
        k_max, (max_depth, max_cells), probe_ratios if not E.is_empty else (),
    )


def ordinary_riemann(
    f: ExtendedFunction,
    ambient: Interval,
    tol: float = 1e-6,
    policy=TagPolicy.HENSTOCK,
    h0: float | None = None,
    k_max: int = 40,
    max_depth: int = DEFAULT_MAX_DEPTH,
    max_cells: int = DEFAULT_MAX_CELLS,
) -> IntegralResult:
    """Riemann integral: constant gauges h0 / 2**k, so the gauge infimum stays positive."""
    if not tol >= 1e-12:
        raise ValueError("tol must be at least 1e-12")
    h0 = h0 if h0 is not None else ambient.length / 8
    return _refine(
        f, ambient, EMPTY, TagPolicy.parse(policy), tol,
        lambda k: Uniform(h0 / 2**k),
        k_max, (max_depth, max_cells), (),
    )


@dataclass(frozen=True)
class LimitViolation:
    cell: Interval
    tag: float
    quotient: float
    value: float


def limit_scan(
    F: ExtendedFunction,
    f: ExtendedFunction,
    ambient: Interval,
    E: ExceptionalSet = EMPTY,
    eps: float = 1e-3,
    sample_count: int = 1000,
    seed: int = 0,
    policy=TagPolicy.HENSTOCK,
    levels: int = 60,
):
    """Sampled check that f is the limit of the difference quotients of F off E.

    Returns ``(violations, unresolved)``.  Each random tag gets a ladder of
    cells shrinking by halves from 1e-2*|ambient|.  A scale is usable while
    the evaluation noise of F, measured from a few ulp-sized steps at the tag,
    costs the quotient less than eps/4.  A tag is a violation when the
    quotients at its two finest usable scales agree within eps/2 but sit eps
    or more away from f(tag).  When they still disagree, double precision
    cannot resolve the limit there and the tag is listed as unresolved.  Tags
    closer than 1e-3*|ambient| to E and cells meeting E are skipped.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    policy = TagPolicy.parse(policy)
    rng = np.random.default_rng(seed)
    n = ambient.length
    tags = ambient.lo + n * rng.random(sample_count)
    if policy is TagPolicy.LEFT:
        theta = np.zeros(sample_count)
    elif policy is TagPolicy.RIGHT:
        theta = np.ones(sample_count)
    else:
        theta = rng.random(sample_count)
    if not E.is_empty:
        keep = E.dist_array(tags) >= 1e-3 * n
        tags, theta = tags[keep], theta[keep]
    fx = f(tags)
    noise = _evaluation_noise(F, f, tags)
    q_prev = np.full(tags.size, np.nan)
    q_last = np.full(tags.size, np.nan)
    cell_lo = np.full(tags.size, np.nan)
    cell_hi = np.full(tags.size, np.nan)
    L = 1e-2 * n
    for _ in range(levels):
        lo = tags - theta * L
        hi = lo + L
        width = hi - lo
        usable = (lo >= ambient.lo) & (hi <= ambient.hi) & (width > 0)
        usable &= noise < 0.25 * eps * np.where(width > 0, width, 0.0)
        if not E.is_empty:
            usable &= ~E.meets_array(lo, hi)
        if not usable.any():
            break
        q = (F(hi) - F(lo)) / np.where(width > 0, width, 1.0)
        q_prev[usable] = q_last[usable]
        q_last[usable] = q[usable]
        cell_lo[usable] = lo[usable]
        cell_hi[usable] = hi[usable]
        L /= 2
    settled = np.abs(q_last - q_prev) < 0.5 * eps
    off = ~(np.abs(q_last - fx) < eps)
    violations, unresolved = [], []
    for i in np.flatnonzero(off):
        if np.isnan(cell_lo[i]):
            unresolved.append(float(tags[i]))
            continue
        rec = LimitViolation(Interval(cell_lo[i], cell_hi[i]), float(tags[i]), float(q_last[i]), float(fx[i]))
        (violations if settled[i] else unresolved).append(rec if settled[i] else float(tags[i]))
    return violations, unresolved


def _evaluation_noise(F, f, t):
    """Deviation of F from its tangent over 1..8 ulp steps at t, floored at 4 ulp of F(t)."""
    u = np.abs(np.spacing(t))
    F0, f0 = F(t), f(t)
    dev = [np.abs(F(t + j * u) - F0 - j * u * f0) for j in range(1, 9)]
    return np.maximum(np.max(dev, axis=0), 4 * np.abs(np.spacing(F0)))


def limit_check(
    F: ExtendedFunction,
    f: ExtendedFunction,
    ambient: Interval,
    E: ExceptionalSet = EMPTY,
    eps: float = 1e-3,
    sample_count: int = 1000,
    seed: int = 0,
    policy=TagPolicy.HENSTOCK,
) -> list:
    """Violations found by ``limit_scan``; an empty list means a consistent pair."""
    return limit_scan(F, f, ambient, E, eps, sample_count, seed, policy)[0]


def proximity_check(F: ExtendedFunction, f: ExtendedFunction, P: TaggedPartition, E=EMPTY, eps: float = 1e-3) -> bool:
    """|f(tag)*|I| - (F(hi) - F(lo))| < eps*|I| on every pair outside the E-restriction."""
    mask = np.ones(len(P), dtype=bool)
    if not E.is_empty:
        mask[restriction(P, E).indices] = False
    lo, hi, t = P.lo[mask], P.hi[mask], P.tags[mask]
    width = hi - lo
    lhs = np.abs(f(t) * width - (F(hi) - F(lo)))
    return bool(np.all(lhs < eps * width))


def with_schedule_overrides(schedule: GaugeSchedule, **kw) -> GaugeSchedule:
    return replace(schedule, **{k: v for k, v in kw.items() if v is not None})
