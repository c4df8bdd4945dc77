"""Property suites run by ``gaugeint check``.

Each suite returns a SuiteResult; ``failures`` lists human-readable reasons.
Library calls go through module attributes (``kernel.riemann_sum``) so a
patched implementation is what gets exercised.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import decomposition, integrator, kernel, partition, residue
from .corpus import cantor, problems
from .corpus.expr import ExprFunction
from .exceptional import EMPTY, CantorSet, FinitePoints
from .kernel import Interval, extend
from .partition import Gauge, TagPolicy


@dataclass
class SuiteResult:
    name: str
    failures: list = field(default_factory=list)
    cases: int = 0
    seconds: float = 0.0

    @property
    def passed(self):
        return not self.failures


def _random_setup(rng):
    """A random (ambient, E, gauge) with a few thousand cells at most."""
    kind = rng.integers(3)
    if kind == 2:
        ambient = Interval(0.0, 1.0)
        E = CantorSet(ambient)
    else:
        a = float(rng.uniform(-5, 5))
        ambient = Interval(a, a + float(rng.uniform(0.5, 4)))
        E = EMPTY
        if kind == 1:
            k = int(rng.integers(1, 4))
            pts = np.sort(rng.uniform(ambient.lo, ambient.hi, k) * 0.9 + 0.05 * (ambient.lo + ambient.hi))
            pts = np.unique(pts)
            E = FinitePoints(tuple(pts.tolist()), ambient)
    n = ambient.length
    if E.is_empty and rng.random() < 0.5:
        gauge = Gauge.constant(float(rng.uniform(0.01, 0.5)) * n)
    else:
        h = float(rng.uniform(0.02, 0.3)) * n
        gamma = float(10 ** rng.uniform(-4, -2)) * n
        strat = integrator.SingularityAdapted(h, float(rng.uniform(0.1, 1.0)), min(gamma, h))
        gauge = strat.build(None, E)
    return ambient, E, gauge


def suite_partitions(seed=0, count=1000):
    res = SuiteResult("partitions")
    rng = np.random.default_rng(seed)
    policies = list(TagPolicy)
    for i in range(count):
        ambient, E, gauge = _random_setup(rng)
        policy = policies[int(rng.integers(len(policies)))]
        pseed = int(rng.integers(2**63))
        if i % 4 == 0:
            P = partition.cousin_partition(ambient, gauge, E, policy)
        else:
            P = partition.random_partition(ambient, gauge, E, policy, seed=pseed)
        bad = partition.validate(P, ambient, gauge, policy, E)
        res.cases += 1
        if bad:
            res.failures.append(f"case {i} ({policy.value}, {E!r}, seed {pseed}): {bad[0]}")
    return res


SMOOTH = ("polynomial", "sin")


def suite_proximity(seed=0, eps=1e-3):
    """|f(t)|I| - dF(I)| < eps|I| on every pair of fine partitions of smooth problems."""
    res = SuiteResult("proximity")
    rng = np.random.default_rng(seed)
    for name in SMOOTH:
        p = problems.builtin_problem(name)
        fine = Gauge.constant(eps / 8 * min(1.0, p.ambient.length))
        for policy in TagPolicy:
            P = partition.random_partition(p.ambient, fine, p.E, policy, seed=int(rng.integers(2**63)))
            res.cases += 1
            if not integrator.proximity_check(p.F_ex, p.f_ex, P, p.E, eps):
                res.failures.append(f"{name}/{policy.value}: proximity bound broken")
        coarse = kernel.TaggedPartition(p.ambient, [p.ambient.lo], [p.ambient.hi], [p.ambient.lo])
        res.cases += 1
        if integrator.proximity_check(p.F_ex, p.f_ex, coarse, p.E, eps):
            res.failures.append(f"{name}: single coarse pair passed the bound")
    return res


def suite_additivity(seed=0, per_problem=20):
    """interval_sum over any partition equals delta_F up to nu * 4 ulp."""
    res = SuiteResult("additivity")
    rng = np.random.default_rng(seed)
    for name in problems.builtin_names():
        p = problems.builtin_problem(name)
        F = p.F_ex
        for _ in range(per_problem):
            g = Gauge.constant(float(rng.uniform(0.005, 0.2)) * p.ambient.length)
            P = partition.random_partition(p.ambient, g, p.E, TagPolicy.HENSTOCK, seed=int(rng.integers(2**63)))
            ends = np.concatenate([P.lo, P.hi[-1:]])
            scale = float(np.max(np.abs(F(ends))))
            bound = len(P) * 4 * math.ulp(scale if scale > 0 else 1.0)
            gap = abs(kernel.interval_sum(F, P) - kernel.delta_F(F, p.ambient))
            res.cases += 1
            if gap > bound:
                res.failures.append(f"{name}: |interval_sum - delta_F| = {gap:.3g} > {bound:.3g}")
    return res


def suite_riemann(seed=0):
    """Oracle integrals and linearity of Riemann sums."""
    res = SuiteResult("riemann")
    rng = np.random.default_rng(seed)
    sin = extend(np.sin)
    out = integrator.ordinary_riemann(sin, Interval(0.0, math.pi), 1e-6)
    res.cases += 1
    if not (out.converged and abs(out.value - 2.0) <= 1e-6):
        res.failures.append(f"ordinary_riemann(sin, [0, pi]) = {out.value} ({out.status})")
    lin = extend(lambda x: 2 * x)
    out = integrator.gr_integral(lin, Interval(0.0, 1.0), tol=1e-10)
    res.cases += 1
    if not (out.converged and abs(out.value - 1.0) <= 1e-10):
        res.failures.append(f"gr_integral(2x, [0, 1]) = {out.value} ({out.status})")
    f, g = extend(np.cos), extend(lambda x: x**3 - x)
    for _ in range(20):
        a, b = rng.normal(size=2)
        P = partition.random_partition(
            Interval(-1.0, 2.0), Gauge.constant(0.05), EMPTY, TagPolicy.HENSTOCK, seed=int(rng.integers(2**63))
        )
        combo = extend(lambda x, a=a, b=b: a * np.cos(x) + b * (x**3 - x))
        lhs = kernel.riemann_sum(combo, P)
        rhs = a * kernel.riemann_sum(f, P) + b * kernel.riemann_sum(g, P)
        res.cases += 1
        if abs(lhs - rhs) > 1e-12 * (1 + abs(a) + abs(b)) * 10:
            res.failures.append(f"linearity: {lhs} != {rhs}")
        ref = math.fsum(np.cos(P.tags) * P.lengths)
        res.cases += 1
        if abs(kernel.riemann_sum(f, P) - ref) > 1e-13:
            res.failures.append("riemann_sum disagrees with a direct tag-by-length sum")
    return res


def suite_residues(seed=0, tol=1e-9):
    """Ratio-set robustness, additivity over E and jump-only functions."""
    res = SuiteResult("residues")
    amb = Interval(-1.0, 1.0)
    E = FinitePoints((0.0,), amb)
    cases = {
        "step": "piecewise(x < 0: 0, 1)",
        "square": "x^2",
        "two_steps": "piecewise(x < -0.5: 0, x < 0.25: 2, -1)",
    }
    for name, src in cases.items():
        F = extend(ExprFunction(src), E)
        a = residue.point_residue(F, 0.0, tol, ratios=(1.0, 0.5, 0.125))
        b = residue.point_residue(F, 0.0, tol, ratios=(1.0, 1 / 3, 1 / 16))
        res.cases += 1
        if a.status != b.status or (a.summable and abs(a.value - b.value) > tol):
            res.failures.append(f"{name}: ratio sets disagree ({a.status} {a.value} vs {b.status} {b.value})")
    E1 = FinitePoints((-0.5,), amb)
    E2 = FinitePoints((0.25,), amb)
    both = FinitePoints((-0.5, 0.25), amb)
    F = extend(ExprFunction(cases["two_steps"]), both)
    whole = residue.basic_sum(F, both, tol)
    parts = [residue.basic_sum(F, e, tol) for e in (E1, E2)]
    res.cases += 1
    if not (whole.summable and all(p.summable for p in parts)):
        res.failures.append("two_steps: residue sums not summable")
    elif abs(whole.value - parts[0].value - parts[1].value) > 2 * tol:
        res.failures.append("residue sum is not additive over E")
    res.cases += 1
    if whole.summable and whole.value != kernel.delta_F(F, amb):
        res.failures.append(f"jump residues {whole.value} != delta_F {kernel.delta_F(F, amb)}")
    log = residue.point_residue(extend(ExprFunction("ln(abs(x))"), E), 0.0, tol)
    res.cases += 1
    if log.status != residue.NOT_BS:
        res.failures.append(f"ln|x| at 0 came out {log.status}")
    return res


def suite_cantor_levels(seed=0, n_max=20):
    res = SuiteResult("cantor-levels")
    for n, s in enumerate(residue.cantor_level_sums(n_max), start=1):
        res.cases += 1
        if abs(s - 1.0) > 1e-12:
            res.failures.append(f"S_{n} = {s!r}")
    return res


def suite_cantor_evaluator(seed=0, pairs=100_000):
    res = SuiteResult("cantor-evaluator")
    rng = np.random.default_rng(seed)
    x, y = rng.random(pairs), rng.random(pairs)
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    c_lo, c_hi = cantor.cantor_array(lo), cantor.cantor_array(hi)
    res.cases += pairs
    bad = np.flatnonzero(c_lo > c_hi)
    if bad.size:
        i = bad[0]
        res.failures.append(f"monotonicity: C({lo[i]!r}) > C({hi[i]!r})")
    xs = rng.random(2000)
    for v in xs.tolist():
        left, right = cantor.cantor_function(v / 3), cantor.cantor_function(v) / 2
        res.cases += 1
        if abs(left - right) > 2 * math.ulp(right if right else 1.0):
            res.failures.append(f"self-similarity at {v!r}: {left!r} vs {right!r}")
            break
    for v, want in ((0.0, 0.0), (1.0, 1.0), (1 / 3, 0.5), (0.25, 1 / 3)):
        res.cases += 1
        if cantor.cantor_function(v) != want:
            res.failures.append(f"C({v!r}) = {cantor.cantor_function(v)!r}, want {want!r}")
    return res


def suite_corpus(seed=0, eps=1e-3, samples=1000):
    """Builtins load, match their expected values and pass the derivative check."""
    res = SuiteResult("corpus")
    for name in problems.builtin_names():
        p = problems.builtin_problem(name)
        exp = p.expected
        total = decomposition.total_integral(p)
        res.cases += 1
        if "delta_F" in exp and abs(total - exp["delta_F"]) > 1e-12 * (1 + abs(total)):
            res.failures.append(f"{name}: delta_F {total!r} != expected {exp['delta_F']!r}")
        if not isinstance(p.F_source, dict):
            bad = integrator.limit_check(p.F_ex, p.f_ex, p.ambient, p.E, eps, samples, seed)
            res.cases += 1
            if bad:
                res.failures.append(f"{name}: {len(bad)} derivative violations, first {bad[0]}")
        rep = decomposition.decompose(p)
        res.cases += 1
        tol = rep.tol
        want_r, want_s = exp.get("riemann"), exp.get("residue")
        if want_r == "DIVERGENT":
            ok_r = rep.riemann.status == integrator.DIVERGENT
        else:
            ok_r = rep.riemann.converged and (want_r is None or abs(rep.riemann.value - want_r) <= 3 * tol)
        if want_s == "NOT_BS":
            ok_s = rep.residue.status == residue.NOT_BS
        else:
            ok_s = rep.residue.summable and (want_s is None or abs(rep.residue.value - want_s) <= 3 * tol)
        if not (ok_r and ok_s):
            res.failures.append(
                f"{name}: riemann {rep.riemann.status} {rep.riemann.value!r}, "
                f"residue {rep.residue.status} {rep.residue.value!r} vs expected {exp}"
            )
        if want_r != "DIVERGENT" and rep.verdict != decomposition.IDENTITY_HOLDS:
            res.failures.append(f"{name}: verdict {rep.verdict}")
    return res


SUITES = {
    "partitions": suite_partitions,
    "proximity": suite_proximity,
    "additivity": suite_additivity,
    "riemann": suite_riemann,
    "residues": suite_residues,
    "cantor-levels": suite_cantor_levels,
    "cantor-evaluator": suite_cantor_evaluator,
    "corpus": suite_corpus,
}


def run_suite(name: str, seed: int = 0) -> SuiteResult:
    t0 = time.perf_counter()
    try:
        out = SUITES[name](seed=seed)
    except Exception as err:  # a crashing suite is a failing suite
        out = SuiteResult(name, [f"raised {type(err).__name__}: {err}"])
    out.seconds = time.perf_counter() - t0
    return out


def run(names, seed: int = 0) -> list:
    if names in ("all", ["all"]):
        names = list(SUITES)
    return [run_suite(n, seed) for n in names]
