"""Problem files: loading, validation and the built-in corpus.

A problem is a JSON object::

    {"name": "heaviside",
     "interval": [-1, 1],
     "F": "piecewise(x < 0: 0, 1)",          # expression text or {"builtin": "cantor"}
     "f": "0",                               # expression text or {"builtin": "zero"}
     "E": {"type": "points", "points": [0]}, # or {"type": "empty"} / {"type": "cantor"}
     "flags": {"continuous_at_E": false, "absolutely_continuous": false},
     "expected": {"delta_F": 1, "riemann": 0, "residue": 1},
     "tol": 1e-9,                            # optional default tolerance
     "gauge": {"window0": 0.1},              # optional GaugeSchedule overrides
     "provenance": {"delta_F": "..."}}       # optional notes on expected values

Unknown fields anywhere are rejected with the offending path.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from ..errors import ParseError, ProblemIOError, SchemaError
from ..exceptional import EMPTY, CantorSet, ExceptionalSet, FinitePoints
from ..kernel import ExtendedFunction, Interval, extend
from .cantor import cantor_array
from .expr import ExprFunction

TOP_FIELDS = {"name", "interval", "F", "f", "E", "flags", "expected", "tol", "gauge", "provenance"}
REQUIRED = ("name", "interval", "F", "f", "E")
FLAG_FIELDS = {"continuous_at_E", "absolutely_continuous"}
EXPECTED_FIELDS = {"delta_F", "riemann", "residue"}
GAUGE_FIELDS = {"h0", "c", "gamma0", "window0", "window_decay", "slope_eps0", "slope_decay"}

DIRICHLET_SAMPLE = np.arange(1, 1000) / 1000.0


def _zero(x):
    return np.zeros(np.shape(x))


def _dirichlet(x):
    """1 on the finite sample k/1000 (k = 1..999), 0 elsewhere."""
    return np.isin(np.asarray(x, dtype=float), DIRICHLET_SAMPLE).astype(float)


BUILTIN_FUNCTIONS = {"cantor": cantor_array, "zero": _zero, "dirichlet": _dirichlet}


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    ambient: Interval
    F_source: object
    f_source: object
    F: object = field(repr=False)
    f: object = field(repr=False)
    E: ExceptionalSet = EMPTY
    flags: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    tol: float | None = None
    gauge: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    @property
    def F_ex(self) -> ExtendedFunction:
        return extend(self.F, self.E)

    @property
    def f_ex(self) -> ExtendedFunction:
        return extend(self.f, self.E)

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "interval": [self.ambient.lo, self.ambient.hi],
            "F": self.F_source,
            "f": self.f_source,
            "E": {k: v for k, v in self.E.to_json().items() if k in ("type", "points")},
            "flags": dict(self.flags),
            "expected": dict(self.expected),
        }
        if self.tol is not None:
            out["tol"] = self.tol
        if self.gauge:
            out["gauge"] = dict(self.gauge)
        if self.provenance:
            out["provenance"] = dict(self.provenance)
        return out


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, f"expected a number, got {type(value).__name__}")
    value = float(value)
    if not math.isfinite(value):
        raise SchemaError(path, "expected a finite number")
    return value


def _object(value, path, allowed):
    if not isinstance(value, dict):
        raise SchemaError(path, "expected an object")
    for key in value:
        if key not in allowed:
            raise SchemaError(f"{path}.{key}" if path else key, "unknown field")
    return value


def _function(value, path):
    if isinstance(value, str):
        try:
            return ExprFunction(value)
        except ParseError as err:
            raise ParseError(f"{path}: {err.message}", err.offset, err.expected) from None
    if isinstance(value, dict):
        _object(value, path, {"builtin"})
        name = value.get("builtin")
        if name not in BUILTIN_FUNCTIONS:
            raise SchemaError(f"{path}.builtin", f"unknown builtin {name!r}; choose from {sorted(BUILTIN_FUNCTIONS)}")
        return BUILTIN_FUNCTIONS[name]
    raise SchemaError(path, "expected an expression string or {\"builtin\": name}")


def _exceptional(value, ambient, path="E"):
    _object(value, path, {"type", "points"})
    kind = value.get("type")
    if kind == "empty":
        if "points" in value:
            raise SchemaError(f"{path}.points", "empty set takes no points")
        return EMPTY
    if kind == "cantor":
        if "points" in value:
            raise SchemaError(f"{path}.points", "cantor set takes no points")
        return CantorSet(ambient)
    if kind == "points":
        pts = value.get("points")
        if not isinstance(pts, list) or not pts:
            raise SchemaError(f"{path}.points", "expected a nonempty list of numbers")
        nums = [_number(p, f"{path}.points[{i}]") for i, p in enumerate(pts)]
        for i, p in enumerate(nums):
            if p in (ambient.lo, ambient.hi):
                raise SchemaError(f"{path}.points[{i}]", f"interval endpoint {p} may not belong to E")
            if not ambient.lo < p < ambient.hi:
                raise SchemaError(f"{path}.points[{i}]", f"{p} lies outside the interval")
        ordered = sorted(set(nums))
        if len(ordered) != len(nums):
            raise SchemaError(f"{path}.points", "duplicate points")
        return FinitePoints(tuple(ordered), ambient)
    raise SchemaError(f"{path}.type", "expected one of 'empty', 'points', 'cantor'")


def parse_problem(data) -> ProblemSpec:
    """Validate a decoded JSON object and build the ProblemSpec."""
    _object(data, "", TOP_FIELDS)
    for key in REQUIRED:
        if key not in data:
            raise SchemaError(key, "missing required field")
    name = data["name"]
    if not isinstance(name, str) or not name:
        raise SchemaError("name", "expected a nonempty string")
    iv = data["interval"]
    if not isinstance(iv, list) or len(iv) != 2:
        raise SchemaError("interval", "expected [lo, hi]")
    lo, hi = _number(iv[0], "interval[0]"), _number(iv[1], "interval[1]")
    if not lo < hi:
        raise SchemaError("interval", "need lo < hi")
    ambient = Interval(lo, hi)
    E = _exceptional(data["E"], ambient)
    flags = _object(data.get("flags", {}), "flags", FLAG_FIELDS)
    for key, v in flags.items():
        if not isinstance(v, bool):
            raise SchemaError(f"flags.{key}", "expected true or false")
    expected = dict(_object(data.get("expected", {}), "expected", EXPECTED_FIELDS))
    if "delta_F" in expected:
        expected["delta_F"] = _number(expected["delta_F"], "expected.delta_F")
    for key, word in (("riemann", "DIVERGENT"), ("residue", "NOT_BS")):
        if key in expected and expected[key] != word:
            expected[key] = _number(expected[key], f"expected.{key}")
    tol = None
    if "tol" in data:
        tol = _number(data["tol"], "tol")
        if not tol >= 1e-12:
            raise SchemaError("tol", "must be at least 1e-12")
    gauge = dict(_object(data.get("gauge", {}), "gauge", GAUGE_FIELDS))
    for key, v in gauge.items():
        gauge[key] = _number(v, f"gauge.{key}")
        if not gauge[key] > 0:
            raise SchemaError(f"gauge.{key}", "must be positive")
    prov = _object(data.get("provenance", {}), "provenance", EXPECTED_FIELDS | {"problem"})
    for key, v in prov.items():
        if not isinstance(v, str):
            raise SchemaError(f"provenance.{key}", "expected a string")
    return ProblemSpec(
        name=name,
        ambient=ambient,
        F_source=data["F"],
        f_source=data["f"],
        F=_function(data["F"], "F"),
        f=_function(data["f"], "f"),
        E=E,
        flags=dict(flags),
        expected=expected,
        tol=tol,
        gauge=gauge,
        provenance=dict(prov),
    )


def load_problem(path) -> ProblemSpec:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as err:
        raise ProblemIOError(f"cannot read {path}: {err.strerror or err}") from err
    try:
        data = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as err:
        raise SchemaError("", f"file is not UTF-8: {err}") from err
    except json.JSONDecodeError as err:
        raise SchemaError("", f"invalid JSON at line {err.lineno} column {err.colno}: {err.msg}") from err
    return parse_problem(data)


def _builtin_dir():
    return resources.files(__package__).joinpath("problems")


def builtin_names() -> list:
    return sorted(p.name[:-5] for p in _builtin_dir().iterdir() if p.name.endswith(".json"))


def builtin_problem(name: str) -> ProblemSpec:
    res = _builtin_dir().joinpath(f"{name}.json")
    if not res.is_file():
        raise ProblemIOError(f"no builtin problem {name!r}; available: {', '.join(builtin_names())}")
    with resources.as_file(res) as path:
        return load_problem(path)


def resolve_problem(ref: str) -> ProblemSpec:
    """Bare names are builtins; anything with a path separator or leading '.' is a file."""
    if os.sep in ref or "/" in ref or ref.startswith("."):
        return load_problem(ref)
    return builtin_problem(ref)

