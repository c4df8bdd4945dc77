import dataclasses
import json

import pytest

from gaugeint.corpus.problems import (
    GAUGE_FIELDS,
    builtin_names,
    builtin_problem,
    load_problem,
    parse_problem,
    resolve_problem,
)
from gaugeint.errors import ParseError, ProblemIOError, SchemaError
from gaugeint.exceptional import CantorSet, FinitePoints
from gaugeint.integrator import GaugeSchedule
from gaugeint.kernel import delta_F

CORPUS = {"polynomial", "sin", "heaviside", "sqrt", "oscillatory", "cantor", "log_divergent", "dirichlet"}


def minimal(**kw):
    d = {"name": "t", "interval": [0, 1], "F": "x", "f": "1", "E": {"type": "empty"}}
    d.update(kw)
    return d


def test_corpus_is_complete():
    assert set(builtin_names()) == CORPUS


def test_cantor_builtin():
    p = builtin_problem("cantor")
    assert isinstance(p.E, CantorSet) and p.E.ambient == p.ambient
    assert p.F_source == {"builtin": "cantor"} and p.f_source == {"builtin": "zero"}
    assert p.expected["residue"] == 1


def test_heaviside_builtin():
    p = builtin_problem("heaviside")
    assert p.expected == {"delta_F": 1, "riemann": 0, "residue": 1}
    assert isinstance(p.E, FinitePoints)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_expected_delta_F(name):
    p = builtin_problem(name)
    assert delta_F(p.F_ex, p.ambient) == pytest.approx(p.expected["delta_F"], abs=1e-15)
    assert p.E.to_json()["type"] in {"empty", "points", "cantor"}


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_round_trip(name):
    p = builtin_problem(name)
    q = parse_problem(json.loads(json.dumps(p.to_json())))
    assert q.to_json() == p.to_json()


def test_endpoint_in_E_is_rejected():
    with pytest.raises(SchemaError) as err:
        parse_problem(minimal(E={"type": "points", "points": [0]}))
    assert err.value.path == "E.points[0]"


@pytest.mark.parametrize(
    "patch,path",
    [
        ({"extra": 1}, "extra"),
        ({"flags": {"smooth": True}}, "flags.smooth"),
        ({"E": {"type": "points", "points": [2]}}, "E.points[0]"),
        ({"E": {"type": "disk"}}, "E.type"),
        ({"interval": [1, 0]}, "interval"),
        ({"tol": 1e-13}, "tol"),
        ({"gauge": {"h": 1}}, "gauge.h"),
        ({"gauge": {"c": -1}}, "gauge.c"),
        ({"F": {"builtin": "gamma"}}, "F.builtin"),
        ({"expected": {"riemann": "big"}}, "expected.riemann"),
    ],
)
def test_schema_errors_name_the_path(patch, path):
    with pytest.raises(SchemaError) as err:
        parse_problem(minimal(**patch))
    assert err.value.path == path


def test_missing_field():
    d = minimal()
    del d["E"]
    with pytest.raises(SchemaError):
        parse_problem(d)


def test_bad_expression_is_parse_error():
    with pytest.raises(ParseError) as err:
        parse_problem(minimal(f="2*+x"))
    assert err.value.offset == 2


def test_file_loading(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps(minimal(name="lin")))
    assert resolve_problem(str(path)).name == "lin"
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(SchemaError):
        load_problem(tmp_path / "bad.json")
    with pytest.raises(ProblemIOError):
        load_problem(tmp_path / "missing.json")
    with pytest.raises(ProblemIOError):
        resolve_problem("no_such_builtin")


def test_gauge_fields_match_schedule():
    assert GAUGE_FIELDS == {f.name for f in dataclasses.fields(GaugeSchedule)}
