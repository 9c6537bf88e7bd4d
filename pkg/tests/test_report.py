import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tfop.errors import InvalidInputError
from tfop.report import CheckRecord, dumps, emit_report, flatten, format_float, records_to_rows, rows_to_csv


def test_record_pass_logic():
    assert CheckRecord("a", 1e-12, 1e-10, "x").passed
    assert CheckRecord("a", 1e-10, 1e-10, "x").passed
    assert not CheckRecord("a", 2e-10, 1e-10, "x").passed
    assert not CheckRecord("a", math.nan, 1.0, "x").passed
    assert not CheckRecord("a", math.inf, math.inf, "x").passed
    assert not CheckRecord("a", 0.0, 1.0, "x", passed=False).passed


def test_record_dict_keys():
    d = CheckRecord("name", np.float64(0.5), 1, "anchor").as_dict()
    assert d == {"name": "name", "value": 0.5, "tolerance": 1.0, "pass": True, "anchor": "anchor"}
    assert type(d["value"]) is float


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    assert float(format_float(x)) == x


def test_non_finite_floats_are_strings():
    assert format_float(math.nan) == '"nan"'
    assert format_float(math.inf) == '"inf"'
    assert format_float(-math.inf) == '"-inf"'
    assert json.loads(dumps({"v": math.inf})) == {"v": "inf"}


def test_dumps_values():
    text = dumps({"a": 0.1, "b": [1, True, None], "c": np.arange(2), "d": 1 + 2j, "e": {}, "f": []})
    assert json.loads(text) == {"a": 0.1, "b": [1, True, None], "c": [0, 1], "d": {"re": 1.0, "im": 2.0}, "e": {}, "f": []}
    assert "0.10000000000000001" in text
    with pytest.raises(InvalidInputError):
        dumps(object())


def test_empty_records_are_empty_array(tmp_path):
    path = emit_report([], "json", tmp_path, "empty")
    assert path.read_text().strip() == "[]"


def test_records_with_config(tmp_path):
    recs = [CheckRecord("a", 0.0, 1.0, "x"), CheckRecord("b", 2.0, 1.0, "y")]
    doc = json.loads(emit_report(recs, "json", tmp_path, config={"seed": 3}).read_text())
    assert doc["config"] == {"seed": 3}
    assert [r["pass"] for r in doc["records"]] == [True, False]


def test_csv_rows(tmp_path):
    recs = [CheckRecord("a,b", 0.25, 1.0, "anchor"), CheckRecord("c", 3.0, 1.0, "z")]
    rows = records_to_rows(recs)
    assert rows[0] == ["name", "value", "tolerance", "pass", "anchor"]
    assert rows[1] == ["a,b", "0.25", "1", "true", "anchor"]
    path = emit_report(recs, "csv", tmp_path, "r")
    parsed = list(csv.reader(io.StringIO(path.read_text())))
    assert parsed == rows
    assert rows_to_csv([["k", 0.1]]) == "k,0.10000000000000001\n"


def test_mapping_report(tmp_path):
    body = {"experiment": "x", "rows": [{"v": 1.5, "ok": True}], "meta": {"n": None}}
    doc = json.loads(emit_report(body, "json", tmp_path, "m", config={"seed": 0}).read_text())
    assert list(doc) == ["config", "experiment", "rows", "meta"]
    text = emit_report(body, "csv", tmp_path, "m").read_text()
    assert text.splitlines() == ["key,value", "experiment,x", "rows[0].v,1.5", "rows[0].ok,true", "meta.n,"]


def test_flatten_leaves():
    assert flatten({"a": {"b": [1.0, 2]}, "c": np.array([True])}) == [["a.b[0]", 1.0], ["a.b[1]", 2], ["c[0]", "true"]]


def test_unknown_format(tmp_path):
    with pytest.raises(InvalidInputError):
        emit_report([], "xml", tmp_path)


def test_emission_is_deterministic(tmp_path):
    recs = [CheckRecord(f"c{i}", 1.0 / (i + 3), 0.5, "a") for i in range(5)]
    a = emit_report(recs, "json", tmp_path / "1", config={"seed": 1}).read_bytes()
    b = emit_report(recs, "json", tmp_path / "2", config={"seed": 1}).read_bytes()
    assert a == b
