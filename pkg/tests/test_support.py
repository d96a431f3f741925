from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eulermix import seeding
from eulermix.report import SCHEMA_VERSION, ExperimentReport, Verdict, emit, to_csv, to_json
from eulermix.stats import estimate, fit_exponent, pooled


def test_streams_are_reproducible_and_distinct():
    a = seeding.stream(5, 0).random(4)
    assert np.array_equal(a, seeding.stream(5, 0).random(4))
    assert not np.array_equal(a, seeding.stream(5, 1).random(4))
    assert not np.array_equal(a, seeding.stream(6, 0).random(4))


def test_blocks():
    assert seeding.blocks(2500, 1000) == [(0, 1000), (1, 1000), (2, 500)]
    with pytest.raises(ValueError):
        seeding.blocks(0)


def _draw(scale, rng, size):
    return rng.random(size) * scale


def test_map_blocks_worker_independent():
    one = np.concatenate(seeding.map_blocks(_draw, 3500, 7, args=(2.0,), workers=1))
    many = np.concatenate(seeding.map_blocks(_draw, 3500, 7, args=(2.0,), workers=3))
    assert one.size == 3500 and np.array_equal(one, many)


@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=50), st.integers(1, 10))
def test_pooled_matches_estimate(xs, cut):
    x = np.array(xs)
    parts = [x[:cut], x[cut:]]
    p = pooled([(float(q.sum()), float((q * q).sum()), q.size) for q in parts if q.size])
    e = estimate(x)
    assert p.mean == pytest.approx(e.mean, abs=1e-9)
    assert p.stderr == pytest.approx(e.stderr, rel=1e-6, abs=1e-6)


def test_estimate_edge_cases():
    assert estimate([3.0]).stderr == 0.0
    assert math.isnan(estimate([]).mean)
    assert estimate([1.0, 3.0]).upper(1.0) == pytest.approx(2.0 + 1.0)


def test_fit_exponent_exact_power():
    xs = [2, 4, 8, 16]
    slope, c = fit_exponent(xs, [3 * x**1.5 for x in xs])
    assert slope == pytest.approx(1.5) and c == pytest.approx(3.0)


def test_verdict_record_and_merge():
    v = Verdict("x <= y")
    assert v.record(1.0, 2.0, "a") and not v.record(3.0, 2.0, "b")
    assert v.record(2.5, 2.0, "c", slack=0.6)
    assert (v.checked, v.violations, v.example, v.worst_ratio) == (3, 1, "b", 1.5)
    w = Verdict("x <= y")
    w.record(0.0, 0.0)
    w.merge(v)
    assert w.checked == 4 and w.violations == 1 and not w.passed
    assert w.line().startswith("FAIL x <= y: 4 checked, 1 violations")


def _report():
    rep = ExperimentReport({"seed": 1}, ["n", "value", "ok"])
    rep.add_row(n=np.int64(3), value=np.float64(0.1), ok=np.bool_(True))
    rep.add_row(n=4, value=math.inf, ok=False)
    rep.verdicts.append(Verdict("v", 2, 0, 0.5))
    return rep


def test_csv_cells_are_plain():
    assert to_csv(_report()) == "n,value,ok\n3,0.1,True\n4,inf,False\n"
    assert to_csv(ExperimentReport({}, ["a", "b"])) == "a,b\n"


def test_json_round_trip():
    doc = json.loads(to_json(_report()))
    assert doc["schema_version"] == SCHEMA_VERSION
    assert doc["rows"][0] == {"n": 3, "value": 0.1, "ok": True}
    assert doc["rows"][1]["value"] == "inf"
    assert doc["verdicts"][0]["passed"] is True
    assert "wall_clock" not in doc and "wall_clock" in json.loads(to_json(_report(), include_timing=True))


def test_report_rejects_unknown_columns():
    with pytest.raises(KeyError):
        _report().add_row(bogus=1)
    with pytest.raises(ValueError):
        emit(_report(), "xml")
