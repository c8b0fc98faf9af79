import json

import pytest

from dqforge import (Category, Finding, RunConfig, Warning, build_report, dumps_report,
                     run_pipeline)
from dqforge.report import STAGES
from dqforge.table import Table


def _small_table():
    n = 300
    return Table({
        "SalesID": [1000 + i for i in range(n)],
        "Price": [float(100 + (i * 37) % 50) for i in range(n)],
        "Colour": [["Red", "Blue", "Green"][i % 3] for i in range(n)],
    })


def _finding(stage, row, col="a", **kw):
    return Finding(stage, row, [col], kw.pop("category", Category.ABSENCE),
                   {"rule": "test"}, None, 1.0, **kw)


def test_finding_requires_columns_rule_and_known_stage():
    with pytest.raises(ValueError):
        Finding("missing", 0, [], Category.ABSENCE, {"rule": "x"}, None)
    with pytest.raises(ValueError):
        Finding("missing", 0, ["a"], Category.ABSENCE, {}, None)
    with pytest.raises(ValueError):
        Finding("cleanup", 0, ["a"], Category.ABSENCE, {"rule": "x"}, None)


def test_report_orders_findings_and_counts_categories():
    fs = [_finding("logic", 3, category=Category.LOGIC, flag_only=True),
          _finding("missing", 9), _finding("missing", 2), _finding("dedup", 5,
                                                                   category=Category.REDUNDANCY)]
    ws = [Warning("typos", {"attr": "b"}, "skipped", "m"), Warning("dedup", {}, "no-key", "m")]
    rep = build_report(fs, ws, plan=None, key=None, config={})
    assert list(rep["findings"]) == list(STAGES)
    assert [f["row_id"] for f in rep["findings"]["missing"]] == [2, 9]
    assert rep["findings"]["logic"][0]["corrected"] is None
    assert rep["categories"]["Absence"] == {"count": 2, "corrected": 2, "flag_only": 0}
    assert rep["categories"]["Logic"] == {"count": 1, "corrected": 0, "flag_only": 1}
    assert [w["stage"] for w in rep["warnings"]] == ["dedup", "typos"]
    # input order does not leak into the document
    assert dumps_report(build_report(fs[::-1], ws[::-1], plan=None, key=None, config={})) \
        == dumps_report(rep)


def test_report_serializes_non_finite_values():
    f = Finding("outliers", 0, ["x"], Category.OUTLIER, {"z": float("inf"), "s": float("nan")},
                float("-inf"), 0.0)
    text = dumps_report(build_report([f], [], plan=None, key=None, config={}))
    doc = json.loads(text)["findings"]["outliers"][0]
    assert doc["rule_path"] == {"z": "inf", "s": None} and doc["original"] == "-inf"


def test_pipeline_on_clean_small_table():
    res = run_pipeline(_small_table())
    assert res.report["schema"] == "dqforge/1" and res.report["status"] == "ok"
    assert res.report["primary_key"] == ["SalesID"]
    assert res.findings == []
    # three colours are too few to mine rules from
    assert [w.reason for w in res.warnings] == ["no-attributes"] and res.exit_code == 2
    assert res.report["timings"] is None


def test_pipeline_corrects_a_missing_price_and_a_duplicate():
    t = _small_table()
    cols = {a: t.column(a) for a in t.attributes}
    cols["Price"][10] = None
    for a in cols:
        cols[a].append(cols[a][40])
    res = run_pipeline(Table(cols), RunConfig(report_timings=True))
    got = {(f.stage, f.row_id) for f in res.findings}
    assert ("missing", 10) in got and ("dedup", 300) in got
    assert res.table.n_rows == 300
    assert res.table.column("Price")[10] == pytest.approx((cols["Price"][9] + cols["Price"][11]) / 2)
    assert set(res.report["timings"]) >= {"pre_quality", *STAGES}


def test_disabled_stage_is_reported_as_skipped():
    t = _small_table()
    cols = {a: t.column(a) for a in t.attributes}
    cols["Price"][10] = None
    res = run_pipeline(Table(cols), RunConfig(disable=["missing"]))
    assert res.report["stages"]["missing"] == {"skipped": True, "reason": "disabled"}
    assert all(f.stage != "missing" for f in res.findings)


def test_stage_failure_gives_partial_report_and_exit_1(monkeypatch):
    import dqforge.pipeline as pipeline

    def boom(*a, **k):
        raise RuntimeError("broken detector")
    monkeypatch.setattr(pipeline, "run_outliers", boom)
    seen = []
    res = run_pipeline(_small_table(), progress=lambda s, info: seen.append((s, info)))
    assert res.exit_code == 1 and res.report["status"] == "error"
    assert "broken detector" in res.report["error"]
    assert res.report["stages"]["outliers"]["failed"] is True
    assert res.report["stages"]["typos"]["reason"] == "earlier stage failed"
    assert [s for s, _ in seen] == ["pre_quality", "dedup", "missing", "outliers"]


def test_progress_is_called_for_every_stage():
    seen = []
    run_pipeline(_small_table(), progress=lambda s, info: seen.append(s))
    assert seen == ["pre_quality", *STAGES]


@pytest.mark.parametrize("kw", [{"disable": ["spelling"]}, {"beta1": 0}, {"min_support": 0},
                                {"cluster_count": "vote"}, {"threads": 0}])
def test_run_config_rejects_bad_values(kw):
    with pytest.raises(ValueError):
        RunConfig(**kw)


def test_warnings_give_exit_code_2():
    t = Table({"a": ["x", "y"] * 20, "b": ["p", "q"] * 20})
    res = run_pipeline(t)
    assert res.exit_code == 2
    assert "no-primary-key" in {w["reason"] for w in res.report["warnings"]}
