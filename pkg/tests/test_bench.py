import pytest

from dqforge import Category, Finding, GroundTruth, InjectionSpec, evaluate, inject_errors
from dqforge.bench import CapacityError, Layout, TruthEntry, run_bench
from dqforge.synth import bulldozers_like


def test_scaled_counts_for_10k_rows():
    spec = InjectionSpec.scaled(10_000)
    assert (spec.duplicates, spec.missing, spec.outliers) == (2, 16, 20)
    assert (spec.typo_entry, spec.typo_upper, spec.typo_lower) == (10, 5, 5)
    assert (spec.logic_wrong_category, spec.logic_incoherent_pair) == (3, 42)
    assert InjectionSpec.scaled(100_000).total == 1031


def test_spec_validation():
    with pytest.raises(ValueError):
        InjectionSpec(missing=-1)
    with pytest.raises(ValueError):
        InjectionSpec.from_json({"missing": 2, "typos": 1})


def test_zero_spec_leaves_table_alone(synth_2k):
    table, truth = inject_errors(synth_2k.table, InjectionSpec())
    assert table == synth_2k.table and len(truth) == 0


def test_injection_honours_counts_and_records_originals(synth_10k):
    spec = InjectionSpec.scaled(10_000, seed=4)
    dirty, truth = inject_errors(synth_10k.table, spec)
    assert truth.counts() == {
        "duplicate": 2, "logic-incoherent-pair": 42, "logic-wrong-category": 3,
        "missing": 16, "outlier-f1": 10, "outlier-f2": 10,
        "typo-entry": 10, "typo-lower": 5, "typo-upper": 5}
    assert dirty.n_rows == 10_002
    pos = {r: i for i, r in enumerate(dirty.row_ids)}
    for e in truth.entries:
        if e.column is None:
            continue
        assert dirty.column(e.column)[pos[e.row_id]] == e.injected
        assert synth_10k.table.column(e.column)[pos[e.row_id]] == e.original != e.injected
    # one corruption per cell site, and duplicates copy untouched rows
    cells = [(e.row_id, e.column) for e in truth.entries]
    assert len(cells) == len(set(cells))


def test_injection_is_reproducible(synth_2k):
    spec = InjectionSpec(missing=5, typo_entry=3, outliers=4, seed=9)
    a = inject_errors(synth_2k.table, spec)
    b = inject_errors(synth_2k.table, spec)
    assert a[0] == b[0] and a[1].to_json() == b[1].to_json()
    c = inject_errors(synth_2k.table, InjectionSpec(missing=5, typo_entry=3, outliers=4, seed=10))
    assert c[1].to_json() != a[1].to_json()


def test_capacity_error_when_sites_run_out(synth_2k):
    with pytest.raises(CapacityError):
        inject_errors(synth_2k.table, InjectionSpec(logic_incoherent_pair=2000))
    with pytest.raises(CapacityError):
        inject_errors(synth_2k.table, InjectionSpec(outliers=3),
                      Layout(f1_columns=(), f2_columns=()))


def _truth():
    return GroundTruth([
        TruthEntry(5, None, Category.REDUNDANCY, "duplicate", 1, 5),
        TruthEntry(7, "Price", Category.ABSENCE, "missing", 10.0, None),
        TruthEntry(9, "state", Category.TYPOGRAPHICAL, "typo-upper", "Ohio", "OHIO"),
        TruthEntry(11, "Ripper", Category.LOGIC, "logic-incoherent-pair", "Yes", "None"),
    ])


def _f(stage, row, col, cat, corrected=None, flag_only=False):
    return Finding(stage, row, [col], cat, {"rule": "t"}, None, corrected, flag_only)


def test_evaluate_counts_matches_by_row_column_and_category():
    findings = [
        _f("dedup", 5, "*", Category.REDUNDANCY),
        _f("missing", 7, "Price", Category.ABSENCE, 10.0),
        _f("typos", 9, "state", Category.OUTLIER, "Ohio"),        # wrong category
        _f("logic", 11, "Ripper", Category.LOGIC, flag_only=True),
        _f("missing", 30, "Price", Category.ABSENCE, 3.0),        # clean cell
    ]
    m = evaluate(findings, _truth())
    assert m["overall"]["true_positives"] == 3 and m["overall"]["false_positives"] == 2
    assert m["overall"]["recall"] == 0.75 and m["overall"]["precision"] == 0.6
    assert m["per_category"]["Typographical"]["recall"] == 0.0
    assert m["per_category"]["Outlier"]["precision"] == 0.0
    assert m["per_kind"]["missing"]["restored"] == 1
    assert m["per_kind"]["logic-incoherent-pair"] == {
        "truth": 1, "detected": 1, "restored": 0, "recall": 1.0}
    assert m["unmatched_findings"] == {"Absence<-clean": 1, "Outlier<-Typographical": 1}


def test_logic_finding_may_explain_a_left_over_typo():
    m = evaluate([_f("logic", 9, "state", Category.LOGIC, "Ohio")], _truth())
    assert m["per_kind"]["typo-upper"]["detected"] == 1


def test_evaluate_with_no_findings():
    m = evaluate([], _truth())
    assert m["overall"]["recall"] == 0.0 and m["overall"]["precision"] is None


def test_synthetic_table_shape_and_determinism():
    a, b = bulldozers_like(500, seed=2), bulldozers_like(500, seed=2)
    assert a.table == b.table and a.table.n_cols == 53
    assert a.table != bulldozers_like(500, seed=1).table


def test_small_bench_end_to_end():
    spec = InjectionSpec(duplicates=2, missing=6, typo_upper=2, outliers=4, seed=0)
    res = run_bench(3000, spec, seed=0)
    assert res.baseline_findings == 0
    pc = res.metrics["per_category"]
    assert pc["Redundancy"]["recall"] == pc["Absence"]["recall"] == 1.0
    assert res.metrics["overall"]["precision"] == 1.0
    assert res.to_json()["schema"] == "dqforge-bench/1"
