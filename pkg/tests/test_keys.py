import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dqforge.keys import (combine_codes, discover_primary_key, factorize, is_key_like_name,
                          key_from_override, projection_duplicate_rate, search_order, KeyCandidate)
from dqforge.table import Table, profile_table


def surplus_rate(rows):
    """Brute force: complete rows minus distinct complete projections, over n."""
    complete = [r for r in rows if None not in r]
    return (len(complete) - len(set(complete))) / len(rows) if rows else 0.0


def rate_of(table, attrs):
    return projection_duplicate_rate(combine_codes([factorize(table.column(a)) for a in attrs]))


def test_key_like_names():
    assert is_key_like_name("SalesID")
    assert is_key_like_name("zip_code")
    assert not is_key_like_name("state")


def test_factorize_and_rate():
    codes = factorize(["a", None, "b", "a"])
    assert list(codes) == [0, -1, 1, 0]
    assert projection_duplicate_rate(codes) == 0.25


cell = st.one_of(st.none(), st.sampled_from(["x", "y", "z"]), st.sampled_from([1.0, 2.0]))


@st.composite
def small_tables(draw):
    n = draw(st.integers(1, 20))
    return Table({a: draw(st.lists(cell, min_size=n, max_size=n)) for a in "abcd"})


@settings(max_examples=150, deadline=None)
@given(small_tables(), st.permutations("abcd"), st.integers(1, 3))
def test_duplicate_rate_matches_brute_force_and_never_grows(table, order, k):
    smaller, larger = list(order[:k]), list(order[:k + 1])
    rows = list(zip(*(table.column(a) for a in smaller)))
    assert rate_of(table, smaller) == pytest.approx(surplus_rate(rows))
    assert rate_of(table, larger) <= rate_of(table, smaller) + 1e-12


def test_quickwin_takes_the_single_identifier():
    t = Table({"OrderID": [1, 2, 3, 4], "city": ["a", "a", "b", "b"]})
    key, cands = discover_primary_key(t, profile_table(t))
    assert key.attrs == ("OrderID",) and key.method == "quickwin"
    assert [c.attr for c in cands] == ["OrderID", "city"]


def test_search_finds_the_jointly_unique_pair():
    t = Table({"SaleID": [1, 1, 2, 2, 3], "ItemID": [7, 8, 7, 8, 7],
               "ShopID": [1, 1, 1, 1, 2], "qty": [1, 1, 1, 1, 1]})
    key, _ = discover_primary_key(t, profile_table(t), dup_threshold=0.0)
    assert key.attrs == ("SaleID", "ItemID") and key.duplicate_rate == 0.0


def test_measurements_are_never_keys():
    t = Table({"price": [1.5, 2.25, 3.75, 4.5], "grade": ["a", "a", "b", "b"]})
    key, _ = discover_primary_key(t, profile_table(t), dup_threshold=0.0)
    assert key is None


def test_columns_with_many_gaps_are_not_candidates():
    t = Table({"RowID": [1, None, 3, None], "v": [1, 1, 2, 2]})
    key, cands = discover_primary_key(t, profile_table(t), missing_threshold=0.05,
                                      dup_threshold=0.0)
    assert [c.attr for c in cands] == ["v"]
    assert key is None


def test_search_order_puts_named_combinations_first():
    cands = [KeyCandidate("a", False, 0), KeyCandidate("AID", True, 0), KeyCandidate("BID", True, 0)]
    order = list(search_order(cands, 2))
    assert order[:3] == [("AID",), ("BID",), ("a",)]
    assert order[3] == ("AID", "BID")
    assert len(order) == 6


def test_override_reports_its_rate():
    t = Table({"a": [1, 1, 2], "b": [1, 1, 1]})
    key = key_from_override(t, ["a"])
    assert key.method == "override" and key.duplicate_rate == pytest.approx(1 / 3)
    with pytest.raises(KeyError):
        key_from_override(t, ["zzz"])


def test_synthetic_sales_table_key(synth_10k):
    t = synth_10k.table
    key, _ = discover_primary_key(t, profile_table(t))
    assert key.attrs == ("SalesID", "ModelID")
    assert rate_of(t, ["SalesID"]) > 0.05
    assert np.isclose(key.duplicate_rate, 0.0)
