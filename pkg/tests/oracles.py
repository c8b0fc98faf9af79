"""Slow, obviously-correct reference implementations used as test oracles."""

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product


def osa_reference(a: str, b: str) -> int:
    """Top-down restatement of the restricted edit distance recursion."""

    @lru_cache(maxsize=None)
    def d(i: int, j: int) -> int:
        if min(i, j) == 0:
            return max(i, j)
        best = min(d(i - 1, j) + 1, d(i, j - 1) + 1,
                   d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))
        if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1]:
            best = min(best, d(i - 2, j - 2) + 1)
        return best

    return d(len(a), len(b))


def _label(attr, value):
    return f"{attr}={'⊥' if value is None else value}"


def brute_force_itemsets(rows, attrs, min_support, max_len):
    """Every itemset of up to ``max_len`` items, counted by a full scan.

    No downward-closure pruning: all value combinations over all attribute
    subsets are enumerated. Returns ``{frozenset(labels): count}``.
    """
    n = len(rows)
    domains = [sorted({r[j] for r in rows}, key=repr) for j in range(len(attrs))]
    threshold = Fraction(min_support).limit_denominator(10**9)
    out = {}
    for size in range(1, max_len + 1):
        for cols in combinations(range(len(attrs)), size):
            for values in product(*(domains[j] for j in cols)):
                count = sum(all(r[j] == v for j, v in zip(cols, values)) for r in rows)
                if count and Fraction(count, n) >= threshold:
                    out[frozenset(_label(attrs[j], v) for j, v in zip(cols, values))] = count
    return out


def brute_force_rules(rows, attrs, min_support, min_confidence, max_len):
    """``{(antecedent labels, consequent labels): (count, antecedent count)}``."""
    frequent = brute_force_itemsets(rows, attrs, min_support, max_len)
    conf = Fraction(min_confidence).limit_denominator(10**9)
    rules = {}
    for items, count in frequent.items():
        if len(items) < 2:
            continue
        for r in range(1, len(items)):
            for ante in combinations(sorted(items), r):
                a_count = frequent[frozenset(ante)]
                if Fraction(count, a_count) >= conf:
                    rules[(frozenset(ante), items - frozenset(ante))] = (count, a_count)
    return frequent, rules


def brute_force_violations(rows, attrs, antecedent, consequent):
    """Row positions matching every antecedent label but not every consequent label."""
    def holds(row, labels):
        items = {_label(a, v) for a, v in zip(attrs, row)}
        return labels <= items
    return [i for i, r in enumerate(rows) if holds(r, antecedent) and not holds(r, consequent)]
