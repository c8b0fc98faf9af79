"""Logic errors: records that break rules the rest of the table almost
always follows.

Rules are mined with a level-wise Apriori over ``attr=value`` items, where a
missing cell is the item ``attr=⊥``. A rule that holds for at least
``min_confidence`` of the rows matching its antecedent, but not for all of
them, singles out the rows where it fails; their consequent cells are the
suspected errors.

Each row holds exactly one item per attribute, so an itemset never needs two
items of the same attribute. Itemsets are kept as tuples ordered by
attribute, and supports for all itemsets over one attribute combination are
counted in a single vectorized pass over the encoded columns.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .report import Category, Finding, StageResult, Warning
from .table import Cell, Table

MISSING_ITEM = "⊥"

Item = tuple[int, int]          # (attribute index, value code)
Itemset = tuple[Item, ...]       # sorted by attribute index


class LogicTimeout(RuntimeError):
    pass


@dataclass
class Transactions:
    """Integer-coded view of the logic attributes: one row per record.

    ``codes[j][i]`` is the value code of attribute ``attrs[j]`` in row ``i``;
    ``values[j][code]`` is the cell value that code stands for (``None`` for
    the missing item).
    """

    attrs: list[str]
    codes: list[np.ndarray]
    values: list[list[Cell]]
    row_ids: list[int]

    @property
    def n(self) -> int:
        return len(self.row_ids)

    def item_label(self, item: Item) -> str:
        a, c = item
        v = self.values[a][c]
        return f"{self.attrs[a]}={MISSING_ITEM if v is None else v}"

    def item_value(self, item: Item) -> Cell:
        return self.values[item[0]][item[1]]

    def transaction(self, i: int) -> frozenset[str]:
        return frozenset(self.item_label((j, int(self.codes[j][i]))) for j in range(len(self.attrs)))

    def mask(self, itemset: Itemset) -> np.ndarray:
        m = np.ones(self.n, dtype=bool)
        for a, c in itemset:
            m &= self.codes[a] == c
        return m


def encode_records(table: Table, logic_attrs: Sequence[str]) -> Transactions:
    if not logic_attrs:
        raise ValueError("logic_attrs must not be empty")
    codes, values = [], []
    for a in logic_attrs:
        lookup: dict[Cell, int] = {}
        col = table.column(a)
        arr = np.empty(len(col), dtype=np.int64)
        for i, v in enumerate(col):
            code = lookup.get(v)
            if code is None:
                code = lookup[v] = len(lookup)
            arr[i] = code
        codes.append(arr)
        values.append(list(lookup))
    return Transactions(list(logic_attrs), codes, values, table.row_ids)


@dataclass(frozen=True)
class AssociationRule:
    antecedent: Itemset
    consequent: Itemset
    support: float         # of antecedent ∪ consequent
    confidence: float
    count: int             # rows matching antecedent ∪ consequent
    antecedent_count: int

    @property
    def items(self) -> Itemset:
        return tuple(sorted(self.antecedent + self.consequent))

    @property
    def violations(self) -> int:
        return self.antecedent_count - self.count

    def describe(self, tx: Transactions) -> dict:
        return {
            "antecedent": [tx.item_label(i) for i in self.antecedent],
            "consequent": [tx.item_label(i) for i in self.consequent],
            "support": self.support, "confidence": self.confidence,
            "count": self.count, "antecedent_count": self.antecedent_count,
        }


@dataclass
class AprioriResult:
    frequent: dict[Itemset, int]            # itemset -> support count
    rules: list[AssociationRule]
    levels: list[int] = field(default_factory=list)


def _count_level(tx: Transactions, candidates: list[Itemset], deadline: float | None
                 ) -> dict[Itemset, int]:
    by_attrs: dict[tuple[int, ...], list[Itemset]] = {}
    for cand in candidates:
        by_attrs.setdefault(tuple(a for a, _ in cand), []).append(cand)
    counts: dict[Itemset, int] = {}
    for attrs, cands in by_attrs.items():
        if deadline is not None and time.monotonic() > deadline:
            raise LogicTimeout
        radix = [len(tx.values[a]) for a in attrs]
        joint = np.zeros(tx.n, dtype=np.int64)
        for a, r in zip(attrs, radix):
            joint = joint * r + tx.codes[a]
        keys, freq = np.unique(joint, return_counts=True)
        wanted = np.zeros(len(cands), dtype=np.int64)
        for idx, cand in enumerate(cands):
            k = 0
            for (a, c), r in zip(cand, radix):
                k = k * r + c
            wanted[idx] = k
        pos = np.searchsorted(keys, wanted)
        pos_c = np.minimum(pos, keys.size - 1)
        hit = keys[pos_c] == wanted
        for cand, h, p in zip(cands, hit, pos_c):
            counts[cand] = int(freq[p]) if h else 0
    return counts


def _join(prev: list[Itemset], prev_set: set[Itemset]) -> list[Itemset]:
    """Prefix join of sorted (k-1)-itemsets, then prune by downward closure."""
    by_prefix: dict[Itemset, list[Item]] = {}
    for s in prev:
        by_prefix.setdefault(s[:-1], []).append(s[-1])
    out = []
    for prefix, tails in by_prefix.items():
        tails.sort()
        for i, x in enumerate(tails):
            for y in tails[i + 1:]:
                if y[0] == x[0]:
                    continue  # two values of one attribute never co-occur
                cand = prefix + (x, y)
                if all(cand[:j] + cand[j + 1:] in prev_set for j in range(len(cand) - 2)):
                    out.append(cand)
    return out


def frequent_itemsets(tx: Transactions, min_support: float = 0.0033, max_len: int = 3,
                      deadline: float | None = None) -> tuple[dict[Itemset, int], list[int]]:
    n = tx.n
    if n == 0:
        return {}, []
    min_count = max(1, math.ceil(min_support * n - 1e-9))
    frequent: dict[Itemset, int] = {}
    level: list[Itemset] = []
    for a, codes in enumerate(tx.codes):
        for c, cnt in enumerate(np.bincount(codes, minlength=len(tx.values[a]))):
            if cnt >= min_count:
                s = ((a, c),)
                frequent[s] = int(cnt)
                level.append(s)
    level.sort()
    sizes = [len(level)]
    k = 1
    while level and k < max_len:
        cands = _join(level, set(level))
        if not cands:
            break
        counts = _count_level(tx, cands, deadline)
        level = sorted(s for s in cands if counts[s] >= min_count)
        for s in level:
            frequent[s] = counts[s]
        sizes.append(len(level))
        k += 1
    return frequent, sizes


def generate_rules(tx: Transactions, frequent: dict[Itemset, int],
                   min_confidence: float = 0.99) -> list[AssociationRule]:
    n = tx.n
    rules = []
    for itemset, cnt in frequent.items():
        if len(itemset) < 2:
            continue
        for r in range(1, len(itemset)):
            for ante in combinations(itemset, r):
                a_cnt = frequent[ante]
                conf = cnt / a_cnt
                if conf + 1e-12 >= min_confidence:
                    cons = tuple(i for i in itemset if i not in ante)
                    rules.append(AssociationRule(ante, cons, cnt / n, conf, cnt, a_cnt))
    rules.sort(key=lambda r: (-r.support, -r.confidence,
                              [tx.item_label(i) for i in r.antecedent],
                              [tx.item_label(i) for i in r.consequent]))
    return rules


def apriori(tx: Transactions, min_support: float = 0.0033, min_confidence: float = 0.99,
            max_len: int = 3, deadline: float | None = None) -> AprioriResult:
    if not (0 < min_support <= 1 and 0 < min_confidence <= 1):
        raise ValueError("thresholds must lie in (0, 1]")
    if max_len < 2:
        raise ValueError("max_len must be at least 2")
    frequent, sizes = frequent_itemsets(tx, min_support, max_len, deadline)
    return AprioriResult(frequent, generate_rules(tx, frequent, min_confidence), sizes)


def select_violable_rules(rules: Sequence[AssociationRule]) -> list[AssociationRule]:
    """Keep the rules that hold almost always but not always."""
    return [r for r in rules if r.count < r.antecedent_count]


@dataclass
class LogicFinding:
    position: int
    row_id: int
    rule: AssociationRule
    columns: list[str]
    observed: list[Cell]
    proposed: list[Cell]


def flag_violations(tx: Transactions, rules: Sequence[AssociationRule]) -> list[LogicFinding]:
    out = []
    for rule in rules:
        ante = tx.mask(rule.antecedent)
        bad = ante & ~tx.mask(rule.consequent)
        cols = [tx.attrs[a] for a, _ in rule.consequent]
        proposed = [tx.item_value(i) for i in rule.consequent]
        for pos in np.flatnonzero(bad):
            observed = [tx.values[a][tx.codes[a][pos]] for a, _ in rule.consequent]
            out.append(LogicFinding(int(pos), tx.row_ids[pos], rule, cols, observed, proposed))
    return out


def _suspect_filter(violations: Sequence[LogicFinding]
                    ) -> tuple[list[LogicFinding], list[LogicFinding], dict]:
    """Drop violations whose antecedent rests on a cell that is itself suspect.

    A corrupted cell makes the rules that predict it fail, but it also matches
    rare antecedents of its own, which then point at correct neighbours. In
    each row, every single-consequent violation casts a vote on its target
    cell; a violation is discarded when one of its antecedent cells has at
    least as many votes as its own target.

    Returns the kept violations, the dropped ones and the vote table
    ``{(position, attribute index): votes}``.
    """
    votes: dict[tuple[int, int], int] = {}
    for v in violations:
        if len(v.rule.consequent) == 1:
            key = (v.position, v.rule.consequent[0][0])
            votes[key] = votes.get(key, 0) + 1
    kept, dropped = [], []
    for v in violations:
        targets = [(v.position, a) for a, _ in v.rule.consequent]
        strength = min(votes.get(t, 0) for t in targets)
        if any(votes.get((v.position, a), 0) >= max(strength, 1) for a, _ in v.rule.antecedent):
            dropped.append(v)
        else:
            kept.append(v)
    return kept, dropped, votes


def correct_violations(table: Table, tx: Transactions, violations: Sequence[LogicFinding]
                       ) -> StageResult:
    """Turn rule violations into one finding per suspected cell and apply the
    unambiguous single-consequent corrections."""
    kept, dropped, votes = _suspect_filter(violations)
    by_cell: dict[tuple[int, str], list[LogicFinding]] = {}
    multi: dict[tuple[int, tuple[str, ...]], list[LogicFinding]] = {}
    for v in kept:
        if len(v.columns) == 1:
            by_cell.setdefault((v.position, v.columns[0]), []).append(v)
        else:
            # only the consequent cells that actually disagree are suspect
            bad = tuple(c for c, o, p in zip(v.columns, v.observed, v.proposed) if o != p)
            multi.setdefault((v.position, bad), []).append(v)

    updates: dict[tuple[int, str], Cell] = {}
    findings, warnings = [], []
    for (pos, attr), vs in sorted(by_cell.items()):
        props = {_freeze(v.proposed[0]) for v in vs}
        path = {"rule": "association-rule-violation", "rules": [v.rule.describe(tx) for v in vs]}
        row_id = vs[0].row_id
        if len(props) == 1:
            updates[(pos, attr)] = vs[0].proposed[0]
            findings.append(Finding("logic", row_id, [attr], Category.LOGIC, path,
                                    vs[0].observed[0], vs[0].proposed[0]))
        else:
            shown = sorted(MISSING_ITEM if _thaw(p) is None else str(_thaw(p)) for p in props)
            warnings.append(Warning("logic", {"row_id": row_id, "attr": attr},
                                    "conflicting-rules",
                                    f"row {row_id}, {attr}: rules disagree on the "
                                    f"correction ({', '.join(shown)}); left unchanged"))
            path["not_corrected"] = "conflicting rules"
            findings.append(Finding("logic", row_id, [attr], Category.LOGIC, path,
                                    vs[0].observed[0], flag_only=True))
    covered = {cell for cell in by_cell}
    for (pos, cols), vs in sorted(multi.items()):
        if all((pos, c) in covered for c in cols):
            continue  # already reported cell by cell
        path = {"rule": "association-rule-violation", "rules": [v.rule.describe(tx) for v in vs],
                "not_corrected": "multi-item consequent"}
        observed = [tx.values[tx.attrs.index(c)][tx.codes[tx.attrs.index(c)][pos]] for c in cols]
        findings.append(Finding("logic", vs[0].row_id, list(cols), Category.LOGIC, path,
                                observed, flag_only=True))
    # rows whose every violation was dropped: the rules accuse each other's
    # cells equally, so the culprit is unknown and only the tie is reported
    accused = {v.position for v in kept}
    ambiguous: dict[int, list[LogicFinding]] = {}
    for v in dropped:
        if v.position not in accused:
            ambiguous.setdefault(v.position, []).append(v)
    for pos, vs in sorted(ambiguous.items()):
        row_votes = {a: n for (p, a), n in votes.items() if p == pos}
        if not row_votes:
            continue
        top = max(row_votes.values())
        cols = [tx.attrs[a] for a in sorted(a for a, n in row_votes.items() if n == top)]
        path = {"rule": "association-rule-violation", "rules": [v.rule.describe(tx) for v in vs],
                "not_corrected": "rules accuse each other's cells equally"}
        observed = [tx.values[tx.attrs.index(c)][tx.codes[tx.attrs.index(c)][pos]] for c in cols]
        findings.append(Finding("logic", vs[0].row_id, cols, Category.LOGIC, path, observed,
                                flag_only=True))
    return StageResult(table.with_cells(updates) if updates else table, findings, warnings,
                       details={"corrected_cells": len(updates),
                                "suppressed_violations": len(dropped),
                                "ambiguous_rows": len(ambiguous)})


_NONE = ("__none__",)


def _freeze(v):
    return _NONE if v is None else v


def _thaw(v):
    return None if v == _NONE else v


@dataclass(frozen=True)
class LogicConfig:
    min_support: float = 0.0033
    min_confidence: float = 0.99
    max_len: int = 3
    timeout: float = 3600.0


def run_logic(table: Table, attrs: Sequence[str], config: LogicConfig = LogicConfig()
              ) -> StageResult:
    if not attrs:
        return StageResult(table, warnings=[Warning("logic", {}, "no-attributes",
                                                    "no column qualifies for rule mining")])
    deadline = time.monotonic() + config.timeout if config.timeout else None
    tx = encode_records(table, attrs)
    try:
        mined = apriori(tx, config.min_support, config.min_confidence, config.max_len, deadline)
    except LogicTimeout:
        return StageResult(table, warnings=[Warning(
            "logic", {}, "timeout",
            f"rule mining exceeded {config.timeout:g} s; logic stage abandoned")],
            details={"timed_out": True})
    violable = select_violable_rules(mined.rules)
    violations = flag_violations(tx, violable)
    res = correct_violations(table, tx, violations)
    res.details.update({
        "frequent_itemsets_per_level": mined.levels,
        "rules": len(mined.rules),
        "violable_rules": len(violable),
        "violations": len(violations),
        "timed_out": False,
    })
    return res
