"""Error injection and scoring against known ground truth.

The harness corrupts a clean table with the error taxonomy used for the
auction-equipment experiments (duplicates, missing values, aberrant numbers,
three kinds of typing mistakes, and two kinds of incoherent records), runs
the pipeline on the result and scores the findings cell by cell.

Injection sites are disjoint at row level: a corrupted row carries exactly
one injected error, which keeps the scoring unambiguous when one defect
triggers findings in more than one stage.
"""

from __future__ import annotations

import json
import math
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .pipeline import RunConfig, run_pipeline
from .report import Category, Finding
from .seeding import rng_for
from .synth import (F1_COLUMNS, F2_COLUMNS, KEY_COLUMNS, NUMERIC_COLUMNS,
                    TYPO_COLUMNS, bulldozers_like)
from .table import Cell, Table, numeric_array


class CapacityError(ValueError):
    """The table has too few eligible sites for the requested injection."""


# per 100k rows, by error kind
REFERENCE_COUNTS = {
    "duplicates": 20, "missing": 161, "outliers": 200,
    "typo_entry": 100, "typo_upper": 50, "typo_lower": 50,
    "logic": 450,
}
# split of the logic budget between the two kinds
_WRONG_CATEGORY_SHARE = 25 / 450


def _half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class InjectionSpec:
    duplicates: int = 0
    missing: int = 0
    outliers: int = 0
    typo_entry: int = 0
    typo_upper: int = 0
    typo_lower: int = 0
    logic_wrong_category: int = 0
    logic_incoherent_pair: int = 0
    seed: int = 0

    def __post_init__(self):
        for k, v in asdict(self).items():
            if k != "seed" and (not isinstance(v, int) or v < 0):
                raise ValueError(f"{k} must be a non-negative integer")

    @classmethod
    def scaled(cls, n_rows: int, seed: int = 0) -> "InjectionSpec":
        """Counts in the proportions of the reference corruption, for n_rows."""
        f = n_rows / 100_000
        logic = _half_up(REFERENCE_COUNTS["logic"] * f)
        wrong = _half_up(logic * _WRONG_CATEGORY_SHARE)
        return cls(
            duplicates=_half_up(REFERENCE_COUNTS["duplicates"] * f),
            missing=_half_up(REFERENCE_COUNTS["missing"] * f),
            outliers=_half_up(REFERENCE_COUNTS["outliers"] * f),
            typo_entry=_half_up(REFERENCE_COUNTS["typo_entry"] * f),
            typo_upper=_half_up(REFERENCE_COUNTS["typo_upper"] * f),
            typo_lower=_half_up(REFERENCE_COUNTS["typo_lower"] * f),
            logic_wrong_category=wrong, logic_incoherent_pair=logic - wrong, seed=seed)

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "InjectionSpec":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown injection field(s): {sorted(unknown)}")
        return cls(**data)

    @property
    def total(self) -> int:
        return sum(v for k, v in asdict(self).items() if k != "seed")


@dataclass(frozen=True)
class Layout:
    """Which columns each kind of error may be injected into.

    ``rule_source`` is the column whose value determines the configuration
    columns; logic injections are capped per value of it so that every
    planted rule stays near-perfect after corruption.
    """

    missing_columns: tuple[str, ...] = NUMERIC_COLUMNS
    f1_columns: tuple[str, ...] = F1_COLUMNS
    f2_columns: tuple[str, ...] = F2_COLUMNS
    f1_share: float = 0.5
    typo_columns: tuple[str, ...] = TYPO_COLUMNS
    typo_min_count: int = 30
    typo_max_variant: int = 3
    wrong_category_column: str = "ProductGroupDesc"
    incoherent_columns: tuple[str, ...] = ("Drive_System", "Transmission", "Hydraulics",
                                           "Enclosure", "Pad_Type", "ProductSize", "Ripper")
    rule_source: str = "fiBaseModel"
    max_rule_violation: float = 0.01
    key_columns: tuple[str, ...] = KEY_COLUMNS


@dataclass(frozen=True)
class TruthEntry:
    row_id: int
    column: str | None          # None for whole-row errors (duplicates)
    category: Category
    kind: str
    original: Any
    injected: Any


@dataclass
class GroundTruth:
    entries: list[TruthEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def counts(self) -> dict[str, int]:
        return dict(sorted(Counter(e.kind for e in self.entries).items()))

    def to_json(self) -> list[dict]:
        return [{"row_id": e.row_id, "column": e.column, "category": e.category.value,
                 "kind": e.kind, "original": e.original, "injected": e.injected}
                for e in self.entries]


class _Sites:
    """Hands out row positions, each at most once."""

    def __init__(self, n: int, rng: np.random.Generator):
        self.order = [int(i) for i in rng.permutation(n)]
        self.used: set[int] = set()

    def free(self):
        return (i for i in self.order if i not in self.used)

    def take(self, i: int) -> None:
        self.used.add(i)


def _edit_once(word: str, rng: np.random.Generator) -> str:
    """One random adjacent transposition, substitution, insertion or deletion."""
    letters = [i for i, ch in enumerate(word) if ch.isalpha()]
    op = rng.choice(["transpose", "substitute", "insert", "delete"])
    i = letters[int(rng.integers(len(letters)))]
    repl = "abcdefghijklmnopqrstuvwxyz"
    if word[i].isupper():
        repl = repl.upper()
    ch = repl[int(rng.integers(26))]
    if op == "transpose" and i + 1 < len(word) and word[i + 1].isalpha():
        return word[:i] + word[i + 1] + word[i] + word[i + 2:]
    if op == "insert":
        return word[:i] + ch + word[i:]
    if op == "delete" and len(word) > 4:
        return word[:i] + word[i + 1:]
    return word[:i] + ch + word[i + 1:]


def inject_errors(table: Table, spec: InjectionSpec, layout: Layout = Layout()
                  ) -> tuple[Table, GroundTruth]:
    if spec.total == 0:
        return table, GroundTruth()
    rng = rng_for(spec.seed, "inject")
    n = table.n_rows
    sites = _Sites(n, rng)
    updates: dict[tuple[int, str], Cell] = {}
    truth: list[TruthEntry] = []
    row_ids = table.row_ids

    def put(pos, col, value, category, kind):
        sites.take(pos)
        updates[(pos, col)] = value
        truth.append(TruthEntry(row_ids[pos], col, category, kind, table.column(col)[pos], value))

    # logic first: it has the tightest capacity
    source = table.column(layout.rule_source)
    per_source = Counter(source)
    budget = {(s, c): int(math.floor(layout.max_rule_violation * k + 1e-9))
              for s, k in per_source.items()
              for c in (layout.wrong_category_column, *layout.incoherent_columns)}

    def logic_pass(count, columns, kind):
        if count == 0:
            return
        vocab = {c: sorted({v for v in table.column(c) if v is not None}) for c in columns}
        done = 0
        for pos in sites.free():
            col = columns[int(rng.integers(len(columns)))] if len(columns) > 1 else columns[0]
            cur = table.column(col)[pos]
            key = (source[pos], col)
            if cur is None or budget.get(key, 0) < 1 or len(vocab[col]) < 2:
                continue
            others = [v for v in vocab[col] if v != cur]
            budget[key] -= 1
            put(pos, col, others[int(rng.integers(len(others)))], Category.LOGIC, kind)
            done += 1
            if done == count:
                return
        raise CapacityError(f"{kind}: only {done} of {count} sites available")

    logic_pass(spec.logic_wrong_category, (layout.wrong_category_column,),
               "logic-wrong-category")
    logic_pass(spec.logic_incoherent_pair, layout.incoherent_columns, "logic-incoherent-pair")

    # aberrant numbers
    n_f1 = _half_up(spec.outliers * layout.f1_share) if layout.f2_columns else spec.outliers
    if not layout.f1_columns:
        n_f1 = 0
    n_f2 = spec.outliers - n_f1
    stats = {}
    for col in (*layout.f1_columns, *layout.f2_columns):
        x = numeric_array(table.column(col))
        x = x[~np.isnan(x)]
        stats[col] = (float(x.mean()), float(x.std(ddof=1)), float(x.min()), float(x.max()))

    def outlier_pass(count, columns, make, kind):
        if count == 0:
            return
        if not columns:
            raise CapacityError(f"{kind}: no eligible column")
        free = sites.free()
        for k in range(count):
            col = columns[k % len(columns)]
            pos = next((p for p in free if table.column(col)[p] is not None), None)
            if pos is None:
                raise CapacityError(f"{kind}: ran out of rows")
            put(pos, col, make(col), Category.OUTLIER, kind)

    def far_from_mean(col):
        mu, sd, _, _ = stats[col]
        sign = 1.0 if rng.random() < 0.5 else -1.0
        return float(round(mu + sign * rng.uniform(8.0, 10.0) * sd))

    def beyond_range(col):
        _, _, lo, hi = stats[col]
        return float(round(hi + rng.uniform(0.5, 3.0) * (hi - lo)))

    outlier_pass(n_f1, layout.f1_columns, far_from_mean, "outlier-f1")
    outlier_pass(n_f2, layout.f2_columns, beyond_range, "outlier-f2")

    # typing mistakes, only into frequent values, each variant a few times at most
    variants: Counter = Counter()

    def typo_pass(count, transform, kind):
        if count == 0:
            return
        existing = {c: {v.casefold() for v in table.column(c) if isinstance(v, str)}
                    for c in layout.typo_columns}
        freq = {c: Counter(v for v in table.column(c) if isinstance(v, str))
                for c in layout.typo_columns}
        done = 0
        for pos in sites.free():
            col = layout.typo_columns[int(rng.integers(len(layout.typo_columns)))]
            cur = table.column(col)[pos]
            if not isinstance(cur, str) or freq[col][cur] < layout.typo_min_count:
                continue
            new = transform(cur)
            if new == cur or variants[(col, new)] >= layout.typo_max_variant:
                continue
            if kind == "typo-entry" and new.casefold() in existing[col]:
                continue
            if kind != "typo-entry" and new in freq[col]:
                continue
            variants[(col, new)] += 1
            put(pos, col, new, Category.TYPOGRAPHICAL, kind)
            done += 1
            if done == count:
                return
        raise CapacityError(f"{kind}: only {done} of {count} sites available")

    typo_pass(spec.typo_entry, lambda w: _edit_once(w, rng), "typo-entry")
    typo_pass(spec.typo_upper, str.upper, "typo-upper")
    typo_pass(spec.typo_lower, str.lower, "typo-lower")

    # missing cells
    if spec.missing:
        cols = [c for c in layout.missing_columns if c in table.attributes]
        free = sites.free()
        for k in range(spec.missing):
            col = cols[k % len(cols)]
            pos = next((p for p in free if table.column(col)[p] is not None), None)
            if pos is None:
                raise CapacityError("missing: ran out of rows")
            put(pos, col, None, Category.ABSENCE, "missing")

    corrupted = table.with_cells(updates) if updates else table

    # duplicates: exact copies of untouched rows, appended with fresh row ids
    if spec.duplicates:
        sources = []
        for pos in sites.free():
            sources.append(pos)
            sites.take(pos)
            if len(sources) == spec.duplicates:
                break
        if len(sources) < spec.duplicates:
            raise CapacityError("duplicates: ran out of rows")
        next_id = max(row_ids) + 1 if row_ids else 0
        new_ids = list(range(next_id, next_id + len(sources)))
        cols = {a: corrupted.column(a) + [corrupted.column(a)[p] for p in sources]
                for a in corrupted.attributes}
        corrupted = Table(cols, row_ids + new_ids)
        for p, rid in zip(sources, new_ids):
            truth.append(TruthEntry(rid, None, Category.REDUNDANCY, "duplicate",
                                    row_ids[p], rid))

    truth.sort(key=lambda e: (e.row_id, e.column or ""))
    return corrupted, GroundTruth(truth)


# finding category -> truth categories it can account for
COMPATIBLE = {
    Category.REDUNDANCY: {Category.REDUNDANCY},
    Category.ABSENCE: {Category.ABSENCE},
    Category.OUTLIER: {Category.OUTLIER},
    Category.TYPOGRAPHICAL: {Category.TYPOGRAPHICAL},
    # missing text is deferred to the rule miner, and a typo the typo stage
    # left in place can still break a rule
    Category.LOGIC: {Category.LOGIC, Category.ABSENCE, Category.TYPOGRAPHICAL},
}


def _matches(f: Finding, e: TruthEntry) -> bool:
    if e.category not in COMPATIBLE[f.category]:
        return False
    if e.category is Category.REDUNDANCY:
        return f.row_id == e.row_id
    return f.row_id == e.row_id and e.column in f.columns


def _prf(tp_truth: int, n_truth: int, tp_found: int, n_found: int) -> dict[str, Any]:
    recall = tp_truth / n_truth if n_truth else None
    precision = tp_found / n_found if n_found else None
    if recall is None or precision is None or recall + precision == 0:
        f1 = None if recall is None or precision is None else 0.0
    else:
        f1 = 2 * recall * precision / (recall + precision)
    return {"truth": n_truth, "found": n_found, "true_positives": tp_truth,
            "false_negatives": n_truth - tp_truth, "false_positives": n_found - tp_found,
            "recall": recall, "precision": precision, "f1": f1}


def evaluate(findings: Sequence[Finding], truth: GroundTruth) -> dict[str, Any]:
    """Per-category recall, precision and F1, plus per-kind recall.

    A finding accounts for a truth entry when they name the same row and a
    column of the finding is the corrupted column (row only, for duplicates)
    and their categories are compatible.
    """
    by_row: dict[int, list[TruthEntry]] = {}
    for e in truth.entries:
        by_row.setdefault(e.row_id, []).append(e)
    hit_truth: set[int] = set()
    exact: set[int] = set()
    finding_ok = []
    index = {id(e): i for i, e in enumerate(truth.entries)}
    for f in findings:
        ok = False
        for e in by_row.get(f.row_id, ()):
            if _matches(f, e):
                ok = True
                i = index[id(e)]
                hit_truth.add(i)
                if e.category is not Category.REDUNDANCY and not f.flag_only \
                        and f.corrected == e.original:
                    exact.add(i)
        finding_ok.append(ok)

    per_category = {}
    for cat in Category:
        idx = [i for i, e in enumerate(truth.entries) if e.category is cat]
        fs = [ok for f, ok in zip(findings, finding_ok) if f.category is cat]
        per_category[cat.value] = _prf(sum(i in hit_truth for i in idx), len(idx),
                                       sum(fs), len(fs))
    per_kind = {}
    for kind in sorted({e.kind for e in truth.entries}):
        idx = [i for i, e in enumerate(truth.entries) if e.kind == kind]
        per_kind[kind] = {"truth": len(idx), "detected": sum(i in hit_truth for i in idx),
                          "restored": sum(i in exact for i in idx),
                          "recall": sum(i in hit_truth for i in idx) / len(idx)}
    cross = Counter()
    for f, ok in zip(findings, finding_ok):
        if ok:
            continue
        other = [e for e in by_row.get(f.row_id, ()) if e.column is None or e.column in f.columns]
        label = other[0].category.value if other else "clean"
        cross[f"{f.category.value}<-{label}"] += 1
    return {
        "overall": _prf(len(hit_truth), len(truth.entries), sum(finding_ok), len(findings)),
        "per_category": per_category,
        "per_kind": per_kind,
        "unmatched_findings": dict(sorted(cross.items())),
    }


@dataclass
class BenchResult:
    rows: int
    seed: int
    spec: InjectionSpec
    baseline_findings: int
    metrics: dict[str, Any]
    timings: dict[str, float]
    truth: GroundTruth
    exit_code: int

    def to_json(self) -> dict[str, Any]:
        return {
            "schema": "dqforge-bench/1",
            "rows": self.rows, "seed": self.seed, "spec": asdict(self.spec),
            "injected": self.truth.counts(),
            "baseline_findings": self.baseline_findings,
            "metrics": self.metrics,
            "timings": self.timings,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, allow_nan=False) + "\n"


def run_bench(rows: int = 10_000, spec: InjectionSpec | None = None, seed: int = 0,
              config: RunConfig | None = None, check_baseline: bool = True) -> BenchResult:
    """Generate a clean table, corrupt it, clean it and score the result."""
    spec = spec or InjectionSpec.scaled(rows, seed)
    config = config or RunConfig(seed=seed)
    clean = bulldozers_like(rows, seed=seed).table
    baseline = len(run_pipeline(clean, config).findings) if check_baseline else -1
    corrupted, truth = inject_errors(clean, spec)
    t0 = time.perf_counter()
    result = run_pipeline(corrupted, config)
    timings = dict(result.timings, total=time.perf_counter() - t0)
    metrics = evaluate(result.findings, truth)
    return BenchResult(rows, seed, spec, baseline, metrics, timings, truth, result.exit_code)
