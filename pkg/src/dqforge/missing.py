"""Missing-value handling.

Every missing cell gets exactly one treatment:

* key column            -> a unique placeholder token
* column > 95% missing  -> left alone, one warning for the column
* numeric column        -> linear interpolation on row position
* anything else         -> left for the logic stage, where "attr=missing"
                           takes part in rule mining like any other value
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .report import Category, Finding, StageResult, Warning
from .table import ColumnKind, ColumnProfile, Table, numeric_array

PLACEHOLDER_PREFIX = "__MISSING_KEY__"


class MissingPolicy(str, enum.Enum):
    JUSTIFIED = "JustifiedFieldwide"
    KEY_PLACEHOLDER = "KeyPlaceholder"
    INTERPOLATE = "NumericInterpolate"
    DEFER = "DeferToLogic"


@dataclass
class Interpolation:
    """Imputed values for a set of target positions with their anchors.

    ``lo``/``hi`` are the anchor positions (-1 when that side has none).
    """

    positions: np.ndarray
    values: np.ndarray
    lo: np.ndarray
    hi: np.ndarray


def interpolate_positions(values: np.ndarray, targets: np.ndarray) -> Interpolation:
    """Linear interpolation at ``targets`` from the non-NaN, non-target cells.

    Each target at index i takes v_lo + (v_hi - v_lo) * (i - i_lo) / (i_hi - i_lo)
    from its nearest usable neighbours. With a neighbour on one side only,
    that neighbour's value is copied. Raises ``ValueError`` when nothing is
    usable.
    """
    values = np.asarray(values, dtype=float)
    targets = np.asarray(targets, dtype=np.int64)
    usable = ~np.isnan(values)
    usable[targets] = False
    anchors = np.flatnonzero(usable)
    if anchors.size == 0:
        raise ValueError("no present value to anchor interpolation")
    hi_slot = np.searchsorted(anchors, targets, side="right")
    lo_slot = hi_slot - 1
    has_lo = lo_slot >= 0
    has_hi = hi_slot < anchors.size
    lo = np.where(has_lo, anchors[np.clip(lo_slot, 0, anchors.size - 1)], -1)
    hi = np.where(has_hi, anchors[np.clip(hi_slot, 0, anchors.size - 1)], -1)
    v_lo = values[np.where(has_lo, lo, 0)]
    v_hi = values[np.where(has_hi, hi, 0)]
    both = has_lo & has_hi
    out = np.where(has_lo, v_lo, v_hi)
    if both.any():
        i, a, b = targets[both], lo[both], hi[both]
        out[both] = v_lo[both] + (v_hi[both] - v_lo[both]) * (i - a) / (b - a)
    return Interpolation(targets, out, lo, hi)


def classify_missing(table: Table, profiles: Mapping[str, ColumnProfile],
                     key_attrs: Sequence[str], justified_threshold: float = 0.95
                     ) -> tuple[dict[str, MissingPolicy], list[Warning]]:
    """Policy per attribute that has at least one missing cell.

    All missing cells of one attribute share its policy, so the map is
    keyed by attribute; :func:`missing_cells` expands it to cells.
    """
    policies: dict[str, MissingPolicy] = {}
    warnings = []
    keys = set(key_attrs)
    for a in table.attributes:
        p = profiles[a]
        if p.n_missing == 0:
            continue
        if a in keys:
            policies[a] = MissingPolicy.KEY_PLACEHOLDER
        elif p.missing_rate > justified_threshold:
            policies[a] = MissingPolicy.JUSTIFIED
            warnings.append(Warning(
                "missing", {"attr": a}, "justified-missing",
                f"{a}: {p.missing_rate:.2%} of values missing (> {justified_threshold:.0%}); "
                "treated as legitimately absent, not imputed"))
        elif p.kind is ColumnKind.NUMERIC:
            policies[a] = MissingPolicy.INTERPOLATE
        else:
            policies[a] = MissingPolicy.DEFER
    return policies, warnings


def missing_cells(table: Table, policies: Mapping[str, MissingPolicy]):
    """Yield ``(position, attr, policy)`` for every missing cell."""
    for a, pol in policies.items():
        for i, v in enumerate(table.column(a)):
            if v is None:
                yield i, a, pol


def impute_numeric(table: Table, attr: str, targets: Sequence[int] | None = None,
                   *, stage: str = "missing", category: Category = Category.ABSENCE,
                   evidence: Mapping[int, dict] | None = None,
                   originals: Mapping[int, float] | None = None) -> StageResult:
    """Fill ``targets`` (default: every missing cell) by interpolation.

    The outlier stage reuses this with its flagged cells as targets, passing
    per-cell evidence and the original values that were discarded.
    """
    values = numeric_array(table.column(attr))
    if targets is None:
        targets = np.flatnonzero(np.isnan(values))
    targets = np.asarray(sorted(targets), dtype=np.int64)
    if targets.size == 0:
        return StageResult(table)
    try:
        interp = interpolate_positions(values, targets)
    except ValueError:
        return StageResult(table, warnings=[Warning(
            stage, {"attr": attr}, "no-anchor",
            f"{attr}: no present value to interpolate from; cells left missing")])
    row_ids = table.row_ids
    new_col = list(table.column(attr))
    findings = []
    for pos, v, lo, hi in zip(interp.positions, interp.values, interp.lo, interp.hi):
        pos, lo, hi = int(pos), int(lo), int(hi)
        v = float(v)
        new_col[pos] = v
        path = {
            "rule": "linear-interpolation" if lo >= 0 and hi >= 0 else "nearest-copy",
            "abscissa": "row-position",
            "position": pos,
            "lower_anchor": None if lo < 0 else {"row_id": row_ids[lo], "position": lo,
                                                  "value": table.column(attr)[lo]},
            "upper_anchor": None if hi < 0 else {"row_id": row_ids[hi], "position": hi,
                                                  "value": table.column(attr)[hi]},
        }
        if evidence and pos in evidence:
            # the caller's evidence explains the finding; the fill is secondary
            path = {**evidence[pos], "imputation": path}
        original = originals.get(pos) if originals else None
        findings.append(Finding(stage, row_ids[pos], [attr], category, path, original, v))
    return StageResult(table.with_column(attr, new_col), findings)


def placeholder_token(row_id: int, attr: str) -> str:
    return f"{PLACEHOLDER_PREFIX}{row_id}_{attr}"


def place_key_placeholder(table: Table, attr: str, targets: Sequence[int] | None = None
                          ) -> StageResult:
    col = table.column(attr)
    if targets is None:
        targets = [i for i, v in enumerate(col) if v is None]
    if not targets:
        return StageResult(table)
    existing = {v for v in col if isinstance(v, str)}
    row_ids = table.row_ids
    new_col = list(col)
    findings = []
    for pos in targets:
        token = base = placeholder_token(row_ids[pos], attr)
        suffix = 1
        while token in existing:
            suffix += 1
            token = f"{base}#{suffix}"
        existing.add(token)
        new_col[pos] = token
        findings.append(Finding("missing", row_ids[pos], [attr], Category.ABSENCE,
                                {"rule": "key-placeholder", "key_attr": attr}, None, token))
    return StageResult(table.with_column(attr, new_col), findings)


def run_missing(table: Table, profiles: Mapping[str, ColumnProfile], key_attrs: Sequence[str],
                justified_threshold: float = 0.95) -> StageResult:
    policies, warnings = classify_missing(table, profiles, key_attrs, justified_threshold)
    findings: list[Finding] = []
    counts = {p.value: 0 for p in MissingPolicy}
    deferred: dict[str, int] = {}
    for a, pol in policies.items():
        n_missing = profiles[a].n_missing
        counts[pol.value] += n_missing
        if pol is MissingPolicy.KEY_PLACEHOLDER:
            res = place_key_placeholder(table, a)
        elif pol is MissingPolicy.INTERPOLATE:
            res = impute_numeric(table, a)
        else:
            if pol is MissingPolicy.DEFER:
                deferred[a] = n_missing
            continue
        table = res.table
        findings += res.findings
        warnings += res.warnings
    return StageResult(table, findings, warnings,
                       details={"policy_cells": counts, "deferred_to_logic": deferred,
                                "policies": {a: p.value for a, p in policies.items()}})
