"""Duplicate records by key projection; the first occurrence is kept."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .keys import combine_codes, factorize
from .report import Category, Finding, StageResult
from .table import Cell, Table


@dataclass(frozen=True)
class DuplicateGroup:
    projection: tuple[Cell, ...]
    row_ids: tuple[int, ...]   # in table order, first is the survivor
    positions: tuple[int, ...]


def find_duplicate_groups(table: Table, dedup_attrs: Sequence[str]) -> list[DuplicateGroup]:
    """Groups of two or more rows sharing a complete projection.

    A row with a missing cell in the projection never joins a group.
    """
    if not dedup_attrs:
        raise ValueError("dedup_attrs must not be empty")
    codes = combine_codes([factorize(table.column(a)) for a in dedup_attrs])
    present = np.flatnonzero(codes >= 0)
    if present.size == 0:
        return []
    order = present[np.argsort(codes[present], kind="stable")]
    sorted_codes = codes[order]
    cut = np.flatnonzero(np.diff(sorted_codes)) + 1
    row_ids = table.row_ids
    cols = [table.column(a) for a in dedup_attrs]
    groups = []
    for chunk in np.split(order, cut):
        if chunk.size < 2:
            continue
        # survivor is the smallest row id; the rest follow in table order
        members = [int(p) for p in chunk]
        first = min(members, key=lambda p: row_ids[p])
        pos = tuple([first] + [p for p in members if p != first])
        groups.append(DuplicateGroup(tuple(c[pos[0]] for c in cols),
                                     tuple(row_ids[p] for p in pos), pos))
    groups.sort(key=lambda g: g.positions[0])
    return groups


def drop_duplicates(table: Table, groups: Sequence[DuplicateGroup],
                    dedup_attrs: Sequence[str], degraded: bool = False) -> StageResult:
    drop: set[int] = set()
    findings = []
    for g in groups:
        kept = g.row_ids[0]
        for rid, pos in zip(g.row_ids[1:], g.positions[1:]):
            drop.add(pos)
            findings.append(Finding(
                stage="dedup", row_id=rid, columns=list(dedup_attrs),
                category=Category.REDUNDANCY,
                rule_path={
                    "rule": "full-record-equality" if degraded else "key-projection-equality",
                    "key": list(dedup_attrs),
                    "projection": list(g.projection),
                    "kept_row_id": kept,
                    "group_size": len(g.row_ids),
                },
                original=list(g.projection), corrected="row removed"))
    if not drop:
        return StageResult(table, findings)
    keep = [i for i in range(table.n_rows) if i not in drop]
    return StageResult(table.take(keep), findings,
                       details={"groups": len(groups), "removed": len(drop)})


def run_dedup(table: Table, dedup_attrs: Sequence[str], degraded: bool = False) -> StageResult:
    groups = find_duplicate_groups(table, dedup_attrs)
    result = drop_duplicates(table, groups, dedup_attrs, degraded)
    result.details.setdefault("groups", len(groups))
    result.details.setdefault("removed", 0)
    result.details["degraded"] = degraded
    return result
