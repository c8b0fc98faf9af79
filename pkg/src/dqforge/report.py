"""Findings and warnings, and the JSON report built from them."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Any, BinaryIO, Iterable, Sequence

from . import __version__
from .table import CsvDialect, Table, write_table

SCHEMA = "dqforge/1"

STAGES = ("dedup", "missing", "outliers", "typos", "logic")
_STAGE_RANK = {s: i for i, s in enumerate(STAGES)}


class Category(str, enum.Enum):
    REDUNDANCY = "Redundancy"
    ABSENCE = "Absence"
    OUTLIER = "Outlier"
    TYPOGRAPHICAL = "Typographical"
    LOGIC = "Logic"


@dataclass
class Finding:
    """One located defect.

    ``corrected`` holds the replacement value(s); ``flag_only`` is set when
    the stage decided not to change the data (the cell is only reported).
    """

    stage: str
    row_id: int
    columns: list[str]
    category: Category
    rule_path: dict[str, Any]
    original: Any
    corrected: Any = None
    flag_only: bool = False

    def __post_init__(self):
        if not self.columns:
            raise ValueError("a finding must name at least one column")
        if not self.rule_path:
            raise ValueError("a finding must carry its rule path")
        if self.stage not in _STAGE_RANK:
            raise ValueError(f"unknown stage {self.stage!r}")

    def sort_key(self):
        return (_STAGE_RANK[self.stage], self.row_id, tuple(self.columns),
                json.dumps(self.rule_path, sort_keys=True, default=str))

    def to_json(self) -> dict:
        return {
            "row_id": self.row_id,
            "columns": list(self.columns),
            "category": self.category.value,
            "rule_path": _clean(self.rule_path),
            "original": _clean(self.original),
            "corrected": None if self.flag_only else _clean(self.corrected),
            "flag_only": self.flag_only,
        }


@dataclass
class Warning:
    stage: str
    scope: dict[str, Any]
    reason: str
    message: str

    def sort_key(self):
        return (_STAGE_RANK.get(self.stage, len(STAGES)), self.reason,
                json.dumps(self.scope, sort_keys=True, default=str), self.message)

    def to_json(self) -> dict:
        return {"stage": self.stage, "scope": _clean(self.scope), "reason": self.reason,
                "message": self.message}


@dataclass
class StageResult:
    """What a stage hands back to the pipeline."""

    table: Table
    findings: list[Finding] = field(default_factory=list)
    warnings: list[Warning] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)


def _clean(obj: Any) -> Any:
    """Make a value JSON-safe and deterministic."""
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalar
        return _clean(obj.item())
    return obj


def build_report(findings: Iterable[Finding], warnings: Iterable[Warning], *,
                 plan: dict | None, key: dict | None, config: dict,
                 timings: dict[str, float] | None = None,
                 stages: dict[str, Any] | None = None,
                 input_shape: Sequence[int] | None = None,
                 output_shape: Sequence[int] | None = None,
                 status: str = "ok", error: str | None = None) -> dict:
    findings = sorted(findings, key=Finding.sort_key)
    warnings = sorted(warnings, key=Warning.sort_key)
    per_stage: dict[str, list] = {s: [] for s in STAGES}
    for f in findings:
        per_stage[f.stage].append(f.to_json())
    categories = {c.value: {"count": 0, "corrected": 0, "flag_only": 0} for c in Category}
    for f in findings:
        slot = categories[f.category.value]
        slot["count"] += 1
        slot["flag_only" if f.flag_only else "corrected"] += 1
    report = {
        "schema": SCHEMA,
        "version": __version__,
        "status": status,
        "error": error,
        "input": {"rows": input_shape[0], "columns": input_shape[1]} if input_shape else None,
        "output": {"rows": output_shape[0], "columns": output_shape[1]} if output_shape else None,
        "config": _clean(config),
        "primary_key": list(key["attrs"]) if key else None,
        "key_discovery": _clean(key) if key else None,
        "plan": _clean(plan) if plan else None,
        "stages": _clean(stages or {}),
        "categories": categories,
        "findings": per_stage,
        "warnings": [w.to_json() for w in warnings],
        "timings": _clean(timings) if timings is not None else None,
    }
    return report


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def emit_report(findings: Iterable[Finding], warnings: Iterable[Warning], plan, key,
                config: dict, timings: dict[str, float] | None = None, **extra) -> str:
    """Serialize a run to the versioned JSON document."""
    plan_json = plan.to_json() if hasattr(plan, "to_json") else plan
    key_json = key.to_json() if hasattr(key, "to_json") else key
    return dumps_report(build_report(findings, warnings, plan=plan_json, key=key_json,
                                     config=config, timings=timings, **extra))


def emit_corrected_table(table: Table, sink: BinaryIO | str,
                         dialect: CsvDialect = CsvDialect()) -> None:
    write_table(table, sink, dialect)
