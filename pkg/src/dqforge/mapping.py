"""Decide which columns each cleaning stage may touch.

The rules only look at column statistics and names, never at meaning:

outliers
    numeric, less than half missing, at least ``min_outlier_unique``
    distinct values, and not an identifier (key column or identifier-like
    name). Low-cardinality numeric codes carry no distribution to test.
typos
    plain text (no digits anywhere), less than half missing, not an
    identifier.
logic
    any non-numeric column (plain text or mixed codes/dates) with less than
    75% missing and at least five distinct values, key columns excluded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .keys import KEY_TOKENS, PrimaryKey, is_key_like_name
from .table import ColumnKind, ColumnProfile


@dataclass(frozen=True)
class MappingRules:
    outlier_max_missing: float = 0.5
    typo_max_missing: float = 0.5
    logic_max_missing: float = 0.75
    logic_min_unique: int = 5
    min_outlier_unique: int = 10
    identifier_tokens: tuple[str, ...] = KEY_TOKENS


@dataclass
class ProcessPlan:
    dedup_attrs: list[str]
    missing_attrs: list[str]
    outlier_attrs: list[str]
    typo_attrs: list[str]
    logic_attrs: list[str]
    degraded_dedup: bool = False
    overrides: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "dedup_attrs": self.dedup_attrs,
            "degraded_dedup": self.degraded_dedup,
            "missing_attrs": self.missing_attrs,
            "outlier_attrs": self.outlier_attrs,
            "typo_attrs": self.typo_attrs,
            "logic_attrs": self.logic_attrs,
            "overrides": self.overrides,
        }

    def stage_attrs(self, stage: str) -> list[str]:
        return getattr(self, f"{stage}_attrs")


def map_processes(attributes: Sequence[str], profiles: Mapping[str, ColumnProfile],
                  kinds: Mapping[str, ColumnKind], key: PrimaryKey | None,
                  rules: MappingRules = MappingRules()) -> ProcessPlan:
    key_attrs = set(key.attrs) if key else set()

    def identifier(a: str) -> bool:
        return a in key_attrs or is_key_like_name(a, rules.identifier_tokens)

    outliers, typos, logic = [], [], []
    for a in attributes:
        p, kind = profiles[a], kinds[a]
        if kind is ColumnKind.NUMERIC:
            if (p.missing_rate < rules.outlier_max_missing
                    and p.unique_count >= rules.min_outlier_unique
                    and not identifier(a)):
                outliers.append(a)
            continue
        if (kind is ColumnKind.TEXTUAL and p.missing_rate < rules.typo_max_missing
                and not identifier(a)):
            typos.append(a)
        if (a not in key_attrs and p.missing_rate < rules.logic_max_missing
                and p.unique_count >= rules.logic_min_unique):
            logic.append(a)

    return ProcessPlan(
        dedup_attrs=list(key.attrs) if key else list(attributes),
        missing_attrs=list(attributes),
        outlier_attrs=outliers,
        typo_attrs=typos,
        logic_attrs=logic,
        degraded_dedup=key is None,
    )


def apply_overrides(plan: ProcessPlan, include: Sequence[str] = (),
                    exclude: Sequence[str] = ()) -> ProcessPlan:
    """Apply ``stage:attr`` include/exclude directives to a plan."""
    stages = ("outlier", "typo", "logic")
    for directive, adding in [(d, True) for d in include] + [(d, False) for d in exclude]:
        stage, sep, attr = directive.partition(":")
        if not sep or stage not in stages or not attr:
            raise ValueError(f"bad override {directive!r}; expected stage:attr "
                             f"with stage in {stages}")
        attrs = plan.stage_attrs(stage)
        if adding and attr not in attrs:
            attrs.append(attr)
        elif not adding and attr in attrs:
            attrs.remove(attr)
        plan.overrides.append(("+" if adding else "-") + directive)
    return plan
