"""End-to-end orchestration.

Order is fixed: key discovery and stage mapping first, then duplicates,
missing values, outliers, typos and logic rules, each stage consuming the
previous stage's corrected table. Stages can be skipped but not reordered.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Callable, Sequence

from .dedup import run_dedup
from .keys import KeyCandidate, PrimaryKey, discover_primary_key, key_from_override
from .logic import LogicConfig, run_logic
from .mapping import MappingRules, ProcessPlan, apply_overrides, map_processes
from .missing import run_missing
from .outliers import OutlierConfig, run_outliers
from .report import STAGES, Finding, Warning, build_report, dumps_report
from .table import ColumnKind, ColumnProfile, CsvDialect, Table, profile_values
from .typos import COUNT_RULES, TypoConfig, run_typos


@dataclass
class RunConfig:
    seed: int = 0
    # key discovery
    key_missing_threshold: float = 0.05
    key_dup_threshold: float = 0.05
    key_max_combo: int = 2
    key_override: list[str] | None = None
    # stage mapping
    outlier_max_missing: float = 0.5
    outlier_min_unique: int = 10
    typo_max_missing: float = 0.5
    logic_max_missing: float = 0.75
    logic_min_unique: int = 5
    include: list[str] = field(default_factory=list)
    exclude: list[str] = field(default_factory=list)
    # missing values
    justified_missing_threshold: float = 0.95
    # outliers
    alpha_s: float = 6.0
    alpha_k: float = 30.0
    beta1: float = 3.0
    beta2: float = 3.0
    gamma: float = 2.0
    if_trees: int = 100
    if_subsample: int = 256
    if_threshold: float = 0.75
    if_fit: str = "tail"
    # typos
    dls_threshold: float = 0.7
    gap_refs: int = 10
    cluster_count: str = "threshold"
    dictionary: str | None = None
    # logic
    min_support: float = 0.0033
    min_confidence: float = 0.99
    max_itemset: int = 3
    logic_timeout: float = 3600.0
    # run
    disable: list[str] = field(default_factory=list)
    threads: int = 1
    report_timings: bool = False
    delimiter: str = ","
    missing_tokens: list[str] = field(default_factory=lambda: ["", "NA", "NaN", "null"])

    def __post_init__(self):
        bad = set(self.disable) - set(STAGES)
        if bad:
            raise ValueError(f"unknown stage(s) {sorted(bad)}; stages are {list(STAGES)}")
        self.outlier_config()  # validates its own fields
        checks = [
            ("key_missing_threshold", 0 <= self.key_missing_threshold <= 1),
            ("key_dup_threshold", 0 <= self.key_dup_threshold <= 1),
            ("key_max_combo", self.key_max_combo >= 1),
            ("dls_threshold", 0 < self.dls_threshold <= 1),
            ("gap_refs", self.gap_refs >= 1),
            ("cluster_count", self.cluster_count in COUNT_RULES),
            ("min_support", 0 < self.min_support <= 1),
            ("min_confidence", 0 < self.min_confidence <= 1),
            ("max_itemset", self.max_itemset >= 2),
            ("logic_timeout", self.logic_timeout >= 0),
            ("threads", self.threads >= 1),
            ("justified_missing_threshold", 0 < self.justified_missing_threshold <= 1),
            ("if_trees", self.if_trees >= 1),
            ("if_subsample", self.if_subsample >= 1),
        ]
        for name, ok in checks:
            if not ok:
                raise ValueError(f"invalid value for {name}: {getattr(self, name)!r}")

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def dialect(self) -> CsvDialect:
        return CsvDialect(delimiter=self.delimiter, missing_tokens=tuple(self.missing_tokens))

    def outlier_config(self) -> OutlierConfig:
        return OutlierConfig(self.alpha_s, self.alpha_k, self.beta1, self.beta2, self.gamma,
                             self.if_trees, self.if_subsample, self.if_threshold, self.if_fit)

    def typo_config(self) -> TypoConfig:
        return TypoConfig(self.dls_threshold, self.gap_refs, self.cluster_count)

    def logic_config(self) -> LogicConfig:
        return LogicConfig(self.min_support, self.min_confidence, self.max_itemset,
                           self.logic_timeout)

    def mapping_rules(self) -> MappingRules:
        return MappingRules(self.outlier_max_missing, self.typo_max_missing,
                            self.logic_max_missing, self.logic_min_unique,
                            self.outlier_min_unique)


def profile_all(table: Table, threads: int = 1) -> dict[str, ColumnProfile]:
    attrs = table.attributes
    if threads > 1 and len(attrs) > 1:
        with ThreadPoolExecutor(threads) as pool:
            profiles = list(pool.map(lambda a: profile_values(a, table.column(a)), attrs))
    else:
        profiles = [profile_values(a, table.column(a)) for a in attrs]
    return dict(zip(attrs, profiles))


@dataclass
class PreQuality:
    profiles: dict[str, ColumnProfile]
    kinds: dict[str, ColumnKind]
    candidates: list[KeyCandidate]
    key: PrimaryKey | None
    plan: ProcessPlan
    warnings: list[Warning]


def pre_quality(table: Table, config: RunConfig) -> PreQuality:
    profiles = profile_all(table, config.threads)
    kinds = {a: p.kind for a, p in profiles.items()}
    warnings = []
    if config.key_override:
        key = key_from_override(table, config.key_override)
        candidates: list[KeyCandidate] = []
    else:
        key, candidates = discover_primary_key(
            table, profiles, config.key_missing_threshold, config.key_dup_threshold,
            config.key_max_combo)
    if key is None:
        warnings.append(Warning("dedup", {}, "no-primary-key",
                                "no primary key found; duplicates are detected on whole records"))
    plan = map_processes(table.attributes, profiles, kinds, key, config.mapping_rules())
    apply_overrides(plan, config.include, config.exclude)
    return PreQuality(profiles, kinds, candidates, key, plan, warnings)


def profile_summary(table: Table, pq: PreQuality) -> dict[str, Any]:
    cols = {}
    for a, p in pq.profiles.items():
        entry = {"kind": p.kind.value, "missing_rate": p.missing_rate,
                 "unique_count": p.unique_count}
        if p.moments is not None:
            entry.update(mean=p.moments.mean, std=p.moments.std,
                         skewness=p.moments.skewness, kurtosis=p.moments.kurtosis)
        cols[a] = entry
    return {
        "rows": table.n_rows, "columns": table.n_cols, "profiles": cols,
        "key_candidates": [{"attr": c.attr, "name_match": c.name_match,
                            "missing_rate": c.missing_rate} for c in pq.candidates],
    }


@dataclass
class PipelineResult:
    table: Table
    findings: list[Finding]
    warnings: list[Warning]
    report: dict
    exit_code: int
    timings: dict[str, float] = field(default_factory=dict)

    def report_json(self) -> str:
        return dumps_report(self.report)


def load_dictionary(path: str | None) -> set[str] | None:
    if not path:
        return None
    with open(path, encoding="utf-8") as fh:
        return {line.strip() for line in fh if line.strip()}


def run_pipeline(table: Table, config: RunConfig | None = None,
                 dictionary: Sequence[str] | None = None,
                 progress: Callable[[str, dict[str, Any]], None] | None = None
                 ) -> PipelineResult:
    """Run every enabled stage in order on ``table``.

    ``progress`` is called after each stage with its name and a summary
    (findings, seconds, skipped/failed).
    """
    config = config or RunConfig()
    words = set(dictionary) if dictionary is not None else load_dictionary(config.dictionary)
    timings: dict[str, float] = {}
    stages: dict[str, Any] = {}
    findings: list[Finding] = []
    warnings: list[Warning] = []
    input_shape = (table.n_rows, table.n_cols)

    t0 = time.perf_counter()
    pq = pre_quality(table, config)
    timings["pre_quality"] = time.perf_counter() - t0
    if progress:
        progress("pre_quality", {"seconds": timings["pre_quality"],
                                 "key": list(pq.key.attrs) if pq.key else None})
    warnings += pq.warnings
    stages["pre_quality"] = {"key_candidates": [c.attr for c in pq.candidates]}
    plan = pq.plan
    key_attrs = list(pq.key.attrs) if pq.key else []

    failure: str | None = None

    def stage(name, fn):
        nonlocal table, failure
        if failure is not None:
            stages[name] = {"skipped": True, "reason": "earlier stage failed"}
            return
        if name in config.disable:
            stages[name] = {"skipped": True, "reason": "disabled"}
            return
        t = time.perf_counter()
        try:
            res = fn(table)
        except Exception as exc:  # a stage failure ends the run with a partial report
            timings[name] = time.perf_counter() - t
            failure = f"{name}: {type(exc).__name__}: {exc}"
            stages[name] = {"skipped": False, "failed": True}
            if progress:
                progress(name, {"seconds": timings[name], "failed": failure})
            return
        timings[name] = time.perf_counter() - t
        table = res.table
        findings.extend(res.findings)
        warnings.extend(res.warnings)
        stages[name] = {"skipped": False, "findings": len(res.findings), **res.details}
        if progress:
            progress(name, {"seconds": timings[name], "findings": len(res.findings)})

    stage("dedup", lambda t: run_dedup(t, plan.dedup_attrs, plan.degraded_dedup))
    stage("missing", lambda t: run_missing(t, profile_all(t, config.threads), key_attrs,
                                           config.justified_missing_threshold))
    stage("outliers", lambda t: run_outliers(t, plan.outlier_attrs, config.outlier_config(),
                                             config.seed))
    stage("typos", lambda t: run_typos(t, plan.typo_attrs, config.typo_config(), config.seed,
                                       words))
    stage("logic", lambda t: run_logic(t, plan.logic_attrs, config.logic_config()))

    report = build_report(
        findings, warnings, plan=plan.to_json(),
        key=pq.key.to_json() if pq.key else None, config=asdict(config),
        timings=timings if config.report_timings else None, stages=stages,
        input_shape=input_shape, output_shape=(table.n_rows, table.n_cols),
        status="error" if failure else "ok", error=failure)
    exit_code = 1 if failure else (2 if warnings else 0)
    return PipelineResult(table, findings, warnings, report, exit_code, timings)
