"""dqforge: explainable, content-agnostic data-quality checks for tables.

Typical use::

    from dqforge import load_table, run_pipeline, RunConfig

    result = run_pipeline(load_table("sales.csv"), RunConfig(seed=7))
    print(result.report_json())
"""

__version__ = "0.1.0"

from .bench import GroundTruth, InjectionSpec, inject_errors, evaluate, run_bench
from .dedup import find_duplicate_groups, run_dedup
from .keys import PrimaryKey, discover_primary_key
from .logic import AssociationRule, apriori, encode_records, run_logic
from .mapping import ProcessPlan, map_processes
from .missing import MissingPolicy, run_missing
from .outliers import OutlierConfig, phi_outlier, run_outliers
from .pipeline import PipelineResult, RunConfig, run_pipeline
from .report import Category, Finding, Warning, build_report, dumps_report
from .synth import bulldozers_like
from .table import (ColumnKind, CsvDialect, Table, TableError, load_table, profile_table,
                    write_table)
from .typos import dld, dls, run_typos


__all__ = [
    "AssociationRule", "Category", "ColumnKind", "CsvDialect", "Finding", "GroundTruth",
    "InjectionSpec", "MissingPolicy", "OutlierConfig", "PipelineResult", "PrimaryKey",
    "ProcessPlan", "RunConfig", "Table", "TableError", "Warning", "apriori",
    "build_report", "bulldozers_like", "discover_primary_key", "dld", "dls", "dumps_report",
    "encode_records", "evaluate", "find_duplicate_groups", "inject_errors", "load_table",
    "map_processes", "phi_outlier", "profile_table", "run_bench", "run_dedup", "run_logic",
    "run_missing", "run_outliers", "run_pipeline", "run_typos", "write_table",
]
