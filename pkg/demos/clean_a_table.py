"""Corrupt a synthetic auction table, then clean it and read the evidence.

Run from the repository root:

    python3 demos/clean_a_table.py [rows] [seed]

The corrupted input and the corrected table are written as CSV next to
the JSON report, in a temporary directory that is printed at the end.
"""

import json
import sys
import tempfile
from collections import Counter
from pathlib import Path

from dqforge import InjectionSpec, RunConfig, bulldozers_like, evaluate, inject_errors
from dqforge import run_pipeline, write_table

rows = int(sys.argv[1]) if len(sys.argv) > 1 else 10_000
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0

clean = bulldozers_like(rows, seed=seed).table
spec = InjectionSpec.scaled(rows, seed=seed)
dirty, truth = inject_errors(clean, spec)
print(f"{dirty.n_rows} rows x {dirty.n_cols} columns, {len(truth)} planted defects:")
for kind, n in truth.counts().items():
    print(f"  {kind:24s} {n}")

result = run_pipeline(dirty, RunConfig(seed=seed))
report = result.report
print(f"\nprimary key: {report['primary_key']} "
      f"(projection duplicate rate {report['key_discovery']['duplicate_rate']:.4%})")
print("stage plan:")
for name in ("outlier_attrs", "typo_attrs", "logic_attrs"):
    print(f"  {name:14s} {report['plan'][name]}")

print("\nfindings per stage:")
for stage, found in report["findings"].items():
    print(f"  {stage:9s} {len(found):4d}  {dict(Counter(f['category'] for f in found))}")

# every finding names its cells and carries the rule that produced it
print("\none finding from each stage that found something:")
for stage, found in report["findings"].items():
    if found:
        f = found[0]
        print(f"\n[{stage}] row {f['row_id']} {f['columns']}: "
              f"{f['original']!r} -> {f['corrected']!r}")
        print("  " + json.dumps(f["rule_path"], ensure_ascii=False)[:300])

scores = evaluate(result.findings, truth)
print("\nagainst the planted defects:")
for cat, m in scores["per_category"].items():
    if m["truth"] or m["found"]:
        r = "-" if m["recall"] is None else f"{m['recall']:.3f}"
        p = "-" if m["precision"] is None else f"{m['precision']:.3f}"
        print(f"  {cat:14s} recall {r}  precision {p}  ({m['truth']} planted, {m['found']} found)")

out = Path(tempfile.mkdtemp(prefix="dqforge-demo-"))
write_table(dirty, str(out / "dirty.csv"))
write_table(result.table, str(out / "corrected.csv"))
(out / "report.json").write_text(result.report_json(), encoding="utf-8")
print(f"\nwrote dirty.csv, corrected.csv and report.json to {out}")
print(f"the same run from the shell: dqforge run --input {out / 'dirty.csv'} "
      f"--output corrected.csv --report report.json")
