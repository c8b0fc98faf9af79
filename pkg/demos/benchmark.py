"""Score the pipeline on several seeded synthetic tables.

    python3 demos/benchmark.py [rows] [seeds]

Each seed produces a fresh table and a fresh set of planted defects. The
clean table is also run first; a non-zero baseline means the pipeline
reports problems that were never planted. Below roughly 10,000 rows there
may not be room to plant the logic errors without breaking the rules they
are meant to violate, and the harness refuses.
"""

import sys

from dqforge import run_bench
from dqforge.bench import CapacityError

rows = int(sys.argv[1]) if len(sys.argv) > 1 else 10_000
seeds = int(sys.argv[2]) if len(sys.argv) > 2 else 3

cats = ("Redundancy", "Absence", "Outlier", "Typographical", "Logic")
print(f"{rows} rows; recall / precision per category")
print("seed  baseline  " + "  ".join(f"{c:>13s}" for c in cats) + "   seconds")
for seed in range(seeds):
    try:
        res = run_bench(rows, seed=seed)
    except CapacityError as exc:
        print(f"{seed:4d}  cannot plant the reference mix: {exc}")
        continue
    cells = []
    for c in cats:
        m = res.metrics["per_category"][c]
        r = "-" if m["recall"] is None else f"{m['recall']:.2f}"
        p = "-" if m["precision"] is None else f"{m['precision']:.2f}"
        cells.append(f"{r:>6s}/{p:<6s}")
    print(f"{seed:4d}  {res.baseline_findings:8d}  " + "  ".join(cells)
          + f"   {res.timings['total']:.1f}")
