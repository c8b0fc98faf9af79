"""Step through typo correction on a state column by hand.

    python3 demos/typo_walkthrough.py

Each step is called on its own so the intermediate groups can be printed,
from the sorted-neighbour pass up to the check for frequent variants.
"""

from collections import Counter

import numpy as np

from dqforge.typos import (cluster_dominants, correction_map, dls, group_by_sorted_jumps,
                           reconcile_groups)

counts = Counter({
    "Texas": 900, "texas": 3, "Texsa": 2, "TEXAS": 1,
    "Georgia": 640, "Heorgia": 2,          # first letter wrong, sorts next to Hawaii
    "Hawaii": 410, "Idaho": 380, "Idaoh": 1,
    "Maine": 500, "Mainm": 1, "Manie": 2, "Xaine": 1,
    "North Dakota": 450, "South Dakota": 470, "Suoth Dakota": 2,
})

print("similarity of a few pairs (case-folded):")
for a, b in [("Texas", "Texsa"), ("Georgia", "Heorgia"), ("North Dakota", "South Dakota"),
             ("Maine", "Xaine")]:
    print(f"  {a!r:15s} {b!r:15s} {dls(a.casefold(), b.casefold()):.4f}")

jumps = group_by_sorted_jumps(counts, threshold=0.7)
print(f"\n{len(counts)} distinct values -> {len(jumps)} groups after the neighbour pass:")
for g in jumps:
    print(f"  {g.dominant:13s} {dict(g.members)}")

merged, choice = cluster_dominants(jumps, threshold=0.7, rng=np.random.default_rng(0))
print(f"\nclustering the {len(jumps)} dominants: {choice.k} clusters "
      f"(threshold cut {choice.k_threshold}, gap statistic {choice.k_gap})")
for g in merged:
    if len(g.origin) > 1:
        print(f"  merged into {g.dominant}: {sorted(g.members)}")

# both Dakotas are common, so the smaller one looks like a word, not a typo
kept, flags = reconcile_groups(merged)
for f in flags:
    print(f"\nwithout a dictionary: {f['value']!r} ({f['count']}x) stays in the group of "
          f"{f['dominant']!r} and is flagged ({f['action']})")
split, flags = reconcile_groups(merged, dictionary={"North Dakota", "South Dakota"})
print(f"with a dictionary listing both: {flags[0]['action']}")

print("\ncorrections applied:")
for variant, dominant in sorted(correction_map(split).items()):
    print(f"  {variant!r:15s} -> {dominant!r}")
