"""How a numeric column is routed to one of the two outlier rules.

    python3 demos/outlier_paths.py

A light-tailed column stays on the plain Z-score rule. A column whose
skewness or kurtosis passes the gates gets a wider Z interval, and a value
outside it is only flagged when the isolation forest also finds it easy to
isolate, which protects dense groups of genuine extremes.
"""

import numpy as np

from dqforge import OutlierConfig, phi_outlier

rng = np.random.default_rng(1)
cfg = OutlierConfig()

bell = rng.uniform(size=(20_000, 3)).sum(axis=1)
bell[:5] = bell.mean() + 9 * bell.std()
d = phi_outlier(bell, cfg, rng)
print(f"bell-shaped column: skewness {d.skewness:.2f}, kurtosis {d.kurtosis:.2f} -> "
      f"path {d.path}, Z interval {d.interval}")
print(f"  flagged rows {np.flatnonzero(d.flags).tolist()}")

heavy = rng.normal(size=10_000)
heavy[:25] = 14 + rng.uniform(-0.05, 0.05, 25)    # a real, tight group of large values
heavy[25] = heavy.max() + 10                       # one lone value far beyond it
d = phi_outlier(heavy, cfg, rng)
print(f"\nheavy-tailed column: skewness {d.skewness:.2f}, kurtosis {d.kurtosis:.2f} -> "
      f"path {d.path}, Z interval {d.interval}")
outside = np.flatnonzero((d.z <= d.interval[0]) | (d.z >= d.interval[1]))
print(f"  {outside.size} values fall outside the interval; isolation forest fitted on "
      f"{d.fit_size} of them")
print(f"  score of the lone value {d.scores[25]:.3f}, "
      f"highest score inside the group {np.nanmax(d.scores[:25]):.3f}, "
      f"threshold {cfg.if_threshold}")
print(f"  flagged rows {np.flatnonzero(d.flags).tolist()}")
