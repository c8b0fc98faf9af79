"""Univariate outlier detection and imputation.

A column whose shape is tame (``|skewness| < alpha_s`` and
``|kurtosis| < alpha_k``) uses the plain Z-score rule: a value is an outlier
when Z falls outside ``]-beta1, beta2[``. A column that legitimately produces
extreme values gets a wider interval, ``]-gamma*beta1, gamma*beta2[``, and a
value outside it is flagged only if an isolation forest also finds it
isolated.

The forest is grown on the extreme part of the column (points outside the
base interval, padded with the most extreme remaining points up to
``if_min_fit``). Among the tail, a dense group of valid extremes is hard to
isolate, while a lone far value is isolated within a split or two. Grown on
the full column instead, both look equally remote from the bulk and the
forest cannot tell them apart.

Everything operates on Z-scores, so rescaling a column never changes a
decision. Flagged cells are replaced by linear interpolation along the row
position, like any other missing number.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .iforest import IsolationForest1D
from .missing import impute_numeric
from .report import Category, StageResult, Warning
from .seeding import rng_for
from .table import Table, TableError, numeric_array, standardized_moments


@dataclass(frozen=True)
class OutlierConfig:
    alpha_s: float = 6.0
    alpha_k: float = 30.0
    beta1: float = 3.0
    beta2: float = 3.0
    gamma: float = 2.0
    if_trees: int = 100
    if_subsample: int = 256
    if_threshold: float = 0.75
    if_fit: str = "tail"      # "tail" or "all"
    if_min_fit: int = 16

    def __post_init__(self):
        for name in ("alpha_s", "alpha_k", "beta1", "beta2"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.gamma < 1:
            raise ValueError("gamma must be at least 1")
        if self.if_fit not in ("tail", "all"):
            raise ValueError("if_fit must be 'tail' or 'all'")
        if not 0 < self.if_threshold < 1:
            raise ValueError("if_threshold must lie in (0, 1)")


@dataclass
class OutlierDecision:
    path: str | None            # "f1", "f2" or None when the column is degenerate
    flags: np.ndarray           # int8 per input value
    z: np.ndarray
    mean: float
    std: float
    skewness: float | None
    kurtosis: float | None
    interval: tuple[float, float] | None
    scores: np.ndarray | None   # isolation scores, NaN where not computed
    fit_size: int = 0


def zscores(x: np.ndarray) -> tuple[np.ndarray, float, float]:
    m = standardized_moments(x)
    if m.std == 0.0:
        return np.zeros_like(x), m.mean, 0.0
    return (x - m.mean) / m.std, m.mean, m.std


def outside(z: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """True where z is not in the open interval ]-lo, hi[."""
    return (z <= -lo) | (z >= hi)


def tail_fit_sample(z: np.ndarray, beta1: float, beta2: float, min_size: int) -> np.ndarray:
    tail = outside(z, beta1, beta2)
    want = min(z.size, max(min_size, int(tail.sum())))
    if tail.sum() >= want:
        return z[tail]
    order = np.argsort(-np.abs(z), kind="stable")
    return z[order[:want]]


def phi_outlier(values, config: OutlierConfig = OutlierConfig(),
                rng: np.random.Generator | int | None = None) -> OutlierDecision:
    """Outlier flags for a vector of present numeric values."""
    x = np.asarray(values, dtype=float)
    m = standardized_moments(x)
    if not m.defined:
        return OutlierDecision(None, np.zeros(x.size, np.int8), np.zeros(x.size),
                               m.mean, m.std, None, None, None, None)
    z = (x - m.mean) / m.std
    c = config
    if abs(m.skewness) < c.alpha_s and abs(m.kurtosis) < c.alpha_k:
        flags = outside(z, c.beta1, c.beta2).astype(np.int8)
        return OutlierDecision("f1", flags, z, m.mean, m.std, m.skewness, m.kurtosis,
                               (-c.beta1, c.beta2), None)

    lo, hi = c.gamma * c.beta1, c.gamma * c.beta2
    cand = outside(z, lo, hi)
    scores = np.full(z.size, np.nan)
    flags = np.zeros(z.size, np.int8)
    fit_size = 0
    if cand.any():
        fit = z if c.if_fit == "all" else tail_fit_sample(z, c.beta1, c.beta2, c.if_min_fit)
        fit_size = int(fit.size)
        forest = IsolationForest1D(c.if_trees, c.if_subsample, rng).fit(fit)
        scores[cand] = forest.score(z[cand])
        flags[cand] = scores[cand] >= c.if_threshold
    return OutlierDecision("f2", flags, z, m.mean, m.std, m.skewness, m.kurtosis,
                           (-lo, hi), scores, fit_size)


def run_outliers(table: Table, attrs: Sequence[str], config: OutlierConfig = OutlierConfig(),
                 seed: int = 0) -> StageResult:
    findings, warnings = [], []
    details = {}
    for attr in attrs:
        try:
            col = numeric_array(table.column(attr))
        except TableError:
            warnings.append(Warning("outliers", {"attr": attr}, "not-numeric",
                                    f"{attr}: contains text; outlier test skipped"))
            continue
        present = np.flatnonzero(~np.isnan(col))
        decision = phi_outlier(col[present], config, rng_for(seed, "outliers", attr))
        if decision.path is None:
            warnings.append(Warning("outliers", {"attr": attr}, "degenerate-distribution",
                                    f"{attr}: fewer than two distinct values; no outlier test"))
            details[attr] = {"path": None}
            continue
        hit = np.flatnonzero(decision.flags)
        details[attr] = {
            "path": decision.path, "mean": decision.mean, "std": decision.std,
            "skewness": decision.skewness, "kurtosis": decision.kurtosis,
            "interval": list(decision.interval), "flagged": int(hit.size),
            "if_fit_size": decision.fit_size,
        }
        if hit.size == 0:
            continue
        positions = present[hit]
        evidence, originals = {}, {}
        for p, h in zip(positions, hit):
            ev = {
                "rule": f"phi_outlier/{decision.path}",
                "z": float(decision.z[h]),
                "mean": decision.mean, "std": decision.std,
                "skewness": decision.skewness, "kurtosis": decision.kurtosis,
                "gates": {"alpha_s": config.alpha_s, "alpha_k": config.alpha_k},
                "interval": list(decision.interval),
            }
            if decision.path == "f2":
                ev["isolation_score"] = float(decision.scores[h])
                ev["isolation_threshold"] = config.if_threshold
            evidence[int(p)] = ev
            originals[int(p)] = float(col[p])
        res = impute_numeric(table, attr, positions, stage="outliers",
                             category=Category.OUTLIER, evidence=evidence,
                             originals=originals)
        table = res.table
        findings += res.findings
        warnings += res.warnings
    return StageResult(table, findings, warnings,
                       details={"columns": details, "config": asdict(config)})
