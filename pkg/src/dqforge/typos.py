"""Typographical error correction for free-text columns.

The stage works on the distinct values of a column and their counts:

1. Sort the distinct values case-insensitively and walk the sorted list,
   starting a new group whenever two neighbours are less similar than the
   threshold (Damerau-Levenshtein similarity on case-folded strings).
2. Each group is represented by its most frequent member, its dominant.
3. Dominants are clustered hierarchically so that typo groups which sorted
   away from their true word (an error in the first letter, say) are merged
   back. Linkage is group average, with each dominant weighted by the
   number of cells its group covers, so a cluster sits where most of its
   rows are spelled. By default the dendrogram is cut at the similarity
   threshold of step 1; the gap statistic is always computed and reported,
   and can be chosen as the cluster count instead.
4. Members that are frequent relative to their dominant are probably words
   in their own right. They are flagged; with a dictionary that lists them
   they are split off into their own group.
5. Every remaining member is rewritten to its group's dominant.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import pdist, squareform

from .report import Category, Finding, StageResult, Warning
from .seeding import rng_for
from .table import Table


def dld(a: str, b: str) -> int:
    """Optimal-string-alignment distance: insertions, deletions,
    substitutions and transpositions of adjacent characters, where no
    character takes part in more than one edit."""
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev2: list[int] = []
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        cur = [i] + [0] * lb
        ai = a[i - 1]
        for j in range(1, lb + 1):
            bj = b[j - 1]
            best = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ai != bj))
            if i > 1 and j > 1 and ai == b[j - 2] and a[i - 2] == bj:
                t = prev2[j - 2] + 1
                if t < best:
                    best = t
            cur[j] = best
        prev2, prev = prev, cur
    return prev[lb]


def dld_table(a: str, b: str) -> np.ndarray:
    """Full DP table d[i, j] for prefixes a[:i], b[:j]."""
    la, lb = len(a), len(b)
    d = np.zeros((la + 1, lb + 1), dtype=np.int64)
    d[:, 0] = np.arange(la + 1)
    d[0, :] = np.arange(lb + 1)
    for i in range(1, la + 1):
        for j in range(1, lb + 1):
            best = min(d[i - 1, j] + 1, d[i, j - 1] + 1,
                       d[i - 1, j - 1] + (a[i - 1] != b[j - 1]))
            if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1]:
                best = min(best, d[i - 2, j - 2] + 1)
            d[i, j] = best
    return d


def dls(a: str, b: str) -> float:
    """Similarity in [0, 1]: (L - dld) / L with L the longer length."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return (longest - dld(a, b)) / longest


def _fold(s: str) -> str:
    return s.casefold()


def sort_key(value: str):
    return (_fold(value), value)


@dataclass
class SimilarityGroup:
    dominant: str
    members: dict[str, int]
    origin: list[int] = field(default_factory=list)  # jump-group indices merged in

    @property
    def total(self) -> int:
        return sum(self.members.values())

    def variants(self) -> list[str]:
        return [m for m in self.members if m != self.dominant]


def pick_dominant(members: Mapping[str, int]) -> str:
    # highest count; ties go to the first value in sorted order
    return min(members, key=lambda v: (-members[v], sort_key(v)))


def group_by_sorted_jumps(counts: Mapping[str, int], threshold: float = 0.7
                          ) -> list[SimilarityGroup]:
    values = sorted(counts, key=sort_key)
    if not values:
        return []
    runs = [[values[0]]]
    for prev, cur in zip(values, values[1:]):
        if dls(_fold(prev), _fold(cur)) < threshold:
            runs.append([cur])
        else:
            runs[-1].append(cur)
    groups = []
    for i, run in enumerate(runs):
        members = {v: counts[v] for v in run}
        groups.append(SimilarityGroup(pick_dominant(members), members, [i]))
    return groups


def similarity_matrix(words: Sequence[str]) -> np.ndarray:
    g = len(words)
    s = np.eye(g)
    folded = [_fold(w) for w in words]
    for i in range(g):
        for j in range(i + 1, g):
            s[i, j] = s[j, i] = dls(folded[i], folded[j])
    return s


def weighted_average_linkage(dist: np.ndarray, weights: Sequence[float]) -> np.ndarray:
    """Agglomerative clustering where the distance between two clusters is
    the weight-averaged distance between their points.

    Returns a linkage matrix in scipy's layout, usable with ``fcluster``.
    With unit weights this is ordinary average linkage. The update keeps
    merge heights non-decreasing, so cutting the tree at a height is valid.
    """
    d = np.array(dist, dtype=float)
    g = d.shape[0]
    w = np.asarray(weights, dtype=float).copy()
    if w.shape != (g,) or np.any(w <= 0):
        raise ValueError("need one positive weight per point")
    size = np.ones(g)
    ids = np.arange(g)
    np.fill_diagonal(d, np.inf)
    z = np.zeros((max(g - 1, 0), 4))
    for step in range(g - 1):
        i, j = divmod(int(np.argmin(d)), g)
        if i > j:
            i, j = j, i
        z[step] = (min(ids[i], ids[j]), max(ids[i], ids[j]), d[i, j], size[i] + size[j])
        row = (w[i] * d[i] + w[j] * d[j]) / (w[i] + w[j])
        d[i, :] = d[:, i] = row
        d[i, i] = np.inf
        d[j, :] = d[:, j] = np.inf
        w[i] += w[j]
        size[i] += size[j]
        ids[i] = g + step
    return z


def _dispersion(points_sqdist: np.ndarray, labels: np.ndarray) -> float:
    total = 0.0
    for lab in np.unique(labels):
        idx = np.flatnonzero(labels == lab)
        if idx.size > 1:
            total += points_sqdist[np.ix_(idx, idx)].sum() / (2.0 * idx.size)
    return total


def _log_dispersions(points: np.ndarray, ks: Sequence[int]) -> np.ndarray:
    sq = squareform(pdist(points, "sqeuclidean"))
    tree = linkage(pdist(points, "euclidean"), "average")
    out = []
    for k in ks:
        w = _dispersion(sq, fcluster(tree, k, "maxclust"))
        out.append(np.log(max(w, 1e-12)))
    return np.asarray(out)


@dataclass
class GapResult:
    k: int
    ks: list[int]
    gap: list[float]
    s: list[float]


def gap_statistic(rows: np.ndarray, n_refs: int, rng: np.random.Generator) -> GapResult:
    """Gap statistic over k = 1..g-1 with the one-standard-error rule.

    ``rows`` are the points (here the dominants' similarity profiles).
    Reference sets are drawn uniformly over the points' bounding box and
    clustered with the same average-linkage procedure.
    """
    g = rows.shape[0]
    ks = list(range(1, g))
    if not ks:
        return GapResult(1, [1], [0.0], [0.0])
    logw = _log_dispersions(rows, ks)
    lo, hi = rows.min(axis=0), rows.max(axis=0)
    refs = np.array([_log_dispersions(rng.uniform(lo, hi, size=rows.shape), ks)
                     for _ in range(n_refs)])
    gap = refs.mean(axis=0) - logw
    s = refs.std(axis=0) * np.sqrt(1.0 + 1.0 / n_refs)
    k = ks[-1]
    for i in range(len(ks) - 1):
        if gap[i] >= gap[i + 1] - s[i + 1]:
            k = ks[i]
            break
    return GapResult(k, ks, gap.tolist(), s.tolist())


@dataclass
class ClusterChoice:
    labels: np.ndarray
    k: int
    k_gap: int
    k_threshold: int


COUNT_RULES = ("threshold", "gap", "max")


def choose_clusters(dominants: Sequence[str], threshold: float = 0.7, n_refs: int = 10,
                    rng: np.random.Generator | None = None, count_rule: str = "threshold",
                    weights: Sequence[float] | None = None) -> ClusterChoice:
    """Average-linkage clustering of the dominants on 1 - DLS, each dominant
    weighted by ``weights`` (its group's cell count; unit weights if omitted).

    Both candidate cluster counts are always computed: ``k_threshold`` from
    cutting the dendrogram at distance ``1 - threshold`` and ``k_gap`` from
    the gap statistic. ``count_rule`` picks which one is used ("max" takes
    the larger).
    """
    if count_rule not in COUNT_RULES:
        raise ValueError(f"count_rule must be one of {COUNT_RULES}")
    g = len(dominants)
    if g == 1:
        return ClusterChoice(np.array([1]), 1, 1, 1)
    sim = similarity_matrix(dominants)
    tree = weighted_average_linkage(1.0 - sim, np.ones(g) if weights is None else weights)
    # cutting at 1 - threshold: clusters whose members are, on average,
    # as similar as the jump rule requires of neighbours
    cut = fcluster(tree, (1.0 - threshold) + 1e-9, "distance")
    k_threshold = int(cut.max())
    rng = rng if rng is not None else np.random.default_rng(0)
    gap = gap_statistic(sim, n_refs, rng)
    k = {"threshold": k_threshold, "gap": gap.k, "max": max(gap.k, k_threshold)}[count_rule]
    labels = cut if k == k_threshold else fcluster(tree, k, "maxclust")
    return ClusterChoice(labels, k, gap.k, k_threshold)


def cluster_dominants(groups: Sequence[SimilarityGroup], threshold: float = 0.7,
                      n_refs: int = 10, rng: np.random.Generator | None = None,
                      count_rule: str = "threshold"
                      ) -> tuple[list[SimilarityGroup], ClusterChoice]:
    if len(groups) <= 1:
        return list(groups), ClusterChoice(np.ones(len(groups), int), len(groups),
                                           len(groups), len(groups))
    choice = choose_clusters([g.dominant for g in groups], threshold, n_refs, rng, count_rule,
                             [g.total for g in groups])
    merged: dict[int, list[SimilarityGroup]] = {}
    for lab, grp in zip(choice.labels, groups):
        merged.setdefault(int(lab), []).append(grp)
    out = []
    for parts in merged.values():
        if len(parts) == 1:
            out.append(parts[0])
            continue
        members: dict[str, int] = {}
        origin: list[int] = []
        for p in parts:
            members.update(p.members)
            origin += p.origin
        # the dominant with the most occurrences represents the merged group
        doms = {p.dominant: p.members[p.dominant] for p in parts}
        out.append(SimilarityGroup(pick_dominant(doms), members, sorted(origin)))
    out.sort(key=lambda g: sort_key(g.dominant))
    return out, choice


def reconcile_groups(groups: Sequence[SimilarityGroup], dictionary: Iterable[str] | None = None
                     ) -> tuple[list[SimilarityGroup], list[dict]]:
    """Handle members frequent enough (> half the dominant's count) to be
    words of their own. Returns the new groups and one flag per candidate."""
    words = set(dictionary) if dictionary is not None else None
    out: list[SimilarityGroup] = []
    flags: list[dict] = []
    for grp in groups:
        dom_count = grp.members[grp.dominant]
        cands = sorted((m for m in grp.variants() if grp.members[m] * 2 > dom_count),
                       key=sort_key)
        if not cands:
            out.append(grp)
            continue
        valid = [c for c in cands if words is not None and c in words]
        for c in cands:
            flags.append({"value": c, "count": grp.members[c], "dominant": grp.dominant,
                          "dominant_count": dom_count,
                          "action": "split-valid-word" if c in valid else "kept-in-group"})
        if not valid:
            out.append(grp)
            continue
        # split: every member joins the most similar of the accepted words
        heads = [grp.dominant] + valid
        buckets: dict[str, dict[str, int]] = {h: {} for h in heads}
        for m, cnt in grp.members.items():
            if m in buckets:
                buckets[m][m] = cnt
                continue
            fm = _fold(m)
            best = max(heads, key=lambda h: (dls(fm, _fold(h)), grp.members[h]))
            buckets[best][m] = cnt
        for h in heads:
            out.append(SimilarityGroup(h, buckets[h], list(grp.origin)))
    out.sort(key=lambda g: sort_key(g.dominant))
    return out, flags


def correction_map(groups: Sequence[SimilarityGroup]) -> dict[str, str]:
    return {v: g.dominant for g in groups for v in g.variants()}


def correct_column(table: Table, attr: str, corrections: Mapping[str, str],
                   evidence: Mapping[str, dict] | None = None) -> StageResult:
    col = table.column(attr)
    row_ids = table.row_ids
    new_col = list(col)
    findings = []
    for pos, v in enumerate(col):
        if isinstance(v, str) and v in corrections:
            target = corrections[v]
            new_col[pos] = target
            path = {"rule": "dls-group-dominant", "variant": v, "dominant": target,
                    "dls": dls(_fold(v), _fold(target))}
            if evidence and v in evidence:
                path.update(evidence[v])
            findings.append(Finding("typos", row_ids[pos], [attr], Category.TYPOGRAPHICAL,
                                    path, v, target))
    if not findings:
        return StageResult(table)
    return StageResult(table.with_column(attr, new_col), findings)


@dataclass(frozen=True)
class TypoConfig:
    threshold: float = 0.7
    gap_refs: int = 10
    count_rule: str = "threshold"


def run_typos(table: Table, attrs: Sequence[str], config: TypoConfig = TypoConfig(),
              seed: int = 0, dictionary: Iterable[str] | None = None) -> StageResult:
    words = set(dictionary) if dictionary is not None else None
    findings, warnings = [], []
    details = {}
    for attr in attrs:
        counts = Counter(v for v in table.column(attr) if isinstance(v, str))
        if not counts:
            continue
        jump_groups = group_by_sorted_jumps(counts, config.threshold)
        merged, choice = cluster_dominants(jump_groups, config.threshold, config.gap_refs,
                                           rng_for(seed, "typos", attr), config.count_rule)
        final, flags = reconcile_groups(merged, words)
        for f in flags:
            warnings.append(Warning(
                "typos", {"attr": attr, "value": f["value"]}, "frequent-variant",
                f"{attr}: {f['value']!r} ({f['count']}x) falls in the group of "
                f"{f['dominant']!r} ({f['dominant_count']}x) but is frequent; "
                + ("kept as a dictionary word" if f["action"] == "split-valid-word"
                   else "corrected to the dominant, please review")))
        evidence = {}
        for grp in final:
            for v in grp.variants():
                evidence[v] = {"threshold": config.threshold,
                               "variant_count": grp.members[v],
                               "dominant_count": grp.members[grp.dominant],
                               "merged_by_clustering": len(grp.origin) > 1}
        res = correct_column(table, attr, correction_map(final), evidence)
        table = res.table
        findings += res.findings
        details[attr] = {"unique_values": len(counts), "jump_groups": len(jump_groups),
                         "clusters": choice.k, "k_gap": choice.k_gap,
                         "k_threshold": choice.k_threshold, "final_groups": len(final),
                         "corrected_cells": len(res.findings), "flags": len(flags)}
    return StageResult(table, findings, warnings, details={"columns": details})
