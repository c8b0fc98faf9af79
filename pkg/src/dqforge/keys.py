"""Primary-key discovery.

Two passes: a quick name-based guess (a single column whose name looks like
an identifier), then a bounded search over combinations of low-missing
columns, smallest combinations first.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .table import Cell, ColumnKind, ColumnProfile, Table

KEY_TOKENS = ("ID", "CODE", "KEY")


@dataclass(frozen=True)
class KeyCandidate:
    attr: str
    name_match: bool
    missing_rate: float


@dataclass(frozen=True)
class PrimaryKey:
    attrs: tuple[str, ...]
    duplicate_rate: float
    method: str  # "quickwin", "search" or "override"

    def to_json(self) -> dict:
        return {"attrs": list(self.attrs), "duplicate_rate": self.duplicate_rate,
                "method": self.method}


def is_key_like_name(name: str, tokens: Sequence[str] = KEY_TOKENS) -> bool:
    upper = name.upper()
    return any(t.upper() in upper for t in tokens)


def factorize(values: Sequence[Cell]) -> np.ndarray:
    """Integer code per cell; missing cells get -1."""
    lookup: dict[Cell, int] = {}
    out = np.empty(len(values), dtype=np.int64)
    for i, v in enumerate(values):
        if v is None:
            out[i] = -1
        else:
            code = lookup.get(v)
            if code is None:
                code = lookup[v] = len(lookup)
            out[i] = code
    return out


def combine_codes(codes: Sequence[np.ndarray]) -> np.ndarray:
    """Joint code for a projection; -1 wherever any part is missing."""
    joint = codes[0].copy()
    if joint.size == 0:
        return joint
    for other in codes[1:]:
        bad = (joint < 0) | (other < 0)
        width = int(other.max()) + 2
        merged = joint * width + other
        _, inv = np.unique(merged, return_inverse=True)
        joint = inv.astype(np.int64)
        joint[bad] = -1
    return joint


def projection_duplicate_rate(codes: np.ndarray) -> float:
    """Surplus rows per total rows: (#complete rows - #distinct projections) / n.

    Rows with a missing part are left out of the collision count.
    """
    n = codes.size
    if n == 0:
        return 0.0
    present = codes[codes >= 0]
    if present.size == 0:
        return 0.0
    distinct = np.unique(present).size
    return (present.size - distinct) / n


class _CodeCache:
    def __init__(self, table: Table):
        self.table = table
        self._codes: dict[str, np.ndarray] = {}

    def __call__(self, attr: str) -> np.ndarray:
        if attr not in self._codes:
            self._codes[attr] = factorize(self.table.column(attr))
        return self._codes[attr]

    def rate(self, attrs: Sequence[str]) -> float:
        return projection_duplicate_rate(combine_codes([self(a) for a in attrs]))


def find_candidates(table: Table, profiles: Mapping[str, ColumnProfile],
                    missing_threshold: float = 0.05,
                    tokens: Sequence[str] = KEY_TOKENS) -> list[KeyCandidate]:
    out = []
    for a in table.attributes:
        rate = profiles[a].missing_rate
        if rate < missing_threshold:
            out.append(KeyCandidate(a, is_key_like_name(a, tokens), rate))
    return out


def _is_measurement(profile: ColumnProfile) -> bool:
    """Real-valued numeric column with fractional values (not identifier-like)."""
    if profile.kind is not ColumnKind.NUMERIC:
        return False
    return any(isinstance(v, float) and not v.is_integer() for v in profile.frequency_table)


def try_pattern_quickwin(table: Table, candidates: Sequence[KeyCandidate],
                         profiles: Mapping[str, ColumnProfile],
                         dup_threshold: float = 0.05,
                         _cache: _CodeCache | None = None) -> PrimaryKey | None:
    named = [c for c in candidates if c.name_match]
    if len(named) != 1:
        return None
    attr = named[0].attr
    if _is_measurement(profiles[attr]):
        return None
    cache = _cache or _CodeCache(table)
    rate = cache.rate([attr])
    if rate > dup_threshold:
        return None
    return PrimaryKey((attr,), rate, "quickwin")


def search_order(candidates: Sequence[KeyCandidate], max_combo_size: int):
    """Combinations by size; within a size, those made only of name-matched
    attributes come first, then the rest, each in attribute order."""
    named = [c.attr for c in candidates if c.name_match]
    for size in range(1, max_combo_size + 1):
        first = list(combinations(named, size))
        seen = set(first)
        yield from first
        for combo in combinations([c.attr for c in candidates], size):
            if combo not in seen:
                yield combo


def uniqueness_search(table: Table, candidates: Sequence[KeyCandidate],
                      profiles: Mapping[str, ColumnProfile],
                      max_combo_size: int = 2, dup_threshold: float = 0.05,
                      _cache: _CodeCache | None = None) -> PrimaryKey | None:
    if max_combo_size < 1:
        raise ValueError("max_combo_size must be at least 1")
    # measurement-like reals are never proposed as identifiers
    usable = [c for c in candidates if not _is_measurement(profiles[c.attr])]
    cache = _cache or _CodeCache(table)
    for combo in search_order(usable, max_combo_size):
        rate = cache.rate(combo)
        if rate <= dup_threshold:
            return PrimaryKey(tuple(combo), rate, "search")
    return None


def discover_primary_key(table: Table, profiles: Mapping[str, ColumnProfile],
                         missing_threshold: float = 0.05, dup_threshold: float = 0.05,
                         max_combo_size: int = 2) -> tuple[PrimaryKey | None, list[KeyCandidate]]:
    """Return the discovered key (or None) and the candidate list it came from."""
    candidates = find_candidates(table, profiles, missing_threshold)
    if not candidates:
        return None, candidates
    cache = _CodeCache(table)
    key = try_pattern_quickwin(table, candidates, profiles, dup_threshold, cache)
    if key is None:
        key = uniqueness_search(table, candidates, profiles, max_combo_size,
                                dup_threshold, cache)
    return key, candidates


def key_from_override(table: Table, attrs: Sequence[str]) -> PrimaryKey:
    for a in attrs:
        table.column(a)
    rate = _CodeCache(table).rate(list(attrs))
    return PrimaryKey(tuple(attrs), rate, "override")
