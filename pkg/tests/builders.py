"""Deterministic synthetic inputs for tests."""

import numpy as np

from dqforge.bench import _edit_once
from dqforge.table import Table
from dqforge.typos import dls

US_STATES = [
    "Alabama", "Alaska", "Arizona", "Arkansas", "California", "Colorado", "Connecticut",
    "Delaware", "Florida", "Georgia", "Hawaii", "Idaho", "Illinois", "Indiana", "Iowa",
    "Kansas", "Kentucky", "Louisiana", "Maine", "Maryland", "Massachusetts", "Michigan",
    "Minnesota", "Mississippi", "Missouri", "Montana", "Nebraska", "Nevada", "New Hampshire",
    "New Jersey", "New Mexico", "New York", "North Carolina", "North Dakota", "Ohio",
    "Oklahoma", "Oregon", "Pennsylvania", "Rhode Island", "South Carolina", "South Dakota",
    "Tennessee", "Texas", "Utah", "Vermont", "Virginia", "Washington", "West Virginia",
    "Wisconsin", "Wyoming",
]


def case_flip(word: str, rng: np.random.Generator) -> str:
    letters = [i for i, ch in enumerate(word) if ch.isalpha()]
    i = letters[int(rng.integers(len(letters)))]
    return word[:i] + word[i].swapcase() + word[i + 1:]


def corrupt(word: str, rng: np.random.Generator, case_share: float = 0.3) -> str:
    return case_flip(word, rng) if rng.random() < case_share else _edit_once(word, rng)


def state_like_counts(n_unique: int = 102, seed: int = 0) -> dict[str, int]:
    """Fifty frequent state names plus rare corrupted spellings of them."""
    rng = np.random.default_rng(seed)
    counts = {s: int(rng.integers(300, 3000)) for s in US_STATES}
    while len(counts) < n_unique:
        v = corrupt(US_STATES[int(rng.integers(len(US_STATES)))], rng)
        counts.setdefault(v, int(rng.integers(1, 4)))
    return counts


def separated_vocabulary(words, threshold=0.7):
    """Greedy subset whose members are pairwise less similar than ``threshold``
    even after case folding, with a margin for one edit on either side."""
    kept = []
    for w in words:
        if all(dls(w.casefold(), k.casefold()) < threshold - 0.25 for k in kept):
            kept.append(w)
    return kept


def typo_corpus(n_rows: int, words, n_variants: int, seed: int = 0,
                threshold: float = 0.7, max_variant_count: int = 3):
    """Column of frequent true words with rare case flips and single edits.

    Returns the column and ``{position: true word}`` for every corrupted cell.
    A variant is kept only when it is closer to its own word than the
    threshold and farther than it from every other word and variant source.
    """
    rng = np.random.default_rng(seed)
    words = list(words)
    weights = rng.uniform(0.5, 1.5, len(words))
    col = [words[i] for i in rng.choice(len(words), n_rows, p=weights / weights.sum())]
    variants: dict[str, str] = {}
    while len(variants) < n_variants:
        src = words[int(rng.integers(len(words)))]
        v = corrupt(src, rng)
        if v in variants or v in words:
            continue
        if dls(v.casefold(), src.casefold()) < threshold:
            continue
        if any(dls(v.casefold(), w.casefold()) >= threshold for w in words if w != src):
            continue
        variants[v] = src
    truth = {}
    positions = iter(rng.permutation(n_rows))
    for v, src in variants.items():
        placed = 0
        want = int(rng.integers(1, max_variant_count + 1))
        while placed < want:
            p = int(next(positions))
            if col[p] == src:
                col[p] = v
                truth[p] = src
                placed += 1
    return col, truth


def planted_rule_table(n_groups: int = 10, rows_per_group: int = 200, bad_per_group: int = 1,
                       seed: int = 0):
    """``model`` determines ``drive``; a few rows
    per model carry a wrong drive. Two independent noise columns ride along.

    Returns the table and ``{row_id: correct drive}`` for the corrupted rows.
    """
    rng = np.random.default_rng(seed)
    n = n_groups * rows_per_group
    # every drive is shared by at least two models, so drive -> model never holds
    drives = ["Two Wheel", "Four Wheel", "All Wheel", "Track", "Half Track", "Skid"]
    drives = drives[:max(2, min(len(drives), n_groups // 2))]
    model = np.repeat(np.arange(n_groups), rows_per_group)
    rng.shuffle(model)
    drive = [drives[g % len(drives)] for g in model]
    truth = {}
    for g in range(n_groups):
        rows = rng.choice(np.flatnonzero(model == g), bad_per_group, replace=False)
        for r in rows:
            right = drives[g % len(drives)]
            wrong = [d for d in drives if d != right]
            drive[r] = wrong[int(rng.integers(len(wrong)))]
            truth[int(r)] = right
    table = Table({
        "model": [f"MX{g:02d}" for g in model],
        "drive": drive,
        "colour": [["red", "blue", "green", "black", "white", "grey"][i]
                   for i in rng.integers(0, 6, n)],
        "region": [["north", "south", "east", "west", "centre"][i]
                   for i in rng.integers(0, 5, n)],
    })
    return table, truth
