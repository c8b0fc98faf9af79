"""Reproducible per-component random streams.

Every randomized component draws from a generator keyed by the master seed
and a label (typically the column name), so results do not depend on the
order in which columns are processed.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master: int, *labels: str) -> np.random.SeedSequence:
    digest = hashlib.sha256("\x1f".join(labels).encode("utf-8")).digest()
    words = [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]
    return np.random.SeedSequence([int(master) & 0xFFFFFFFF, *words])


def rng_for(master: int, *labels: str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, *labels))
