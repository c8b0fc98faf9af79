"""One-dimensional isolation forest.

With a single feature there is nothing to choose when splitting, so a tree
is just a recursive partition of the line. Its leaves are consecutive
intervals, which lets a whole tree be stored as sorted split points plus a
path length per leaf; scoring a batch is one ``searchsorted`` per tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.5772156649015329


def average_path_length(n) -> np.ndarray:
    """Expected path length of an unsuccessful BST search among ``n`` points.

    c(n) = 2 H(n-1) - 2 (n-1)/n with H(i) ~ ln(i) + Euler's constant;
    c(2) = 1 and c(n) = 0 for n < 2.
    """
    n = np.asarray(n, dtype=float)
    out = np.zeros_like(n)
    big = n > 2
    out[big] = 2.0 * (np.log(n[big] - 1.0) + EULER_GAMMA) - 2.0 * (n[big] - 1.0) / n[big]
    out[n == 2] = 1.0
    return out


@dataclass
class Tree1D:
    splits: np.ndarray   # sorted, length L-1
    depths: np.ndarray   # path length per leaf interval, length L

    def path_length(self, x: np.ndarray) -> np.ndarray:
        return self.depths[np.searchsorted(self.splits, x, side="right")]


def grow_tree(sample: np.ndarray, rng: np.random.Generator, height_limit: int) -> Tree1D:
    splits: list[float] = []
    depths: list[float] = []

    def grow(xs: np.ndarray, depth: int) -> None:
        if xs.size <= 1 or depth >= height_limit or xs[0] == xs[-1]:
            # unresolved points are charged the expected remaining depth
            depths.append(depth + float(average_path_length(xs.size)))
            return
        s = rng.uniform(xs[0], xs[-1])
        cut = int(np.searchsorted(xs, s, side="left"))
        if cut == 0:  # s == min is possible in floating point
            cut = 1
            s = float(np.nextafter(xs[0], xs[-1]))
        grow(xs[:cut], depth + 1)
        splits.append(s)
        grow(xs[cut:], depth + 1)

    grow(np.sort(np.asarray(sample, dtype=float)), 0)
    return Tree1D(np.asarray(splits), np.asarray(depths))


class IsolationForest1D:
    """Ensemble of ``n_trees`` trees, each grown on a ``subsample``-sized
    draw (without replacement) from the fitting values."""

    def __init__(self, n_trees: int = 100, subsample: int = 256,
                 seed: int | np.random.Generator | None = None):
        if n_trees < 1 or subsample < 1:
            raise ValueError("n_trees and subsample must be at least 1")
        self.n_trees = n_trees
        self.subsample = subsample
        self.rng = np.random.default_rng(seed)
        self.trees: list[Tree1D] = []
        self.psi = 0

    def fit(self, values) -> "IsolationForest1D":
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            raise ValueError("cannot fit on an empty sample")
        self.psi = min(self.subsample, values.size)
        limit = math.ceil(math.log2(self.psi)) if self.psi > 1 else 0
        self.trees = []
        for _ in range(self.n_trees):
            draw = self.rng.choice(values, self.psi, replace=False)
            self.trees.append(grow_tree(draw, self.rng, limit))
        return self

    def mean_path_length(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape)
        for tree in self.trees:
            total += tree.path_length(x)
        return total / len(self.trees)

    def score(self, x) -> np.ndarray:
        """Anomaly score 2^(-E[h(x)] / c(psi)); near 1 means easily isolated."""
        if not self.trees:
            raise RuntimeError("forest is not fitted")
        norm = float(average_path_length(self.psi))
        if norm == 0.0:  # a single fitting point isolates everything at once
            return np.ones(np.shape(x))
        return np.power(2.0, -self.mean_path_length(x) / norm)


def isolation_forest_1d(values, n_trees: int = 100, subsample: int = 256,
                        threshold: float = 0.6, seed=None, fit_values=None):
    """Flags (score >= threshold) and scores for ``values``.

    The forest is grown on ``fit_values`` when given, otherwise on
    ``values`` themselves.
    """
    values = np.asarray(values, dtype=float)
    forest = IsolationForest1D(n_trees, subsample, seed)
    forest.fit(values if fit_values is None else fit_values)
    scores = forest.score(values)
    return (scores >= threshold).astype(np.int8), scores
