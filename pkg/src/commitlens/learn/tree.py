"""CART-style classification tree with Gini impurity.

Nodes are stored in flat arrays, children allocated in pairs. A sample goes left when its
feature value is ``<=`` the node threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyTrainingSet, LabelWidthMismatch

LEAF = -1
SPLIT_MODES = ("best", "random_threshold")


@dataclass(frozen=True)
class TreeParams:
    max_features: int | str = 1000
    min_samples_leaf: int = 1
    max_depth: int | None = 40
    n_trees: int = 100
    split_mode: str = "random_threshold"
    seed: int = 0

    def __post_init__(self):
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0 or None")
        if self.split_mode not in SPLIT_MODES:
            raise ValueError(f"split_mode must be one of {SPLIT_MODES}")
        if self.max_features != "all" and (not isinstance(self.max_features, int) or self.max_features < 1):
            raise ValueError("max_features must be a positive int or 'all'")

    def n_candidates(self, width):
        return width if self.max_features == "all" else min(self.max_features, width)


def gini(counts) -> float:
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - np.dot(p, p))


class Tree:
    """Fitted tree: parallel node arrays."""

    def __init__(self, feature, threshold, left, right, value, impurity, n_samples, depth):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=np.int64).reshape(len(self.feature), -1)
        self.impurity = np.asarray(impurity, dtype=float)
        self.n_samples = np.asarray(n_samples, dtype=np.int64)
        self.depth = np.asarray(depth, dtype=np.int64)

    @property
    def node_count(self):
        return len(self.feature)

    @property
    def max_depth(self):
        return int(self.depth.max()) if self.node_count else 0

    def is_leaf(self, node):
        return self.feature[node] == LEAF

    def apply(self, X) -> np.ndarray:
        """Leaf index reached by every row of dense ``X``."""
        nodes = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        active = self.feature[nodes] != LEAF
        while active.any():
            r = rows[active]
            n = nodes[r]
            go_left = X[r, self.feature[n]] <= self.threshold[n]
            nodes[r] = np.where(go_left, self.left[n], self.right[n])
            active = self.feature[nodes] != LEAF
        return nodes

    def predict_proba(self, X) -> np.ndarray:
        counts = self.value[self.apply(X)].astype(float)
        return counts / counts.sum(axis=1, keepdims=True)

    def impurity_decrease(self, n_features) -> np.ndarray:
        """Sample-weighted Gini decrease per feature, summed over the splits."""
        out = np.zeros(n_features)
        for node in np.flatnonzero(self.feature != LEAF):
            l, r = self.left[node], self.right[node]
            dec = (
                self.n_samples[node] * self.impurity[node]
                - self.n_samples[l] * self.impurity[l]
                - self.n_samples[r] * self.impurity[r]
            )
            out[self.feature[node]] += max(dec, 0.0)
        return out

    def to_dict(self):
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "impurity": self.impurity.tolist(),
            "n_samples": self.n_samples.tolist(),
            "depth": self.depth.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            d["feature"], d["threshold"], d["left"], d["right"],
            d["value"], d["impurity"], d["n_samples"], d["depth"],
        )


def _best_split(Xn, yn, n_classes, cols, min_leaf):
    """Exhaustive midpoint search. Returns (score, column, threshold) or None."""
    n = Xn.shape[0]
    order = np.argsort(Xn, axis=0, kind="stable")
    xs = np.take_along_axis(Xn, order, axis=0)
    ys = yn[order]
    n_left = np.arange(1, n, dtype=float)[:, None]
    n_right = n - n_left
    sq_left = np.zeros((n - 1, Xn.shape[1]))
    sq_right = np.zeros_like(sq_left)
    for k in range(n_classes):
        hits = ys == k
        total = hits.sum(axis=0)
        cum = np.cumsum(hits, axis=0)[:-1].astype(float)
        sq_left += cum * cum
        rest = total[None, :] - cum
        sq_right += rest * rest
    score = (n_left - sq_left / n_left) + (n_right - sq_right / n_right)
    valid = xs[:-1] < xs[1:]
    valid &= (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return None
    score = np.where(valid, score, np.inf).T  # column-major so ties go to the lowest column
    flat = int(np.argmin(score))
    j, i = divmod(flat, n - 1)
    lo, hi = xs[i, j], xs[i + 1, j]
    threshold = lo + (hi - lo) / 2.0
    if not lo <= threshold < hi:
        threshold = lo
    return score[j, i] / n, cols[j], float(threshold)


def _random_split(Xn, yn, n_classes, cols, min_leaf, rng):
    """One uniform threshold per column in [min, max); keep the lowest Gini."""
    lo = Xn.min(axis=0)
    hi = Xn.max(axis=0)
    thresholds = rng.uniform(lo, hi)
    thresholds = np.where(thresholds >= hi, lo, thresholds)
    goes_left = Xn <= thresholds[None, :]
    onehot = np.zeros((Xn.shape[0], n_classes))
    onehot[np.arange(Xn.shape[0]), yn] = 1.0
    left_counts = onehot.T @ goes_left  # classes x columns
    total = onehot.sum(axis=0)[:, None]
    right_counts = total - left_counts
    n_left = left_counts.sum(axis=0)
    n_right = right_counts.sum(axis=0)
    valid = (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return None
    with np.errstate(divide="ignore", invalid="ignore"):
        score = (n_left - (left_counts**2).sum(axis=0) / n_left) + (
            n_right - (right_counts**2).sum(axis=0) / n_right
        )
    score = np.where(valid, score, np.inf)
    j = int(np.argmin(score))
    return score[j] / Xn.shape[0], cols[j], float(thresholds[j])


def build_tree(X, y, n_classes, params: TreeParams, rng, sample=None) -> Tree:
    """Grow one tree on dense ``X`` and integer labels ``y``.

    ``sample`` lists the training row indices (duplicates allowed, e.g. a
    bootstrap); defaults to every row once.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyTrainingSet("no training rows")
    if y.shape[0] != X.shape[0]:
        raise LabelWidthMismatch(f"{X.shape[0]} rows but {y.shape[0]} labels")
    if sample is None:
        sample = np.arange(X.shape[0])
    sample = np.asarray(sample, dtype=np.int64)
    width = X.shape[1]
    max_depth = np.inf if params.max_depth is None else params.max_depth
    min_leaf = params.min_samples_leaf

    feature, threshold, left, right, value, impurity, n_samples, depth = ([] for _ in range(8))

    def new_node(idx, d):
        counts = np.bincount(y[idx], minlength=n_classes)
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(counts)
        impurity.append(gini(counts))
        n_samples.append(len(idx))
        depth.append(d)
        return len(feature) - 1

    root = new_node(sample, 0)
    stack = [(root, sample)]
    while stack:
        node, idx = stack.pop()
        d = depth[node]
        if d >= max_depth or impurity[node] == 0.0 or len(idx) < 2 * min_leaf:
            continue
        Xi = X[idx]
        nonconst = np.flatnonzero(Xi.min(axis=0) < Xi.max(axis=0))
        if nonconst.size == 0:
            continue
        m = params.n_candidates(nonconst.size)
        cols = np.sort(rng.choice(nonconst, size=m, replace=False)) if m < nonconst.size else nonconst
        Xn = Xi[:, cols]
        yn = y[idx]
        if params.split_mode == "best":
            found = _best_split(Xn, yn, n_classes, cols, min_leaf)
        else:
            found = _random_split(Xn, yn, n_classes, cols, min_leaf, rng)
        if found is None:
            continue
        _, col, thr = found
        mask = X[idx, col] <= thr
        left_idx, right_idx = idx[mask], idx[~mask]
        feature[node] = int(col)
        threshold[node] = thr
        l = new_node(left_idx, d + 1)
        r = new_node(right_idx, d + 1)
        left[node], right[node] = l, r
        # depth-first, left subtree first
        stack.append((r, right_idx))
        stack.append((l, left_idx))
    return Tree(feature, threshold, left, right, value, impurity, n_samples, depth)
