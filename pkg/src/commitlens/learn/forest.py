"""Tree ensembles with a scikit-learn style estimator interface."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ..errors import EmptyTrainingSet, LabelWidthMismatch, WidthMismatch
from ..seeding import DEFAULT_SEED, check_seed, substream
from .tree import Tree, TreeParams, build_tree

KINDS = ("tree", "random_forest", "extra_trees")


def as_dense(X) -> np.ndarray:
    if sp.issparse(X):
        X = X.toarray()
    elif hasattr(X, "matrix"):  # FeatureMatrix
        X = X.matrix.toarray()
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D feature matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature matrix contains non-finite values")
    return X


def _grow(X, y, n_classes, params, kind, seed, index):
    rng = substream(seed, f"tree/{index}")
    sample = None
    if kind == "random_forest":
        sample = rng.integers(0, X.shape[0], size=X.shape[0])
    return build_tree(X, y, n_classes, params, rng, sample)


class ForestClassifier(BaseEstimator, ClassifierMixin):
    """Decision tree, random forest or extra-trees classifier.

    ``kind="tree"`` grows one tree on the full sample with exhaustive splits;
    ``"random_forest"`` grows ``n_trees`` on bootstraps with exhaustive splits;
    ``"extra_trees"`` grows ``n_trees`` on the full sample with one random
    threshold per candidate feature. Predictions average the leaf class
    frequencies over trees; ties go to the smallest class label.
    """

    def __init__(
        self,
        kind="extra_trees",
        n_trees=100,
        max_features=1000,
        min_samples_leaf=1,
        max_depth=40,
        seed=DEFAULT_SEED,
        n_jobs=1,
    ):
        self.kind = kind
        self.n_trees = n_trees
        self.max_features = max_features
        self.min_samples_leaf = min_samples_leaf
        self.max_depth = max_depth
        self.seed = seed
        self.n_jobs = n_jobs

    def tree_params(self) -> TreeParams:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        return TreeParams(
            max_features=self.max_features,
            min_samples_leaf=self.min_samples_leaf,
            max_depth=self.max_depth,
            n_trees=1 if self.kind == "tree" else self.n_trees,
            split_mode="random_threshold" if self.kind == "extra_trees" else "best",
            seed=check_seed(self.seed),
        )

    def fit(self, X, y):
        params = self.tree_params()
        X = as_dense(X)
        y = np.asarray(y)
        if X.shape[0] == 0:
            raise EmptyTrainingSet("no training rows")
        if y.shape[0] != X.shape[0]:
            raise LabelWidthMismatch(f"{X.shape[0]} rows but {y.shape[0]} labels")
        self.classes_, codes = np.unique(y, return_inverse=True)
        self.n_features_in_ = X.shape[1]
        jobs = [delayed(_grow)(X, codes, len(self.classes_), params, self.kind, params.seed, i) for i in range(params.n_trees)]
        if self.n_jobs == 1:
            self.trees_ = [fn(*a, **kw) for fn, a, kw in jobs]
        else:
            self.trees_ = Parallel(n_jobs=self.n_jobs, prefer="threads")(jobs)
        return self

    def _check_width(self, X):
        check_is_fitted(self, "trees_")
        X = as_dense(X)
        if X.shape[1] != self.n_features_in_:
            raise WidthMismatch(f"model expects {self.n_features_in_} features, got {X.shape[1]}")
        return X

    def predict_proba(self, X) -> np.ndarray:
        X = self._check_width(X)
        proba = np.zeros((X.shape[0], len(self.classes_)))
        for tree in self.trees_:
            proba += tree.predict_proba(X)
        return proba / len(self.trees_)

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    @property
    def impurity_decrease_(self) -> np.ndarray:
        check_is_fitted(self, "trees_")
        return sum(t.impurity_decrease(self.n_features_in_) for t in self.trees_)

    @property
    def feature_importances_(self) -> np.ndarray:
        """Total Gini decrease per feature over all trees, normalized to sum to 1."""
        total = self.impurity_decrease_
        s = total.sum()
        return total / s if s > 0 else total

    def to_dict(self):
        check_is_fitted(self, "trees_")
        params = self.get_params()
        params["n_jobs"] = 1  # runtime setting; keeps serial and parallel files identical
        return {
            "params": params,
            "classes": self.classes_.tolist(),
            "n_features": int(self.n_features_in_),
            "trees": [t.to_dict() for t in self.trees_],
        }

    @classmethod
    def from_dict(cls, d):
        est = cls(**d["params"])
        est.classes_ = np.asarray(d["classes"])
        est.n_features_in_ = d["n_features"]
        est.trees_ = [Tree.from_dict(t) for t in d["trees"]]
        return est


def DecisionTreeClassifier(**kw) -> ForestClassifier:
    return ForestClassifier(kind="tree", n_trees=1, **kw)


def RandomForestClassifier(**kw) -> ForestClassifier:
    return ForestClassifier(kind="random_forest", **kw)


def ExtraTreesClassifier(**kw) -> ForestClassifier:
    return ForestClassifier(kind="extra_trees", **kw)


class BinaryRelevanceClassifier(BaseEstimator, ClassifierMixin):
    """One binary forest per tag sharing the same features.

    ``fit`` takes ``Y`` as a list of tag sets; ``tags`` fixes the label space
    (defaults to the union of tags seen). A tag is predicted when the fraction
    of tree votes for it is at least ``threshold``.
    """

    def __init__(
        self,
        kind="extra_trees",
        n_trees=100,
        max_features=1000,
        min_samples_leaf=1,
        max_depth=40,
        seed=DEFAULT_SEED,
        n_jobs=1,
        tags=None,
        threshold=0.5,
    ):
        self.kind = kind
        self.n_trees = n_trees
        self.max_features = max_features
        self.min_samples_leaf = min_samples_leaf
        self.max_depth = max_depth
        self.seed = seed
        self.n_jobs = n_jobs
        self.tags = tags
        self.threshold = threshold

    def _head(self, tag):
        head_seed = int(substream(check_seed(self.seed), f"head/{tag}").integers(0, 2**63))
        return ForestClassifier(
            kind=self.kind,
            n_trees=self.n_trees,
            max_features=self.max_features,
            min_samples_leaf=self.min_samples_leaf,
            max_depth=self.max_depth,
            seed=head_seed,
            n_jobs=self.n_jobs,
        )

    def fit(self, X, Y):
        X = as_dense(X)
        Y = [frozenset(t) for t in Y]
        if X.shape[0] == 0:
            raise EmptyTrainingSet("no training rows")
        if len(Y) != X.shape[0]:
            raise LabelWidthMismatch(f"{X.shape[0]} rows but {len(Y)} tag sets")
        tags = sorted(self.tags) if self.tags is not None else sorted(set().union(*Y))
        self.classes_ = np.asarray(tags, dtype=object)
        self.n_features_in_ = X.shape[1]
        self.heads_ = {}
        for tag in tags:
            y = np.array([1 if tag in t else 0 for t in Y])
            self.heads_[tag] = self._head(tag).fit(X, y)
        return self

    def vote_fractions(self, X) -> np.ndarray:
        """Rows x tags matrix of the positive vote fraction per head."""
        check_is_fitted(self, "heads_")
        X = as_dense(X)
        if X.shape[1] != self.n_features_in_:
            raise WidthMismatch(f"model expects {self.n_features_in_} features, got {X.shape[1]}")
        out = np.zeros((X.shape[0], len(self.classes_)))
        for j, tag in enumerate(self.classes_):
            head = self.heads_[tag]
            pos = np.flatnonzero(head.classes_ == 1)
            if pos.size:
                out[:, j] = head.predict_proba(X)[:, pos[0]]
        return out

    predict_proba = vote_fractions

    def predict(self, X):
        votes = self.vote_fractions(X)
        return [frozenset(self.classes_[row >= self.threshold]) for row in votes]

    def feature_importances(self, tag) -> np.ndarray:
        return self.heads_[tag].feature_importances_

    def to_dict(self):
        check_is_fitted(self, "heads_")
        params = self.get_params()
        params["tags"] = list(self.classes_)
        params["n_jobs"] = 1
        return {
            "params": params,
            "classes": list(self.classes_),
            "n_features": int(self.n_features_in_),
            "heads": {tag: self.heads_[tag].to_dict() for tag in self.classes_},
        }

    @classmethod
    def from_dict(cls, d):
        est = cls(**d["params"])
        est.classes_ = np.asarray(d["classes"], dtype=object)
        est.n_features_in_ = d["n_features"]
        est.heads_ = {tag: ForestClassifier.from_dict(h) for tag, h in d["heads"].items()}
        return est
