"""From-scratch tree learners, evaluation and keyword extraction."""

from .. import taxonomy
from ..errors import FingerprintMismatch
from .evaluation import EvalReport, evaluate
from .forest import (
    BinaryRelevanceClassifier,
    DecisionTreeClassifier,
    ExtraTreesClassifier,
    ForestClassifier,
    RandomForestClassifier,
    as_dense,
)
from .labels import PRIORITY, primary_tag, split_train_test
from .model import NONE_LABEL, CommitClassifier, KeywordReport, format_prediction, keywords
from .tree import Tree, TreeParams, build_tree, gini

__all__ = [
    "BinaryRelevanceClassifier",
    "CommitClassifier",
    "DecisionTreeClassifier",
    "EvalReport",
    "ExtraTreesClassifier",
    "ForestClassifier",
    "KeywordReport",
    "NONE_LABEL",
    "PRIORITY",
    "RandomForestClassifier",
    "Tree",
    "TreeParams",
    "build_tree",
    "evaluate",
    "format_prediction",
    "gini",
    "keywords",
    "predict",
    "primary_tag",
    "split_train_test",
    "train_forest",
    "train_multilabel",
    "train_tree",
]


def _forest_kwargs(params: TreeParams):
    return dict(
        n_trees=params.n_trees,
        max_features=params.max_features,
        min_samples_leaf=params.min_samples_leaf,
        max_depth=params.max_depth,
        seed=params.seed,
    )


def train_tree(X, y, params: TreeParams = TreeParams(split_mode="best")) -> ForestClassifier:
    """Single CART tree on the full sample."""
    kw = _forest_kwargs(params)
    kw.pop("n_trees")
    if params.split_mode == "random_threshold":
        return ForestClassifier(kind="extra_trees", n_trees=1, **kw).fit(X, y)
    return ForestClassifier(kind="tree", **kw).fit(X, y)


def train_forest(X, y, params: TreeParams = TreeParams(), kind="extra_trees", n_jobs=1) -> ForestClassifier:
    return ForestClassifier(kind=kind, n_jobs=n_jobs, **_forest_kwargs(params)).fit(X, y)


def train_multilabel(X, tagsets, params: TreeParams = TreeParams(), config="all29", kind="extra_trees", n_jobs=1):
    config = taxonomy.get_config(config)
    tagsets = [taxonomy.validate_tagset(t, config) for t in tagsets]
    est = BinaryRelevanceClassifier(
        kind=kind, tags=sorted(config.active_types), n_jobs=n_jobs, **_forest_kwargs(params)
    )
    return est.fit(X, tagsets)


def predict(model, X, fingerprint=None):
    """Predict labels for feature matrix ``X``.

    ``fingerprint`` (or ``X.fingerprint`` for a FeatureMatrix) is checked
    against the one recorded on ``model`` when both are known.
    """
    fp = fingerprint or getattr(X, "fingerprint", "")
    expected = getattr(model, "fingerprint_", None) or getattr(model, "vocab_fingerprint", None)
    if fp and expected and fp != expected:
        raise FingerprintMismatch("features were built with a different vocabulary")
    if isinstance(model, CommitClassifier):
        return model.predict_features(X)
    return list(model.predict(as_dense(X)))
