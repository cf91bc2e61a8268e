"""End-to-end commit classifier: cleaning, features and forest in one persisted model."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .. import taxonomy
from ..errors import (
    EmptyAfterProjection,
    EmptyTrainingSet,
    FingerprintMismatch,
    ModelLoadError,
    NoTermColumns,
)
from ..features import CommitVectorizer, MetaFeatureSpec, Vocabulary
from ..seeding import DEFAULT_SEED
from ..textprep import CleanConfig, clean_message
from .evaluation import evaluate
from .forest import BinaryRelevanceClassifier, ForestClassifier
from .labels import primary_tag

logger = logging.getLogger(__name__)

MODEL_FORMAT = "commitlens-model"
MODEL_FORMAT_VERSION = 1
MODEL_KINDS = {"tree": "tree", "rf": "random_forest", "extratrees": "extra_trees"}
NONE_LABEL = "none"


@dataclass
class KeywordReport:
    per_tag: dict = field(default_factory=dict)  # tag -> [(term, score), ...] descending

    def top(self, tag):
        ranked = self.per_tag.get(tag) or []
        return ranked[0][0] if ranked else None


def project_labels(records, config):
    """Pair each record with its tags projected onto ``config``; untagged or emptied rows are dropped."""
    kept, labels, dropped = [], [], 0
    for rec in records:
        if not rec.tags:
            dropped += 1
            continue
        try:
            labels.append(taxonomy.project_tagset(rec.tags, "all29", config))
        except EmptyAfterProjection:
            dropped += 1
            continue
        kept.append(rec)
    if dropped:
        logger.info("%d records without tags active under %s were left out", dropped, config)
    return kept, labels


class CommitClassifier(BaseEstimator, ClassifierMixin):
    """Commit-purpose classifier over ``CommitRecord`` inputs.

    ``mode="single"`` predicts one tag per commit (the primary tag of the
    ground truth); ``mode="multi"`` predicts a tag set with one binary head
    per active tag of ``config``.
    """

    def __init__(
        self,
        mode="single",
        model="extratrees",
        config="all29",
        features="bow",
        metadata=False,
        n_trees=100,
        max_features=1000,
        min_samples_leaf=1,
        max_depth=40,
        seed=DEFAULT_SEED,
        n_jobs=1,
        buckets=64,
        ngram_range=(1, 1),
        max_vocab=None,
        clean_config=None,
    ):
        self.mode = mode
        self.model = model
        self.config = config
        self.features = features
        self.metadata = metadata
        self.n_trees = n_trees
        self.max_features = max_features
        self.min_samples_leaf = min_samples_leaf
        self.max_depth = max_depth
        self.seed = seed
        self.n_jobs = n_jobs
        self.buckets = buckets
        self.ngram_range = ngram_range
        self.max_vocab = max_vocab
        self.clean_config = clean_config

    # -- construction -----------------------------------------------------

    def _estimator(self):
        if self.model not in MODEL_KINDS:
            raise ValueError(f"model must be one of {sorted(MODEL_KINDS)}, got {self.model!r}")
        common = dict(
            kind=MODEL_KINDS[self.model],
            n_trees=self.n_trees,
            max_features=self.max_features,
            min_samples_leaf=self.min_samples_leaf,
            max_depth=self.max_depth,
            seed=self.seed,
            n_jobs=self.n_jobs,
        )
        if self.mode == "single":
            return ForestClassifier(**common)
        if self.mode == "multi":
            return BinaryRelevanceClassifier(tags=sorted(taxonomy.get_config(self.config).active_types), **common)
        raise ValueError(f"mode must be 'single' or 'multi', got {self.mode!r}")

    def _tokens(self, records):
        return [clean_message(r.message, self.clean_config_) for r in records]

    def _features(self, records, lookup=None):
        return self.vectorizer_.transform_features(self._tokens(records), records, lookup)

    def fit(self, X, y=None, lookup=None):
        """Fit on records ``X``; ``y`` (tag sets) defaults to each record's tags."""
        records = list(X)
        config = taxonomy.get_config(self.config)
        if y is None:
            records, tagsets = project_labels(records, config)
        else:
            tagsets = [taxonomy.validate_tagset(t, config) for t in y]
        if not records:
            raise EmptyTrainingSet("no labeled records to train on")
        self.clean_config_ = self.clean_config or CleanConfig()
        self.vectorizer_ = CommitVectorizer(
            mode=self.features,
            ngram_range=tuple(self.ngram_range),
            max_features=self.max_vocab,
            metadata=self.metadata,
            buckets=self.buckets,
            salt=self.clean_config_.fingerprint(),
        )
        tokens = self._tokens(records)
        self.vectorizer_.fit(tokens)
        fm = self.vectorizer_.transform_features(tokens, records, lookup)
        targets = [primary_tag(t) for t in tagsets] if self.mode == "single" else tagsets
        self.estimator_ = self._estimator().fit(fm.matrix, targets)
        self.fingerprint_ = self.vectorizer_.fingerprint_
        return self

    # -- inference --------------------------------------------------------

    def predict_features(self, fm):
        check_is_fitted(self, "estimator_")
        if getattr(fm, "fingerprint", "") and fm.fingerprint != self.fingerprint_:
            raise FingerprintMismatch("features were built with a different vocabulary")
        out = self.estimator_.predict(fm.matrix if hasattr(fm, "matrix") else fm)
        return list(out)

    def predict(self, X, lookup=None):
        return self.predict_features(self._features(list(X), lookup))

    def vote_fractions(self, X, lookup=None):
        return self.estimator_.predict_proba(self._features(list(X), lookup).matrix)

    def predict_messages(self, messages):
        """Classify bare messages; only valid for models without metadata features."""
        check_is_fitted(self, "estimator_")
        if self.vectorizer_.meta_spec_ is not None:
            raise ModelLoadError("this model needs commit metadata; it cannot classify bare messages")
        tokens = [clean_message(m, self.clean_config_) for m in messages]
        return self.predict_features(self.vectorizer_.transform_features(tokens))

    def truth(self, records):
        """Ground truth in this model's label space, aligned with ``project_labels``."""
        records, tagsets = project_labels(records, taxonomy.get_config(self.config))
        if self.mode == "single":
            return records, [primary_tag(t) for t in tagsets]
        return records, tagsets

    def evaluate(self, records, lookup=None):
        records, truth = self.truth(list(records))
        pred = self.predict(records, lookup)
        return evaluate(pred, truth, self.mode)

    @property
    def vocabulary_(self) -> Vocabulary:
        return self.vectorizer_.vocabulary_

    def keywords(self, top_k=10) -> KeywordReport:
        return keywords(self.estimator_, self.vocabulary_, top_k)

    # -- persistence ------------------------------------------------------

    def to_dict(self):
        check_is_fitted(self, "estimator_")
        params = self.get_params()
        params["clean_config"] = None
        params["n_jobs"] = 1
        params["ngram_range"] = list(self.ngram_range)
        cfg = taxonomy.get_config(self.config)
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_FORMAT_VERSION,
            "params": params,
            "label_space": sorted(cfg.active_types) if self.mode == "multi" else None,
            "clean_config": self.clean_config_.to_dict(),
            "vocabulary": self.vocabulary_.to_dict(),
            "vectorizer": {
                "mode": self.vectorizer_.mode,
                "meta_spec": self.vectorizer_.meta_spec_.to_dict() if self.vectorizer_.meta_spec_ else None,
            },
            "vocab_fingerprint": self.fingerprint_,
            "estimator": self.estimator_.to_dict(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())

    @classmethod
    def from_dict(cls, d):
        if d.get("format") != MODEL_FORMAT:
            raise ModelLoadError("not a commitlens model file")
        if d.get("version") != MODEL_FORMAT_VERSION:
            raise ModelLoadError(f"model format version {d.get('version')} is not supported")
        params = dict(d["params"])
        params["ngram_range"] = tuple(params["ngram_range"])
        model = cls(**params)
        model.clean_config_ = CleanConfig.from_dict(d["clean_config"])
        vec = CommitVectorizer(
            mode=d["vectorizer"]["mode"],
            ngram_range=params["ngram_range"],
            max_features=params["max_vocab"],
            metadata=d["vectorizer"]["meta_spec"] is not None,
            buckets=params["buckets"],
            salt=model.clean_config_.fingerprint(),
        )
        vec.vocabulary_ = Vocabulary.from_dict(d["vocabulary"])
        spec = d["vectorizer"]["meta_spec"]
        vec.meta_spec_ = MetaFeatureSpec.from_dict(spec) if spec else None
        model.vectorizer_ = vec
        model.fingerprint_ = vec.fingerprint_
        if model.fingerprint_ != d["vocab_fingerprint"]:
            raise FingerprintMismatch("model vocabulary does not match its recorded fingerprint")
        est = d["estimator"]
        model.estimator_ = (
            BinaryRelevanceClassifier.from_dict(est) if "heads" in est else ForestClassifier.from_dict(est)
        )
        return model

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                d = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ModelLoadError(f"cannot load model {path}: {exc}") from exc
        try:
            return cls.from_dict(d)
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelLoadError(f"malformed model file {path}: {exc}") from exc


def _ranked(importances, terms, top_k):
    scored = [(terms[j], float(importances[j])) for j in range(len(terms)) if importances[j] > 0]
    scored.sort(key=lambda ts: (-ts[1], ts[0]))
    return scored[:top_k] if top_k else scored


def keywords(model, vocab: Vocabulary, top_k=10) -> KeywordReport:
    """Rank message terms by Gini importance, per tag for binary-relevance models.

    Term columns are the first ``len(vocab)`` feature columns. For single-label
    models the ranking is reported under the key ``"*"``.
    """
    if isinstance(model, CommitClassifier):
        vocab = model.vocabulary_
        model = model.estimator_
    terms = vocab.terms
    if not terms:
        raise NoTermColumns("model has no message-term features")
    if isinstance(model, BinaryRelevanceClassifier):
        per_tag = {tag: _ranked(model.feature_importances(tag), terms, top_k) for tag in model.classes_}
    else:
        per_tag = {"*": _ranked(model.feature_importances_, terms, top_k)}
    return KeywordReport(per_tag)


def format_prediction(pred):
    if isinstance(pred, (frozenset, set)):
        return ",".join(sorted(pred)) if pred else NONE_LABEL
    return pred if pred else NONE_LABEL
