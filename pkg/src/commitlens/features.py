"""Numeric features for commits: BoW / TF-IDF over message terms plus a metadata block."""

from __future__ import annotations

import hashlib
import json
import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .errors import EmptyCorpus, NoParent, ParseError, RowCountMismatch

logger = logging.getLogger(__name__)

VOCAB_FORMAT_VERSION = 1


@dataclass(frozen=True)
class Vocabulary:
    term_to_index: dict
    ngram_range: tuple = (1, 1)
    max_features: int | None = None
    df: dict = field(default_factory=dict)
    n_docs: int = 0
    salt: str = ""  # fingerprint of the cleaning config that produced the tokens

    def __len__(self):
        return len(self.term_to_index)

    @property
    def terms(self):
        return sorted(self.term_to_index, key=self.term_to_index.__getitem__)

    @property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(json.dumps([list(self.ngram_range), self.max_features, self.n_docs, self.salt]).encode())
        for term in self.terms:
            h.update(f"{term}\t{self.df.get(term, 0)}\n".encode("utf-8"))
        return h.hexdigest()

    def idf(self) -> np.ndarray:
        """Smoothed idf, ``ln((1 + N) / (1 + df)) + 1``, in column order."""
        df = np.array([self.df.get(t, 0) for t in self.terms], dtype=float)
        return np.log((1.0 + self.n_docs) / (1.0 + df)) + 1.0

    def dumps(self) -> str:
        lines = [
            f"# commitlens vocabulary\tversion={VOCAB_FORMAT_VERSION}",
            f"# ngram_range\t{self.ngram_range[0]}\t{self.ngram_range[1]}",
            f"# max_features\t{'' if self.max_features is None else self.max_features}",
            f"# n_docs\t{self.n_docs}",
            f"# salt\t{self.salt}",
            f"# fingerprint\t{self.fingerprint}",
        ]
        lines += [f"{t}\t{self.term_to_index[t]}\t{self.df.get(t, 0)}" for t in self.terms]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Vocabulary":
        header = {}
        term_to_index, df = {}, {}
        for line_no, line in enumerate(text.splitlines(), 1):
            if not line:
                continue
            parts = line.split("\t")
            if line.startswith("# "):
                header[parts[0][2:]] = parts[1:]
                continue
            if len(parts) != 3:
                raise ParseError(line_no, "vocabulary rows are term<TAB>index<TAB>df")
            term_to_index[parts[0]] = int(parts[1])
            df[parts[0]] = int(parts[2])
        max_features = header.get("max_features", [""])[0]
        vocab = cls(
            term_to_index,
            tuple(int(v) for v in header["ngram_range"]),
            int(max_features) if max_features else None,
            df,
            int(header["n_docs"][0]),
            header.get("salt", [""])[0],
        )
        expected = header.get("fingerprint", [None])[0]
        if expected and expected != vocab.fingerprint:
            raise ParseError(0, "vocabulary fingerprint does not match its contents")
        return vocab

    def to_dict(self) -> dict:
        return {
            "terms": self.terms,
            "df": [self.df.get(t, 0) for t in self.terms],
            "ngram_range": list(self.ngram_range),
            "max_features": self.max_features,
            "n_docs": self.n_docs,
            "salt": self.salt,
        }

    @classmethod
    def from_dict(cls, d) -> "Vocabulary":
        return cls(
            {t: i for i, t in enumerate(d["terms"])},
            tuple(d["ngram_range"]),
            d["max_features"],
            dict(zip(d["terms"], d["df"])),
            d["n_docs"],
            d.get("salt", ""),
        )


@dataclass
class FeatureMatrix:
    matrix: sp.csr_matrix
    column_meta: list  # [("term", t) | ("meta", name)]
    fingerprint: str = ""  # of the fitted featurizer, when known

    @property
    def n_rows(self):
        return self.matrix.shape[0]

    @property
    def n_cols(self):
        return self.matrix.shape[1]

    @property
    def shape(self):
        return self.matrix.shape

    def entries(self):
        coo = self.matrix.tocoo()
        return sorted(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))

    def toarray(self):
        return self.matrix.toarray()

    def term_columns(self):
        return [j for j, (kind, _) in enumerate(self.column_meta) if kind == "term"]


def ngrams(tokens, ngram_range=(1, 1)):
    lo, hi = ngram_range
    for n in range(lo, hi + 1):
        for i in range(len(tokens) - n + 1):
            yield " ".join(tokens[i : i + n])


def fit_vocabulary(corpus, ngram_range=(1, 1), max_features=None, salt="") -> Vocabulary:
    corpus = list(corpus)
    if not corpus:
        raise EmptyCorpus("cannot fit a vocabulary on an empty corpus")
    ngram_range = tuple(ngram_range)
    tf, df = Counter(), Counter()
    for tokens in corpus:
        grams = list(ngrams(tokens, ngram_range))
        tf.update(grams)
        df.update(set(grams))
    terms = sorted(tf)
    if max_features is not None and len(terms) > max_features:
        terms = sorted(sorted(tf, key=lambda t: (-tf[t], t))[:max_features])
    return Vocabulary(
        {t: i for i, t in enumerate(terms)},
        ngram_range,
        max_features,
        {t: df[t] for t in terms},
        len(corpus),
        salt,
    )


def _count_matrix(corpus, vocab: Vocabulary) -> sp.csr_matrix:
    indptr, indices, data = [0], [], []
    index = vocab.term_to_index
    for tokens in corpus:
        counts = Counter(g for g in ngrams(tokens, vocab.ngram_range) if g in index)
        for term in sorted(counts, key=index.__getitem__):
            indices.append(index[term])
            data.append(float(counts[term]))
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.array(data, dtype=float), np.array(indices, dtype=np.int64), np.array(indptr)),
        shape=(len(indptr) - 1, len(vocab)),
    )


def _term_meta(vocab):
    return [("term", t) for t in vocab.terms]


def bow_transform(corpus, vocab: Vocabulary) -> FeatureMatrix:
    return FeatureMatrix(_count_matrix(list(corpus), vocab), _term_meta(vocab))


def tfidf_transform(corpus, vocab: Vocabulary) -> FeatureMatrix:
    counts = _count_matrix(list(corpus), vocab)
    weighted = counts @ sp.diags(vocab.idf()) if len(vocab) else counts
    weighted = sp.csr_matrix(weighted)
    norms = np.sqrt(np.asarray(weighted.multiply(weighted).sum(axis=1)).ravel())
    norms[norms == 0] = 1.0
    weighted = sp.csr_matrix(sp.diags(1.0 / norms) @ weighted)
    return FeatureMatrix(weighted, _term_meta(vocab))


# ---------------------------------------------------------------------------
# metadata block

DEFAULT_NUMERIC = (
    "author_time",
    "sonarqube.classes",
    "sonarqube.files",
    "sonarqube.functions",
    "sonarqube.ncloc",
    "findbugs.total_bugs",
    "findbugs.total_size",
    "files_changed",
)
RECORD_FIELDS = {"author_time", "files_changed"}


@dataclass(frozen=True)
class MetaFeatureSpec:
    """Which metadata columns to build.

    ``numeric`` entries are either a record field (``author_time``,
    ``files_changed``) or a metric key, in which case the column holds the
    child-minus-parent change of that metric.
    """

    numeric: tuple = DEFAULT_NUMERIC
    categorical: tuple = ("project", "author_email")
    buckets: int = 64

    def __post_init__(self):
        if self.buckets < 2:
            raise ValueError("buckets must be >= 2")

    @property
    def width(self):
        return len(self.numeric) + self.buckets * len(self.categorical)

    @property
    def delta_keys(self):
        return [k for k in self.numeric if k not in RECORD_FIELDS]

    def column_names(self):
        names = [k if k in RECORD_FIELDS else f"delta({k})" for k in self.numeric]
        for cat in self.categorical:
            names += [f"{cat}#{b}" for b in range(self.buckets)]
        return names

    def to_dict(self):
        return {"numeric": list(self.numeric), "categorical": list(self.categorical), "buckets": self.buckets}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["numeric"]), tuple(d["categorical"]), d["buckets"])


def stable_bucket(value: str, buckets: int) -> int:
    """First 8 bytes of SHA-256, big-endian, modulo ``buckets``."""
    digest = hashlib.sha256(value.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % buckets


def _record_value(record, key):
    if key == "author_time":
        return float(record.author_time)
    if key == "files_changed":
        return float(record.diffstat.files_changed) if record.diffstat else 0.0
    raise KeyError(key)


def metadata_features(record, parent, spec: MetaFeatureSpec = MetaFeatureSpec()) -> np.ndarray:
    """Metadata row for ``record``; metric deltas are taken against ``parent``.

    A missing metric on either side yields a zero delta and a logged warning.
    Raises :class:`NoParent` when deltas are requested and ``parent`` is None.
    """
    if parent is None and spec.delta_keys:
        raise NoParent(f"{record.sha} has no parent to diff metrics against")
    row = np.zeros(spec.width)
    for j, key in enumerate(spec.numeric):
        if key in RECORD_FIELDS:
            row[j] = _record_value(record, key)
            continue
        child_m = record.metrics or {}
        parent_m = parent.metrics or {}
        if key in child_m and key in parent_m:
            row[j] = child_m[key] - parent_m[key]
        else:
            logger.warning("MissingMetric: %s for %s or its parent; delta set to 0", key, record.sha)
    offset = len(spec.numeric)
    for cat in spec.categorical:
        row[offset + stable_bucket(str(getattr(record, cat)), spec.buckets)] = 1.0
        offset += spec.buckets
    return row


def metadata_matrix(records, lookup=None, spec: MetaFeatureSpec = MetaFeatureSpec()) -> FeatureMatrix:
    """Stack metadata rows, using each record's first parent from ``lookup``.

    ``lookup`` maps ``(project, sha)`` to records; roots and parents missing from
    it get zero deltas.
    """
    records = list(records)
    if lookup is None:
        lookup = {(r.project, r.sha): r for r in records}
    rows = []
    for rec in records:
        parent = lookup.get((rec.project, rec.first_parent)) if rec.first_parent else None
        try:
            rows.append(metadata_features(rec, parent, spec))
        except NoParent:
            logger.info("no parent for %s; metric deltas set to 0", rec.sha)
            stub = type(rec)(sha=rec.sha, project=rec.project, metrics=rec.metrics)
            rows.append(metadata_features(rec, stub, spec))
    data = np.vstack(rows) if rows else np.zeros((0, spec.width))
    return FeatureMatrix(sp.csr_matrix(data), [("meta", n) for n in spec.column_names()])


def assemble(message_features: FeatureMatrix, meta: FeatureMatrix) -> FeatureMatrix:
    """Horizontally concatenate message and metadata features."""
    if message_features.n_rows != meta.n_rows:
        raise RowCountMismatch(f"{message_features.n_rows} message rows vs {meta.n_rows} metadata rows")
    matrix = sp.hstack([message_features.matrix, meta.matrix], format="csr")
    return FeatureMatrix(matrix, list(message_features.column_meta) + list(meta.column_meta))


# ---------------------------------------------------------------------------
# estimator


class CommitVectorizer(BaseEstimator, TransformerMixin):
    """Fit a vocabulary on token streams and emit BoW or TF-IDF features.

    ``X`` is a list of token lists, or of ``CommitRecord`` when ``metadata=True``
    (pass ``tokens=`` alongside in that case, or a ``cleaner`` to derive them).
    """

    def __init__(self, mode="bow", ngram_range=(1, 1), max_features=None, metadata=False, buckets=64, salt=""):
        self.mode = mode
        self.ngram_range = ngram_range
        self.max_features = max_features
        self.metadata = metadata
        self.buckets = buckets
        self.salt = salt

    def _message_features(self, tokens):
        if self.mode == "bow":
            return bow_transform(tokens, self.vocabulary_)
        if self.mode == "tfidf":
            return tfidf_transform(tokens, self.vocabulary_)
        raise ValueError(f"mode must be 'bow' or 'tfidf', got {self.mode!r}")

    def fit(self, tokens, y=None):
        if self.mode not in ("bow", "tfidf"):
            raise ValueError(f"mode must be 'bow' or 'tfidf', got {self.mode!r}")
        self.vocabulary_ = fit_vocabulary(tokens, self.ngram_range, self.max_features, self.salt)
        self.meta_spec_ = MetaFeatureSpec(buckets=self.buckets) if self.metadata else None
        return self

    def transform_features(self, tokens, records=None, lookup=None) -> FeatureMatrix:
        check_is_fitted(self, "vocabulary_")
        fm = self._message_features(tokens)
        if self.meta_spec_ is not None:
            if records is None:
                raise ValueError("metadata features need the commit records")
            fm = assemble(fm, metadata_matrix(records, lookup, self.meta_spec_))
        fm.fingerprint = self.fingerprint_
        return fm

    def transform(self, tokens, records=None, lookup=None):
        return self.transform_features(tokens, records, lookup).matrix

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "vocabulary_")
        names = [f"term:{t}" for t in self.vocabulary_.terms]
        if self.meta_spec_ is not None:
            names += [f"meta:{n}" for n in self.meta_spec_.column_names()]
        return np.array(names, dtype=object)

    @property
    def n_features_out_(self):
        return len(self.vocabulary_) + (self.meta_spec_.width if self.meta_spec_ else 0)

    @property
    def fingerprint_(self):
        h = hashlib.sha256(self.vocabulary_.fingerprint.encode())
        h.update(self.mode.encode())
        h.update(json.dumps(self.meta_spec_.to_dict() if self.meta_spec_ else None).encode())
        return h.hexdigest()

