"""Commit-message normalization into token streams."""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from sklearn.base import BaseEstimator, TransformerMixin

from .stemmer import stem

NOISE_RULES = ("trailers", "urls", "issue_ids", "hex_blobs")

TRAILER_RE = re.compile(r"(?im)(?:^|(?<=\s))(?:git-svn-id|signed-off-by):.*$")
URL_RE = re.compile(r"(?i)\b[a-z][a-z0-9+.\-]*://\S+")
ISSUE_ID_RE = re.compile(r"\b[A-Z][A-Z0-9_]*-\d+\b")
HEX_BLOB_RE = re.compile(r"\b(?=[0-9A-Fa-f]*\d)[0-9A-Fa-f]{7,}\b")
_HEX_TOKEN_RE = re.compile(r"^(?=[0-9a-f]*\d)[0-9a-f]{7,}$")
_SPLIT_RE = re.compile(r"[^\w]+")


def _read_word_file(text):
    return frozenset(
        w.strip().lower() for w in text.splitlines() if w.strip() and not w.startswith("#")
    )


@lru_cache(maxsize=None)
def bundled_stopwords() -> frozenset:
    text = resources.files("commitlens").joinpath("data/stopwords.txt").read_text("utf-8")
    return _read_word_file(text)


def load_word_list(path) -> frozenset:
    with open(path, encoding="utf-8") as fh:
        return _read_word_file(fh.read())


def word_list_fingerprint(words) -> str:
    return hashlib.sha256("\n".join(sorted(words)).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CleanConfig:
    remove_stop_words: bool = True
    remove_punctuation: bool = True
    lemmatize: bool = True
    noise_rules: tuple = NOISE_RULES
    stopwords: frozenset = field(default_factory=bundled_stopwords)
    exclude: frozenset = frozenset()

    @classmethod
    def raw(cls) -> "CleanConfig":
        """All cleaning disabled: lowercase whitespace tokenization."""
        return cls(False, False, False, ())

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(repr((self.remove_stop_words, self.remove_punctuation, self.lemmatize)).encode())
        h.update(repr(tuple(self.noise_rules)).encode())
        h.update(word_list_fingerprint(self.stopwords).encode())
        h.update(word_list_fingerprint(self.exclude).encode())
        return h.hexdigest()

    def to_dict(self) -> dict:
        return {
            "remove_stop_words": self.remove_stop_words,
            "remove_punctuation": self.remove_punctuation,
            "lemmatize": self.lemmatize,
            "noise_rules": list(self.noise_rules),
            "stopwords": sorted(self.stopwords),
            "exclude": sorted(self.exclude),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CleanConfig":
        return cls(
            d["remove_stop_words"],
            d["remove_punctuation"],
            d["lemmatize"],
            tuple(d["noise_rules"]),
            frozenset(d["stopwords"]),
            frozenset(d.get("exclude", ())),
        )


DEFAULT_CONFIG = CleanConfig()


def strip_noise(text: str, rules=NOISE_RULES) -> str:
    if "trailers" in rules:
        text = TRAILER_RE.sub(" ", text)
    if "urls" in rules:
        text = URL_RE.sub(" ", text)
    if "issue_ids" in rules:
        text = ISSUE_ID_RE.sub(" ", text)
    if "hex_blobs" in rules:
        text = HEX_BLOB_RE.sub(" ", text)
    return text


def lemmatize_token(token: str) -> str:
    return stem(token)


def clean_message(raw, config: CleanConfig = DEFAULT_CONFIG) -> list:
    """Turn a raw commit message into a list of lowercase terms.

    Trailers, URLs, issue ids and hex blobs are stripped (in that order) before
    tokenization; stopword removal and stemming come last.
    """
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8", "replace")
    text = strip_noise(raw, config.noise_rules)
    if config.remove_punctuation:
        tokens = [t for t in _SPLIT_RE.split(text.lower()) if t and not t.isdigit()]
    else:
        tokens = text.lower().split()
    if config.remove_stop_words:
        tokens = [t for t in tokens if t not in config.stopwords]
    if config.exclude:
        tokens = [t for t in tokens if t not in config.exclude]
    if config.lemmatize:
        tokens = [stem(t) for t in tokens]
    if "hex_blobs" in config.noise_rules:
        # stemming can expose a hex run, e.g. "abc1234s" -> "abc1234"
        tokens = [t for t in tokens if not _HEX_TOKEN_RE.match(t)]
    return [t for t in tokens if t]


class MessageCleaner(BaseEstimator, TransformerMixin):
    """Stateless transformer from raw messages to token lists."""

    def __init__(
        self,
        remove_stop_words=True,
        remove_punctuation=True,
        lemmatize=True,
        stopwords_path=None,
        exclude_path=None,
    ):
        self.remove_stop_words = remove_stop_words
        self.remove_punctuation = remove_punctuation
        self.lemmatize = lemmatize
        self.stopwords_path = stopwords_path
        self.exclude_path = exclude_path

    def config(self) -> CleanConfig:
        return CleanConfig(
            remove_stop_words=self.remove_stop_words,
            remove_punctuation=self.remove_punctuation,
            lemmatize=self.lemmatize,
            stopwords=load_word_list(self.stopwords_path) if self.stopwords_path else bundled_stopwords(),
            exclude=load_word_list(self.exclude_path) if self.exclude_path else frozenset(),
        )

    def fit(self, X, y=None):
        self.config_ = self.config()
        return self

    def transform(self, X):
        config = getattr(self, "config_", None) or self.config()
        return [clean_message(m, config) for m in X]
