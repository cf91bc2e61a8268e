"""Commit purpose classification and commit-type / quality statistics."""

from .corpus import SCHEMA_VERSION, CommitRecord, Dataset, read_dataset, write_dataset
from .learn.model import MODEL_FORMAT_VERSION, CommitClassifier
from .taxonomy import ALL_TAGS, CONFIGS, validate_tagset

__version__ = "0.1.0"

__all__ = [
    "ALL_TAGS",
    "CONFIGS",
    "MODEL_FORMAT_VERSION",
    "SCHEMA_VERSION",
    "CommitClassifier",
    "CommitRecord",
    "Dataset",
    "__version__",
    "read_dataset",
    "validate_tagset",
    "write_dataset",
]
