"""Commit-purpose taxonomy and its four configurations."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Iterable

from .errors import EmptyAfterProjection, EmptyTagSet, InactiveTag, UnknownTag

MAINTENANCE = "maintenance"
CONFIG_NAMES = ("orig26", "all29", "no_maint28", "no_maint_no_sub25")


@dataclass(frozen=True)
class CommitType:
    id: str
    display_name: str
    description: str
    group: str  # "original" | "maintenance_sub"


@dataclass(frozen=True)
class TaxonomyConfig:
    name: str
    active_types: frozenset

    def __contains__(self, tag):
        return tag in self.active_types

    def __len__(self):
        return len(self.active_types)

    def __str__(self):
        return self.name


def slugify(display_name: str) -> str:
    """``"Feature Add"`` -> ``"feature_add"``."""
    return "_".join(display_name.strip().lower().split())


def _load_types():
    text = resources.files("commitlens").joinpath("data/taxonomy.tsv").read_text("utf-8")
    types = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        slug, display, group, description = line.split("\t")
        types.append(CommitType(slug, display, description, group))
    return tuple(types)


COMMIT_TYPES: tuple = _load_types()
TYPES_BY_ID = {t.id: t for t in COMMIT_TYPES}
ALL_TAGS = frozenset(TYPES_BY_ID)
MAINTENANCE_SUB = frozenset(t.id for t in COMMIT_TYPES if t.group == "maintenance_sub")

_ORIG = ALL_TAGS - MAINTENANCE_SUB
CONFIGS = {
    "orig26": TaxonomyConfig("orig26", _ORIG),
    "all29": TaxonomyConfig("all29", ALL_TAGS),
    "no_maint28": TaxonomyConfig("no_maint28", ALL_TAGS - {MAINTENANCE}),
    "no_maint_no_sub25": TaxonomyConfig("no_maint_no_sub25", _ORIG - {MAINTENANCE}),
}

# Display order follows the paper's result tables: original tags, then the sub-categories.
TABLE_ORDER = tuple(t.id for t in COMMIT_TYPES)


def get_config(config) -> TaxonomyConfig:
    if isinstance(config, TaxonomyConfig):
        return config
    try:
        return CONFIGS[config]
    except KeyError:
        raise ValueError(
            f"unknown taxonomy config {config!r}; expected one of {', '.join(CONFIG_NAMES)}"
        ) from None


def validate_tagset(tags: Iterable[str], config="all29") -> frozenset:
    config = get_config(config)
    tags = frozenset(tags)
    if not tags:
        raise EmptyTagSet()
    for tag in sorted(tags):
        if tag not in ALL_TAGS:
            raise UnknownTag(tag)
        if tag not in config:
            raise InactiveTag(tag, config.name)
    return tags


def project_tagset(tags: Iterable[str], from_config="all29", to_config="all29") -> frozenset:
    """Drop the tags of ``from_config`` that are inactive in ``to_config``."""
    tags = validate_tagset(tags, from_config)
    to_config = get_config(to_config)
    kept = tags & to_config.active_types
    if not kept:
        raise EmptyAfterProjection(tags, to_config.name)
    return kept


def display_name(tag: str) -> str:
    return TYPES_BY_ID[tag].display_name
