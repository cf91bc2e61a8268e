"""Commit records: mining from git, labeling, and the line-delimited dataset format."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import re
import subprocess
from collections import defaultdict
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from . import taxonomy
from .errors import (
    CommitLensError,
    DuplicateSha,
    GitInvocationFailed,
    MalformedLogOutput,
    MissingDiffstat,
    NoSourceFiles,
    NotARepository,
    ParseError,
    SchemaVersionMismatch,
    TagError,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
METRIC_TOOLS = ("pmd", "sonarqube", "findbugs")
SHA_RE = re.compile(r"^[0-9a-f]{40}$")

SOURCE_EXTENSIONS = frozenset(
    """java kt kts scala groovy clj c cc cpp cxx h hh hpp hxx cs go rs py pyx js jsx ts
    tsx mjs rb php swift m mm erl ex exs hs ml fs lua pl pm r jl dart vala""".split()
)

_RS = "\x1e"  # record separator
_US = "\x1f"  # unit separator
_LOG_FORMAT = "%x1e%H%x1f%P%x1f%ae%x1f%at%x1f%B%x1f"


@dataclass(frozen=True)
class DiffStat:
    files_changed: int = 0
    insertions: int = 0
    deletions: int = 0
    per_file: tuple = ()  # ((path, insertions, deletions), ...)

    @classmethod
    def from_files(cls, per_file) -> "DiffStat":
        per_file = tuple((str(p), int(i), int(d)) for p, i, d in per_file)
        return cls(
            files_changed=len(per_file),
            insertions=sum(f[1] for f in per_file),
            deletions=sum(f[2] for f in per_file),
            per_file=per_file,
        )

    def churn_by_path(self):
        return {p: i + d for p, i, d in self.per_file}


@dataclass(frozen=True)
class CommitRecord:
    sha: str
    project: str
    author_email: str = ""
    author_time: int = 0
    message: str = ""
    parents: tuple = ()
    diffstat: DiffStat | None = None
    compilable: bool | None = None
    impactful: bool | None = None
    tags: frozenset | None = None
    metrics: dict | None = None

    @property
    def first_parent(self):
        return self.parents[0] if self.parents else None

    @property
    def is_breaker(self):
        return self.compilable is False

    @property
    def is_neutral(self):
        return self.compilable is True


@dataclass
class Dataset:
    records: list = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def index(self):
        """Map ``(project, sha)`` to record."""
        return {(r.project, r.sha): r for r in self.records}

    def tagged(self):
        return [r for r in self.records if r.tags]


def validate_metrics(metrics: dict) -> dict:
    out = {}
    for key, value in metrics.items():
        tool, _, name = str(key).partition(".")
        if tool not in METRIC_TOOLS or not name:
            raise ValueError(f"metric key {key!r} is not namespaced as one of {METRIC_TOOLS}")
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"metric {key!r} is not finite")
        out[key] = value
    return out


# ---------------------------------------------------------------------------
# git mining


def _git(repo_path, *args) -> bytes:
    cmd = ["git", "-C", str(repo_path), "-c", "core.quotepath=off", *args]
    try:
        proc = subprocess.run(cmd, capture_output=True, check=False)
    except FileNotFoundError as exc:
        raise GitInvocationFailed("git executable not found") from exc
    if proc.returncode != 0:
        stderr = proc.stderr.decode("utf-8", "replace").strip()
        raise GitInvocationFailed(f"git {args[0]} failed: {stderr[:500]}")
    return proc.stdout


def _has_head(repo_path) -> bool:
    proc = subprocess.run(
        ["git", "-C", str(repo_path), "rev-parse", "--verify", "-q", "HEAD"],
        capture_output=True,
    )
    return proc.returncode == 0


def mine_repository(repo_path, project_name: str) -> list:
    """Return one record per commit reachable from HEAD, parents before children.

    Merge commits are diffed against their first parent. Binary files count as
    changed files with zero churn.
    """
    repo_path = Path(repo_path)
    if not repo_path.is_dir():
        raise NotARepository(f"{repo_path} is not a directory")
    probe = subprocess.run(
        ["git", "-C", str(repo_path), "rev-parse", "--git-dir"], capture_output=True
    )
    if probe.returncode != 0:
        raise NotARepository(f"{repo_path} is not a git repository")
    if not _has_head(repo_path):
        return []
    raw = _git(
        repo_path,
        "log",
        "--topo-order",
        "--reverse",
        "--no-renames",
        "--diff-merges=first-parent",
        "--numstat",
        f"--format={_LOG_FORMAT}",
        "HEAD",
    )
    return parse_log(raw.decode("utf-8", "replace"), project_name)


def parse_log(text: str, project_name: str) -> list:
    """Parse the output of ``git log`` run with the mining format."""
    records = []
    chunks = text.split(_RS)
    if chunks[0].strip():
        raise MalformedLogOutput(1, "output does not start with a record separator")
    line_no = 1 + chunks[0].count("\n")
    for chunk in chunks[1:]:
        fields = chunk.split(_US)
        if len(fields) != 6:
            raise MalformedLogOutput(line_no, f"expected 6 fields, got {len(fields)}")
        sha, parents, email, timestamp, body, numstat = fields
        if not SHA_RE.match(sha):
            raise MalformedLogOutput(line_no, f"bad sha {sha!r}")
        try:
            author_time = int(timestamp)
        except ValueError:
            raise MalformedLogOutput(line_no, f"bad author time {timestamp!r}") from None
        stat_line = line_no + chunk[: len(chunk) - len(numstat)].count("\n")
        per_file = []
        for offset, line in enumerate(numstat.split("\n")):
            if not line:
                continue
            parts = line.split("\t", 2)
            if len(parts) != 3:
                raise MalformedLogOutput(stat_line + offset, f"bad numstat line {line!r}")
            ins, dels, path = parts
            if ins == "-" and dels == "-":
                per_file.append((path, 0, 0))
                continue
            try:
                per_file.append((path, int(ins), int(dels)))
            except ValueError:
                raise MalformedLogOutput(stat_line + offset, f"bad numstat line {line!r}") from None
        records.append(
            CommitRecord(
                sha=sha,
                project=project_name,
                author_email=email,
                author_time=author_time,
                message=body.rstrip("\n"),
                parents=tuple(parents.split()),
                diffstat=DiffStat.from_files(per_file),
            )
        )
        line_no += chunk.count("\n")
    return records


def _top_dir(path: str) -> str:
    head, sep, _ = path.partition("/")
    return head + "/" if sep else ""


def infer_core_paths(records: Iterable[CommitRecord]) -> set:
    """Guess the core module: the top-level directory with the most churn.

    Only directories holding at least one source file compete; root-level files
    form the ``""`` directory. Ties go to the lexicographically smallest prefix.
    """
    records = list(records)
    if not records:
        raise NoSourceFiles("no records")
    churn = defaultdict(int)
    has_source = set()
    for rec in records:
        if rec.diffstat is None:
            raise MissingDiffstat(rec.sha)
        for path, ins, dels in rec.diffstat.per_file:
            top = _top_dir(path)
            churn[top] += ins + dels
            if os.path.splitext(path)[1].lstrip(".").lower() in SOURCE_EXTENSIONS:
                has_source.add(top)
    if not has_source:
        raise NoSourceFiles("no source files in any diffstat")
    best = min(has_source, key=lambda d: (-churn[d], d))
    return {best}


def mark_impactful(records: Iterable[CommitRecord], core_paths) -> list:
    core_paths = tuple(core_paths)
    out = []
    for rec in records:
        if rec.diffstat is None:
            raise MissingDiffstat(rec.sha)
        hit = any(
            ins + dels > 0 and path.startswith(core_paths)
            for path, ins, dels in rec.diffstat.per_file
        )
        out.append(replace(rec, impactful=hit))
    return out


# ---------------------------------------------------------------------------
# serialization


def record_to_dict(rec: CommitRecord) -> dict:
    ds = rec.diffstat
    return {
        "schema_version": SCHEMA_VERSION,
        "sha": rec.sha,
        "project": rec.project,
        "author_email": rec.author_email,
        "author_time": rec.author_time,
        "message": rec.message,
        "parents": list(rec.parents),
        "diffstat": None
        if ds is None
        else {
            "files_changed": ds.files_changed,
            "insertions": ds.insertions,
            "deletions": ds.deletions,
            "per_file": [list(f) for f in ds.per_file],
        },
        "compilable": rec.compilable,
        "impactful": rec.impactful,
        "tags": None if rec.tags is None else sorted(rec.tags),
        "metrics": None if rec.metrics is None else {k: rec.metrics[k] for k in sorted(rec.metrics)},
    }


def _require(obj, key, kind, line):
    if key not in obj:
        raise ParseError(line, f"missing required field {key!r}")
    value = obj[key]
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ParseError(line, f"field {key!r} has wrong type {type(value).__name__}")
    return value


def _optional_bool(obj, key, line):
    value = obj.get(key)
    if value is not None and not isinstance(value, bool):
        raise ParseError(line, f"field {key!r} must be a boolean or null")
    return value


def record_from_dict(obj: dict, line: int = 0) -> CommitRecord:
    if not isinstance(obj, dict):
        raise ParseError(line, "record is not an object")
    version = obj.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"line {line}: schema_version {version!r}, this build reads {SCHEMA_VERSION}"
        )
    sha = _require(obj, "sha", str, line)
    if not SHA_RE.match(sha):
        raise ParseError(line, f"sha {sha!r} is not 40 lowercase hex characters")
    project = _require(obj, "project", str, line)
    message = _require(obj, "message", str, line)
    author_email = obj.get("author_email", "")
    author_time = obj.get("author_time", 0)
    if not isinstance(author_time, int) or isinstance(author_time, bool) or author_time < 0:
        raise ParseError(line, "author_time must be a non-negative integer")
    parents = obj.get("parents", [])
    if not isinstance(parents, list) or not all(isinstance(p, str) and SHA_RE.match(p) for p in parents):
        raise ParseError(line, "parents must be a list of shas")
    if sha in parents:
        raise ParseError(line, "commit lists itself as parent")

    diffstat = None
    raw_ds = obj.get("diffstat")
    if raw_ds is not None:
        try:
            diffstat = DiffStat.from_files(raw_ds["per_file"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(line, f"bad diffstat: {exc}") from None
        for key in ("files_changed", "insertions", "deletions"):
            if key in raw_ds and raw_ds[key] != getattr(diffstat, key):
                raise ParseError(line, f"diffstat {key} disagrees with per_file totals")
        if any(i < 0 or d < 0 for _, i, d in diffstat.per_file):
            raise ParseError(line, "negative diffstat count")

    tags = obj.get("tags")
    if tags is not None:
        if not isinstance(tags, list):
            raise ParseError(line, "tags must be a list")
        if len(set(tags)) != len(tags):
            raise ParseError(line, "duplicate tag")
        try:
            tags = taxonomy.validate_tagset(tags, "all29")
        except TagError as exc:
            raise ParseError(line, str(exc)) from None

    metrics = obj.get("metrics")
    if metrics is not None:
        if not isinstance(metrics, dict):
            raise ParseError(line, "metrics must be an object")
        try:
            metrics = validate_metrics(metrics)
        except (TypeError, ValueError) as exc:
            raise ParseError(line, str(exc)) from None

    return CommitRecord(
        sha=sha,
        project=project,
        author_email=str(author_email),
        author_time=author_time,
        message=message,
        parents=tuple(parents),
        diffstat=diffstat,
        compilable=_optional_bool(obj, "compilable", line),
        impactful=_optional_bool(obj, "impactful", line),
        tags=tags,
        metrics=metrics,
    )


def check_unique(records) -> None:
    seen = set()
    for rec in records:
        key = (rec.project, rec.sha)
        if key in seen:
            raise DuplicateSha(rec.project, rec.sha)
        seen.add(key)


def dumps_record(rec: CommitRecord) -> str:
    return json.dumps(record_to_dict(rec), ensure_ascii=False, sort_keys=True)


def write_dataset(dataset, path) -> None:
    records = dataset.records if isinstance(dataset, Dataset) else list(dataset)
    check_unique(records)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(dumps_record(rec))
            fh.write("\n")


def read_dataset(path) -> Dataset:
    records = []
    with open(path, encoding="utf-8", errors="replace") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(line_no, f"invalid JSON: {exc.msg}") from None
            records.append(record_from_dict(obj, line_no))
    check_unique(records)
    return Dataset(records)


def merge_datasets(*datasets) -> Dataset:
    records = [rec for ds in datasets for rec in ds.records]
    check_unique(records)
    return Dataset(records)


# ---------------------------------------------------------------------------
# labeling and enrichment

_TRUE = {"1", "true", "yes", "neutral", "compilable"}
_FALSE = {"0", "false", "no", "breaker", "uncompilable"}


def read_labels(path) -> dict:
    """Read a label sheet: ``sha<TAB>tag,tag[<TAB>compilable]`` per line.

    ``compilable`` accepts 1/0, true/false, neutral/breaker. Lines starting
    with ``#`` are comments.
    """
    labels = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            sha = parts[0].strip()
            if not SHA_RE.match(sha):
                raise ParseError(line_no, f"bad sha {sha!r}")
            tags = None
            if len(parts) > 1 and parts[1].strip():
                raw = [t.strip() for t in parts[1].split(",") if t.strip()]
                try:
                    tags = taxonomy.validate_tagset(
                        [t if t in taxonomy.ALL_TAGS else taxonomy.slugify(t) for t in raw]
                    )
                except CommitLensError as exc:
                    raise ParseError(line_no, str(exc)) from None
            compilable = None
            if len(parts) > 2 and parts[2].strip():
                flag = parts[2].strip().lower()
                if flag in _TRUE:
                    compilable = True
                elif flag in _FALSE:
                    compilable = False
                else:
                    raise ParseError(line_no, f"bad compilable flag {parts[2]!r}")
            labels[sha] = (tags, compilable)
    return labels


def apply_labels(dataset: Dataset, labels: dict) -> Dataset:
    out = []
    for rec in dataset.records:
        if rec.sha in labels:
            tags, compilable = labels[rec.sha]
            changes = {}
            if tags is not None:
                changes["tags"] = tags
            if compilable is not None:
                changes["compilable"] = compilable
            rec = replace(rec, **changes)
        out.append(rec)
    unknown = set(labels) - {r.sha for r in dataset.records}
    if unknown:
        logger.warning("%d labeled shas are not in the dataset", len(unknown))
    return Dataset(out, dataset.schema_version)


def read_metrics(path) -> dict:
    """Read metric snapshots keyed by sha from CSV (``sha`` column) or JSONL."""
    path = Path(path)
    snapshots = {}
    if path.suffix in (".jsonl", ".json"):
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                obj = json.loads(line)
                try:
                    snapshots[obj["sha"]] = validate_metrics(obj["metrics"])
                except (KeyError, TypeError, ValueError) as exc:
                    raise ParseError(line_no, str(exc)) from None
        return snapshots
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames or "sha" not in reader.fieldnames:
            raise ParseError(1, "metrics CSV needs a 'sha' column")
        for line_no, row in enumerate(reader, 2):
            sha = row.pop("sha")
            row.pop("project", None)
            try:
                snapshots[sha] = validate_metrics({k: v for k, v in row.items() if v not in ("", None)})
            except ValueError as exc:
                raise ParseError(line_no, str(exc)) from None
    return snapshots


def enrich(dataset: Dataset, snapshots: dict) -> Dataset:
    out = []
    for rec in dataset.records:
        if rec.sha in snapshots:
            merged = dict(rec.metrics or {})
            merged.update(snapshots[rec.sha])
            rec = replace(rec, metrics=merged)
        out.append(rec)
    return Dataset(out, dataset.schema_version)
