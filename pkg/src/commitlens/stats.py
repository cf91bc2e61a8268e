"""Quality-delta pairs, exact 2x2 tests and correlations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from .corpus import Dataset
from .errors import (
    BrokenParentChain,
    LengthMismatch,
    MissingMetrics,
    NoLabeledCompilability,
    UnknownMetric,
)

MAX_WALK = 1000
P_SLACK = 1 + 1e-7


# ---------------------------------------------------------------------------
# pairs


@dataclass(frozen=True)
class CommitPair:
    child_sha: str
    parent_sha: str
    project: str
    metric_deltas: dict  # metric -> 1 if child > parent else 0
    raw_deltas: dict = field(default_factory=dict)  # metric -> child - parent
    tags: frozenset = frozenset()

    def to_dict(self):
        return {
            "child": self.child_sha,
            "parent": self.parent_sha,
            "project": self.project,
            "tags": sorted(self.tags),
            "increments": dict(sorted(self.metric_deltas.items())),
            "deltas": dict(sorted(self.raw_deltas.items())),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            child_sha=d["child"],
            parent_sha=d["parent"],
            project=d["project"],
            metric_deltas={k: int(v) for k, v in d["increments"].items()},
            raw_deltas={k: float(v) for k, v in d.get("deltas", {}).items()},
            tags=frozenset(d.get("tags", ())),
        )


@dataclass
class PairSet:
    """Pairs plus the neutral commits that produced none, as ``(sha, reason)``."""

    pairs: list
    skipped: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]


def _pair(child, parent):
    if child.metrics is None:
        raise MissingMetrics(child.sha)
    if parent.metrics is None:
        raise MissingMetrics(parent.sha)
    shared = sorted(set(child.metrics) & set(parent.metrics))
    raw = {k: child.metrics[k] - parent.metrics[k] for k in shared}
    return CommitPair(
        child_sha=child.sha,
        parent_sha=parent.sha,
        project=child.project,
        metric_deltas={k: int(raw[k] > 0) for k in shared},
        raw_deltas=raw,
        tags=frozenset(child.tags or ()),
    )


def build_pairs(dataset, max_walk=MAX_WALK) -> PairSet:
    """Pair every tagged neutral commit with its nearest impactful first-parent ancestor.

    Commits whose walk reaches a root are skipped with reason ``"root"``; walks
    longer than ``max_walk`` steps are skipped with ``"depth"``.
    """
    records = dataset.records if isinstance(dataset, Dataset) else list(dataset)
    index = {(r.project, r.sha): r for r in records}
    pairs, skipped = [], []
    for rec in records:
        if not rec.tags or not rec.is_neutral:
            continue
        cur, steps, found = rec.first_parent, 0, None
        while cur is not None:
            parent = index.get((rec.project, cur))
            if parent is None:
                raise BrokenParentChain(rec.sha, cur)
            if parent.impactful:
                found = parent
                break
            steps += 1
            if steps >= max_walk:
                break
            cur = parent.first_parent
        if found is not None:
            pairs.append(_pair(rec, found))
        else:
            skipped.append((rec.sha, "root" if cur is None else "depth"))
    return PairSet(pairs, skipped)


# ---------------------------------------------------------------------------
# contingency tables and Fisher's exact test


@dataclass(frozen=True)
class ContingencyTable:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in "abcd":
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"cell {name} must be a non-negative integer, got {v!r}")
        if self.total == 0:
            raise ValueError("table is empty")

    @property
    def total(self):
        return self.a + self.b + self.c + self.d

    def as_list(self):
        return [[self.a, self.b], [self.c, self.d]]


@dataclass(frozen=True)
class TestResult:
    p_two_sided: float
    p_greater: float
    p_less: float
    odds_ratio: float
    p_point: float

    __test__ = False  # not a pytest class

    def to_dict(self):
        return {
            "p_two_sided": self.p_two_sided,
            "p_greater": self.p_greater,
            "p_less": self.p_less,
            "odds_ratio": self.odds_ratio,
            "p_point": self.p_point,
        }


_LOG_FACT = np.zeros(1)


def log_factorials(n: int) -> np.ndarray:
    """``log(k!)`` for ``k = 0..n``; the table grows on demand and is shared."""
    global _LOG_FACT
    if n >= len(_LOG_FACT):
        size = max(n + 1, 2 * len(_LOG_FACT))
        table = np.zeros(size)
        table[1:] = np.cumsum(np.log(np.arange(1, size, dtype=float)))
        _LOG_FACT = table
    return _LOG_FACT


def hypergeom_pmf(table: ContingencyTable):
    """Return ``(support, pmf)`` of the top-left cell with all margins fixed."""
    n = table.total
    r1 = table.a + table.b
    c1 = table.a + table.c
    lo, hi = max(0, r1 + c1 - n), min(r1, c1)
    lf = log_factorials(n)
    k = np.arange(lo, hi + 1)
    logp = (
        lf[r1] + lf[n - r1] + lf[c1] + lf[n - c1] - lf[n]
        - lf[k] - lf[r1 - k] - lf[c1 - k] - lf[n - r1 - c1 + k]
    )
    p = np.exp(logp - logp.max())
    return k, p / p.sum()


def _odds_ratio(t: ContingencyTable) -> float:
    num, den = t.a * t.d, t.b * t.c
    if den == 0:
        return math.inf if num > 0 else math.nan
    return num / den


def fisher_exact(table) -> TestResult:
    """Exact conditional test on a 2x2 table.

    ``p_greater`` tests for a larger top-left cell than expected, ``p_less``
    for a smaller one. The two-sided value sums every table no more probable
    than the observed one.
    """
    if not isinstance(table, ContingencyTable):
        (a, b), (c, d) = table
        table = ContingencyTable(int(a), int(b), int(c), int(d))
    k, pmf = hypergeom_pmf(table)
    i = table.a - k[0]
    p_obs = pmf[i]
    p_less = float(min(1.0, pmf[: i + 1].sum()))
    p_greater = float(min(1.0, pmf[i:].sum()))
    p_two = float(min(1.0, pmf[pmf <= p_obs * P_SLACK].sum()))
    return TestResult(p_two, p_greater, p_less, _odds_ratio(table), float(p_obs))


def compare_proportions(hits_a, n_a, hits_b, n_b) -> TestResult:
    """Fisher test of ``hits_a / n_a`` against ``hits_b / n_b``."""
    return fisher_exact(ContingencyTable(hits_a, n_a - hits_a, hits_b, n_b - hits_b))


def tag_metric_table(pairs, tag, metric) -> ContingencyTable:
    a = b = c = d = 0
    seen = False
    for p in pairs:
        if metric not in p.metric_deltas:
            continue
        seen = True
        inc = p.metric_deltas[metric] == 1
        if tag in p.tags:
            a, b = a + inc, b + (not inc)
        else:
            c, d = c + inc, d + (not inc)
    if not seen:
        raise UnknownMetric(metric)
    return ContingencyTable(a, b, c, d)


# ---------------------------------------------------------------------------
# correlation


def pearson(x, y) -> float:
    """Product-moment correlation; ``nan`` when either vector is constant."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"vectors differ in shape: {x.shape} vs {y.shape}")
    if x.size < 2:
        raise ValueError("pearson needs at least two observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = np.dot(dx, dx), np.dot(dy, dy)
    if sxx == 0 or syy == 0:
        return math.nan
    r = np.dot(dx, dy) / math.sqrt(sxx * syy)
    return float(max(-1.0, min(1.0, r)))


# ---------------------------------------------------------------------------
# batteries


@dataclass
class BatteryCell:
    table: ContingencyTable | None = None
    result: TestResult | None = None
    r: float = math.nan
    error: str | None = None


@dataclass
class Battery:
    tags: list
    metrics: list
    cells: dict  # (tag, metric) -> BatteryCell

    def cell(self, tag, metric) -> BatteryCell:
        return self.cells[(tag, metric)]


def _cell(pairs, tag, metric, raw_deltas):
    try:
        table = tag_metric_table(pairs, tag, metric)
    except UnknownMetric as exc:
        return BatteryCell(error=f"unknown metric {exc.metric}")
    rows = [p for p in pairs if metric in p.metric_deltas]
    x = [1.0 if tag in p.tags else 0.0 for p in rows]
    y = [p.raw_deltas[metric] if raw_deltas else p.metric_deltas[metric] for p in rows]
    r = pearson(x, y) if len(rows) >= 2 else math.nan
    return BatteryCell(table=table, result=fisher_exact(table), r=r)


def run_battery(pairs, tags, metrics, raw_deltas=False, n_jobs=1) -> Battery:
    """Fisher test and correlation for every (tag, metric) cell.

    Correlations use increment indicators unless ``raw_deltas`` is set, in
    which case the metric's numeric change is correlated with the tag.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("no pairs to test")
    keys = [(t, m) for t in tags for m in metrics]
    if n_jobs == 1:
        out = [_cell(pairs, t, m, raw_deltas) for t, m in keys]
    else:
        out = Parallel(n_jobs=n_jobs, prefer="threads")(delayed(_cell)(pairs, t, m, raw_deltas) for t, m in keys)
    return Battery(list(tags), list(metrics), dict(zip(keys, out)))


def metric_keys(pairs, tools=None):
    keys = sorted(set().union(*(p.metric_deltas for p in pairs))) if len(pairs) else []
    if tools:
        keys = [k for k in keys if k.partition(".")[0] in tools]
    return keys


def compilability_table(dataset, tag) -> ContingencyTable:
    """Rows: has tag / lacks tag. Columns: neutral / breaker."""
    records = dataset.records if isinstance(dataset, Dataset) else list(dataset)
    labeled = [r for r in records if r.compilable is not None and r.tags]
    if not labeled:
        raise NoLabeledCompilability("no records carry both tags and a compilability label")
    a = b = c = d = 0
    for r in labeled:
        if tag in r.tags:
            a, b = a + r.is_neutral, b + r.is_breaker
        else:
            c, d = c + r.is_neutral, d + r.is_breaker
    return ContingencyTable(a, b, c, d)


def compilability_tests(dataset, tag) -> TestResult:
    """``p_greater`` small: the tag is rarer among breakers. ``p_less`` small: more common."""
    return fisher_exact(compilability_table(dataset, tag))


def compilability_battery(dataset, tags) -> dict:
    return {tag: compilability_tests(dataset, tag) for tag in tags}
