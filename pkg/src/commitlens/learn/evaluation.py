"""Accuracy / recall / F1 for single- and multi-label predictions."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from ..errors import LengthMismatch


def _prf(tp, fp, fn):
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


@dataclass
class EvalReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    per_tag: dict = field(default_factory=dict)  # tag -> (precision, recall, f1, support)
    mode: str = "single"
    averaging: str = "micro"
    n_rows: int = 0

    def row(self):
        return (self.accuracy, self.recall, self.f1)

    def to_dict(self):
        return {
            "mode": self.mode,
            "averaging": self.averaging,
            "n_rows": self.n_rows,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "per_tag": {t: list(v) for t, v in sorted(self.per_tag.items())},
        }


def _as_set(x):
    if x is None:
        return frozenset()
    if isinstance(x, str):
        return frozenset([x])
    return frozenset(x)


def evaluate(pred, truth, mode="single") -> EvalReport:
    """Micro-averaged scores.

    Single-label: accuracy is the exact-match rate and each row contributes one
    decision per class. Multi-label: decisions are (row, tag) pairs and accuracy
    is the mean per-row Jaccard index (two empty sets count as a match).
    """
    pred, truth = list(pred), list(truth)
    if len(pred) != len(truth):
        raise LengthMismatch(f"{len(pred)} predictions vs {len(truth)} truths")
    if mode not in ("single", "multi"):
        raise ValueError("mode must be 'single' or 'multi'")
    tp, fp, fn = Counter(), Counter(), Counter()
    jaccard = 0.0
    for p, t in zip(pred, truth):
        p, t = _as_set(p), _as_set(t)
        for tag in p & t:
            tp[tag] += 1
        for tag in p - t:
            fp[tag] += 1
        for tag in t - p:
            fn[tag] += 1
        if mode == "single":
            jaccard += float(p == t)
        else:
            union = p | t
            jaccard += len(p & t) / len(union) if union else 1.0
    n = len(pred)
    precision, recall, f1 = _prf(sum(tp.values()), sum(fp.values()), sum(fn.values()))
    per_tag = {}
    for tag in sorted(set(tp) | set(fp) | set(fn)):
        per_tag[tag] = (*_prf(tp[tag], fp[tag], fn[tag]), tp[tag] + fn[tag])
    return EvalReport(
        accuracy=jaccard / n if n else 0.0,
        precision=precision,
        recall=recall,
        f1=f1,
        per_tag=per_tag,
        mode=mode,
        n_rows=n,
    )
