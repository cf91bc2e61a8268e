"""Taxonomy-config by feature-setting grid and the model comparison."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Dataset
from .learn import CommitClassifier, EvalReport, split_train_test
from .report import RenderedTable
from .seeding import DEFAULT_SEED

GRID_CONFIGS = ("orig26", "all29", "no_maint28", "no_maint_no_sub25")
CONFIG_LABELS = {
    "orig26": "26 tags, original",
    "all29": "29 tags, with sub-categories",
    "no_maint28": "28 tags, sub-categories without maintenance",
    "no_maint_no_sub25": "25 tags, without maintenance",
}
FEATURE_SETTINGS = ((False, "message only"), (True, "message + metadata"))
COMPARISON = (
    ("Random forest", "single", "rf"),
    ("Extra trees", "single", "extratrees"),
    ("Multi-label extra trees", "multi", "extratrees"),
)
METRICS = ("acc", "recall", "f1")


@dataclass
class Grid:
    rows: list  # row keys
    settings: list  # column-group labels
    cells: dict  # (row, setting) -> (acc, recall, f1)
    caption: str = ""
    row_labels: dict = None

    def f1(self, row, setting):
        return self.cells[(row, setting)][2]

    def table(self) -> RenderedTable:
        cols = [f"{s}: {m}" for s in self.settings for m in METRICS] if len(self.settings) > 1 else list(METRICS)
        raw = [[v for s in self.settings for v in self.cells[(r, s)]] for r in self.rows]
        labels = self.row_labels or {}
        return RenderedTable(
            caption=self.caption,
            columns=cols,
            row_labels=[labels.get(r, r) for r in self.rows],
            cells=[[f"{v:.2f}" for v in row] for row in raw],
            bold=[[False] * len(row) for row in raw],
            raw=raw,
            footnote="Multi-label accuracy is the mean per-commit Jaccard overlap; recall and f1 are micro-averaged.",
        )


def _records(dataset):
    return dataset.records if isinstance(dataset, Dataset) else list(dataset)


def _run(records, lookup, seeds, fraction, **params) -> tuple:
    reports = []
    for seed in seeds:
        train, test = split_train_test(records, fraction, seed=seed)
        clf = CommitClassifier(seed=seed, **params).fit(train, lookup=lookup)
        reports.append(clf.evaluate(test, lookup=lookup))
    return tuple(float(np.mean([r.row()[i] for r in reports])) for i in range(3))


def experiment_matrix(
    dataset,
    seeds=(DEFAULT_SEED,),
    mode="single",
    model="extratrees",
    n_trees=100,
    fraction=0.8,
    lookup=None,
    n_jobs=1,
) -> Grid:
    """Evaluate every taxonomy config with and without metadata features.

    Each cell is the mean over ``seeds`` of (acc, recall, f1) on a held-out
    split; the split and the forest share the seed.
    """
    records = _records(dataset)
    lookup = lookup if lookup is not None else {(r.project, r.sha): r for r in records}
    settings = [label for _, label in FEATURE_SETTINGS]
    cells = {}
    for config in GRID_CONFIGS:
        for meta, label in FEATURE_SETTINGS:
            cells[(config, label)] = _run(
                records, lookup, seeds, fraction,
                mode=mode, model=model, config=config, metadata=meta, n_trees=n_trees, n_jobs=n_jobs,
            )
    return Grid(list(GRID_CONFIGS), settings, cells, "Prediction performance", CONFIG_LABELS)


def model_comparison(
    dataset,
    seeds=(DEFAULT_SEED,),
    config="orig26",
    metadata=True,
    n_trees=100,
    fraction=0.8,
    lookup=None,
    n_jobs=1,
) -> Grid:
    """Single-label forests against the multi-label extra-trees model."""
    records = _records(dataset)
    lookup = lookup if lookup is not None else {(r.project, r.sha): r for r in records}
    cells = {}
    for label, mode, model in COMPARISON:
        cells[(label, "all")] = _run(
            records, lookup, seeds, fraction,
            mode=mode, model=model, config=config, metadata=metadata, n_trees=n_trees, n_jobs=n_jobs,
        )
    return Grid([c[0] for c in COMPARISON], ["all"], cells, "Model comparison")


def format_report(report: EvalReport) -> RenderedTable:
    """One evaluation as a single grid row."""
    row = list(report.row())
    return RenderedTable(
        caption="Evaluation",
        columns=list(METRICS),
        row_labels=[report.mode if hasattr(report, "mode") else "model"],
        cells=[[f"{v:.2f}" for v in row]],
        bold=[[False] * 3],
        raw=[row],
    )
