"""Table rendering and the compilability warning engine."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

from . import taxonomy
from .corpus import Dataset
from .stats import Battery, TestResult, compare_proportions

P_THRESHOLD = 0.05
R_THRESHOLD = 0.2
EXIT_RISK = 3

DEFAULT_RISK = frozenset(
    {"build", "clean_up", "feature_add", "maintenance", "module_move", "module_remove", "refactoring", "rename", "replacement"}
)
DEFAULT_PROTECTIVE = frozenset({"bug_fix", "documentation"})


# ---------------------------------------------------------------------------
# tables


@dataclass
class RenderedTable:
    """Formatted cells with an emphasis mask, plus the raw values behind them."""

    caption: str
    columns: list
    row_labels: list
    cells: list  # formatted strings, one list per row
    bold: list  # bools, same shape as cells
    raw: list  # full-precision values, same shape as cells
    footnote: str = ""

    def text(self) -> str:
        shown = [[f"*{c}*" if b else c for c, b in zip(row, mask)] for row, mask in zip(self.cells, self.bold)]
        header = ["", *self.columns]
        body = [[label, *row] for label, row in zip(self.row_labels, shown)]
        widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]

        def line(r):
            return "  ".join(v.ljust(w) if i == 0 else v.rjust(w) for i, (v, w) in enumerate(zip(r, widths))).rstrip()

        out = [self.caption, line(header), "  ".join("-" * w for w in widths)]
        out += [line(r) for r in body]
        if self.footnote:
            out.append(self.footnote)
        return "\n".join(out) + "\n"

    def tsv(self) -> str:
        def fmt(v):
            if v is None or (isinstance(v, float) and math.isnan(v)):
                return ""
            return repr(v) if isinstance(v, float) else str(v)

        lines = ["\t".join(["row", *self.columns])]
        lines += ["\t".join([label, *map(fmt, row)]) for label, row in zip(self.row_labels, self.raw)]
        return "\n".join(lines) + "\n"

    def render(self, fmt="text") -> str:
        if fmt == "tsv":
            return self.tsv()
        if fmt == "text":
            return self.text()
        raise ValueError(f"format must be 'text' or 'tsv', got {fmt!r}")


def fmt_p(p) -> str:
    return "" if p is None or math.isnan(p) else f"{p:.2f}"


def fmt_r(r) -> str:
    return "" if r is None or math.isnan(r) else f"{r:+.2f}"


def p_bold(p, threshold=P_THRESHOLD) -> bool:
    return p is not None and not math.isnan(p) and p < threshold


def r_bold(r, threshold=R_THRESHOLD) -> bool:
    return r is not None and not math.isnan(r) and abs(r) >= threshold


def _label(tag):
    return taxonomy.display_name(tag) if tag in taxonomy.TYPES_BY_ID else tag


def render_battery(battery: Battery, emphasis="p", test="p_two_sided", caption=None) -> RenderedTable:
    """Tags as rows, metrics as columns.

    ``emphasis="p"`` shows the ``test`` p-value of each cell and bolds p < 0.05;
    ``emphasis="r"`` shows the correlation and bolds |r| >= 0.2.
    """
    if not battery.tags or not battery.metrics:
        raise ValueError("battery is empty")
    if emphasis not in ("p", "r"):
        raise ValueError(f"emphasis must be 'p' or 'r', got {emphasis!r}")
    cells, bold, raw = [], [], []
    for tag in battery.tags:
        row_c, row_b, row_r = [], [], []
        for metric in battery.metrics:
            cell = battery.cell(tag, metric)
            if emphasis == "p":
                v = getattr(cell.result, test) if cell.result else math.nan
                row_c.append(fmt_p(v))
                row_b.append(p_bold(v))
            else:
                v = cell.r
                row_c.append(fmt_r(v))
                row_b.append(r_bold(v))
            row_r.append(v)
        cells.append(row_c)
        bold.append(row_b)
        raw.append(row_r)
    if caption is None:
        caption = "Fisher's exact test p-values" if emphasis == "p" else "Correlation coefficients"
    return RenderedTable(
        caption=caption,
        columns=list(battery.metrics),
        row_labels=[_label(t) for t in battery.tags],
        cells=cells,
        bold=bold,
        raw=raw,
        footnote="No multiple-comparison correction applied.",
    )


def render_compilability(results: dict, caption="Commit types and compilability") -> RenderedTable:
    cols = ["two-sided", "greater", "less"]
    keys = ["p_two_sided", "p_greater", "p_less"]
    tags = [t for t in taxonomy.TABLE_ORDER if t in results] + sorted(set(results) - taxonomy.ALL_TAGS)
    raw = [[getattr(results[t], k) for k in keys] for t in tags]
    return RenderedTable(
        caption=caption,
        columns=cols,
        row_labels=[_label(t) for t in tags],
        cells=[[fmt_p(v) for v in row] for row in raw],
        bold=[[p_bold(v) for v in row] for row in raw],
        raw=raw,
        footnote="greater: type is rarer among breakers; less: type is more common among breakers.",
    )


def tag_distribution(dataset) -> tuple:
    """Return ``(counts, n_tagged)`` over the tagged records."""
    records = dataset.records if isinstance(dataset, Dataset) else list(dataset)
    tagged = [r for r in records if r.tags]
    counts = Counter(t for r in tagged for t in r.tags)
    return dict(counts), len(tagged)


def render_distribution(counts: dict, total: int, reference=None, caption="Commit type distribution") -> RenderedTable:
    """Counts and shares per tag; with ``reference=(counts, total)`` adds a Fisher p-value column."""
    tags = [t for t in taxonomy.TABLE_ORDER if t in counts or (reference and t in reference[0])]
    cols = ["count", "share"]
    if reference:
        cols += ["ref count", "ref share", "p-value"]
    cells, bold, raw = [], [], []
    for t in tags:
        n = counts.get(t, 0)
        row = [n, n / total if total else math.nan]
        if reference:
            ref_counts, ref_total = reference
            m = ref_counts.get(t, 0)
            p = compare_proportions(n, total, m, ref_total).p_two_sided
            row += [m, m / ref_total if ref_total else math.nan, p]
        raw.append(row)
        shown = [str(row[0]), f"{row[1]:.1%}"]
        marks = [False, False]
        if reference:
            shown += [str(row[2]), f"{row[3]:.1%}", fmt_p(row[4])]
            marks += [False, False, p_bold(row[4])]
        cells.append(shown)
        bold.append(marks)
    return RenderedTable(caption, cols, [_label(t) for t in tags], cells, bold, raw)


# ---------------------------------------------------------------------------
# guidelines


@dataclass(frozen=True)
class GuidelineRule:
    tag: str
    direction: str  # "risk" or "protective"
    evidence: TestResult | None = None
    threshold_p: float = P_THRESHOLD

    def to_dict(self):
        return {
            "tag": self.tag,
            "direction": self.direction,
            "evidence": self.evidence.to_dict() if self.evidence else None,
            "threshold_p": self.threshold_p,
        }

    @classmethod
    def from_dict(cls, d):
        ev = d.get("evidence")
        return cls(d["tag"], d["direction"], TestResult(**ev) if ev else None, d.get("threshold_p", P_THRESHOLD))


def derive_guidelines(results: dict, threshold_p=P_THRESHOLD) -> list:
    """One rule per tag significant in either direction, in table order."""
    if not results:
        raise ValueError("no compilability results")
    rules = []
    for tag in sorted(results, key=lambda t: (taxonomy.TABLE_ORDER.index(t) if t in taxonomy.TYPES_BY_ID else 99, t)):
        res = results[tag]
        if res.p_less < threshold_p:
            rules.append(GuidelineRule(tag, "risk", res, threshold_p))
        elif res.p_greater < threshold_p:
            rules.append(GuidelineRule(tag, "protective", res, threshold_p))
    return rules


def default_rules() -> list:
    rules = [GuidelineRule(t, "risk") for t in sorted(DEFAULT_RISK)]
    return rules + [GuidelineRule(t, "protective") for t in sorted(DEFAULT_PROTECTIVE)]


def dumps_rules(rules) -> str:
    return json.dumps([r.to_dict() for r in rules], indent=2, sort_keys=True) + "\n"


def load_rules(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return [GuidelineRule.from_dict(d) for d in json.load(fh)]


@dataclass
class WarningReport:
    predicted: frozenset
    warnings: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    exit_status: int = 0

    def text(self) -> str:
        tags = ", ".join(sorted(self.predicted)) or "none"
        lines = [f"predicted: {tags}"]
        lines += [f"warning: {w}" for w in self.warnings]
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def _evidence(rule):
    if rule.evidence is None:
        return "default rule"
    key = "p_less" if rule.direction == "risk" else "p_greater"
    return f"{key}={getattr(rule.evidence, key):.3g}"


def warn(message, model, rules=None, fail_on_risk=True) -> WarningReport:
    """Classify ``message`` and report predicted types that carry a risk rule.

    The exit status is ``EXIT_RISK`` when a risk type is predicted and
    ``fail_on_risk`` is set, else 0.
    """
    rules = default_rules() if rules is None else list(rules)
    pred = model.predict_messages([message])[0]
    predicted = frozenset(pred) if isinstance(pred, (set, frozenset)) else frozenset([pred] if pred else [])
    report = WarningReport(predicted)
    if not predicted:
        report.notes.append("unclassified: no commit type predicted")
        return report
    for rule in rules:
        if rule.tag not in predicted:
            continue
        if rule.direction == "risk":
            report.warnings.append(
                f"{_label(rule.tag)} changes are over-represented among commits that break the build ({_evidence(rule)})"
            )
        else:
            report.notes.append(f"{_label(rule.tag)} changes rarely break the build ({_evidence(rule)})")
    if report.warnings and fail_on_risk:
        report.exit_status = EXIT_RISK
    return report
