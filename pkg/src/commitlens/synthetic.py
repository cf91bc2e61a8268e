"""Deterministic synthetic commit corpus with planted tag keywords.

Each of five tags has a keyword that appears in a commit message exactly when
the commit truly carries the tag. Optional knobs add the disturbances used by
the experiment grid: recorded-label noise, keywords hidden from the message
but recoverable from metrics, and a ``maintenance`` tag assigned at random.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .corpus import CommitRecord, Dataset, DiffStat
from .seeding import substream

PLANTED = {
    "bug_fix": "fix",
    "build": "maven",
    "documentation": "javadoc",
    "feature_add": "add",
    "testing": "test",
}
SUB_KEYWORDS = {"replacement": "replace", "utility": "getter", "modification": "rework"}
FILLER = (
    "parser schema client server config cache index query session token stream buffer "
    "handler router widget plugin codec encoder decoder reader writer loader registry "
    "resolver executor worker thread pool socket channel record field column table row "
    "page layout panel dialog menu icon image font color border margin padding shadow "
    "vector matrix graph node edge path tree heap queue stack list array map set"
).split()
PROJECTS = ("avro", "calcite", "closure")
EMAILS = tuple(f"dev{i}@example.org" for i in range(8))
HIDDEN_SIGNAL_METRIC = "sonarqube.classes"


@dataclass
class SyntheticCorpus:
    dataset: Dataset
    clean_tags: list  # true tag sets, before label noise
    keywords: dict = field(default_factory=lambda: dict(PLANTED))

    @property
    def records(self):
        return self.dataset.records


def _sha(seed, project, i):
    return hashlib.sha1(f"commitlens-synthetic/{seed}/{project}/{i}".encode()).hexdigest()


def generate_corpus(
    n_commits=500,
    seed=7,
    noise=0.05,
    hidden_keyword_rate=0.0,
    maintenance_rate=0.0,
    sub_tag_rate=0.0,
    second_tag_rate=0.3,
) -> SyntheticCorpus:
    """Build the corpus.

    ``noise`` is the per-commit probability that one of the five planted tags
    has its recorded membership flipped. ``hidden_keyword_rate`` drops the
    ``feature_add`` keyword from that fraction of feature commits; every
    feature commit raises ``sonarqube.classes`` so metadata can still find it.
    ``maintenance_rate`` adds ``maintenance`` at random with no message signal.
    ``sub_tag_rate`` adds one maintenance sub-category with its own keyword.
    """
    rng = substream(seed, "synthetic")
    planted = sorted(PLANTED)
    subs = sorted(SUB_KEYWORDS)
    records, clean = [], []
    state = {p: {"sonarqube.classes": 40.0, "sonarqube.files": 30.0, "sonarqube.functions": 300.0,
                 "sonarqube.ncloc": 5000.0, "findbugs.total_bugs": 10.0, "findbugs.total_size": 6000.0,
                 "findbugs.total_classes": 40.0, "pmd.codesize": 100.0}
             for p in PROJECTS}
    last = {p: None for p in PROJECTS}
    counter = {p: 0 for p in PROJECTS}
    t = 1_500_000_000

    for _ in range(n_commits):
        project = PROJECTS[int(rng.integers(len(PROJECTS)))]
        tags = {planted[int(rng.integers(len(planted)))]}
        if rng.random() < second_tag_rate:
            tags.add(planted[int(rng.integers(len(planted)))])
        words = [PLANTED[tg] for tg in sorted(tags)]
        if "feature_add" in tags and rng.random() < hidden_keyword_rate:
            words.remove(PLANTED["feature_add"])
        if rng.random() < sub_tag_rate:
            sub = subs[int(rng.integers(len(subs)))]
            tags.add(sub)
            words.append(SUB_KEYWORDS[sub])
        if rng.random() < maintenance_rate:
            tags.add("maintenance")
        n_fill = int(rng.integers(3, 8))
        words += [FILLER[int(i)] for i in rng.integers(0, len(FILLER), size=n_fill)]
        words = [words[int(i)] for i in rng.permutation(len(words))]
        message = " ".join(words).capitalize()
        if rng.random() < 0.3:
            message = f"{project.upper()}-{int(rng.integers(1, 2000))}. {message}"
        if rng.random() < 0.2:
            message += f"\n\ngit-svn-id: https://svn.example.org/repos/{project}/trunk@{int(rng.integers(1e6, 2e6))}"

        recorded = set(tags)
        if rng.random() < noise:
            flip = planted[int(rng.integers(len(planted)))]
            recorded ^= {flip}
            if not recorded:
                recorded = {planted[(planted.index(flip) + 1) % len(planted)]}

        m = dict(state[project])
        if "feature_add" in tags:
            m["sonarqube.classes"] += float(rng.integers(1, 5))
            m["findbugs.total_classes"] += 1.0
        m["sonarqube.files"] += float(rng.integers(0, 3))
        m["sonarqube.functions"] += float(rng.integers(-3, 6))
        m["sonarqube.ncloc"] += float(rng.integers(-40, 80))
        m["findbugs.total_bugs"] += float(rng.integers(-1, 2))
        m["findbugs.total_size"] += float(rng.integers(-30, 60))
        m["pmd.codesize"] += float(rng.integers(-2, 4))
        state[project] = m

        per_file = [(f"src/main/{project}/{FILLER[int(rng.integers(len(FILLER)))]}.java",
                     int(rng.integers(1, 40)), int(rng.integers(0, 20)))]
        if "testing" in tags:
            per_file.append((f"src/test/{project}/Test{counter[project]}.java", int(rng.integers(1, 30)), 0))
        if "documentation" in tags:
            per_file.append(("docs/README.md", int(rng.integers(1, 10)), int(rng.integers(0, 5))))
        if "build" in tags:
            per_file.append(("pom.xml", int(rng.integers(1, 6)), int(rng.integers(0, 3))))

        breaker_p = 0.05
        if tags & {"build", "feature_add"}:
            breaker_p = 0.35
        elif tags & {"documentation", "bug_fix"}:
            breaker_p = 0.02
        sha = _sha(seed, project, counter[project])
        counter[project] += 1
        t += int(rng.integers(600, 86400))
        records.append(
            CommitRecord(
                sha=sha,
                project=project,
                author_email=EMAILS[int(rng.integers(len(EMAILS)))],
                author_time=t,
                message=message,
                parents=(last[project],) if last[project] else (),
                diffstat=DiffStat.from_files(per_file),
                compilable=bool(rng.random() >= breaker_p),
                impactful=bool(rng.random() < 0.8),
                tags=frozenset(recorded),
                metrics=m,
            )
        )
        clean.append(frozenset(tags))
        last[project] = sha
    return SyntheticCorpus(Dataset(records), clean)


def planted_stems():
    """Planted keywords as they appear after default cleaning."""
    from .textprep import clean_message

    return {tag: clean_message(word)[0] for tag, word in PLANTED.items()}
