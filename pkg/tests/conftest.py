import hashlib
import os
import subprocess

import pytest

from commitlens.corpus import CommitRecord
from commitlens.synthetic import generate_corpus

# ---------------------------------------------------------------------------
# scripted git repository: 12 commits, one of them a merge
#
# Each step is (branch, message, {path: lines or None for delete or bytes}).
# EXPECTED_DIFFSTATS holds the per-file numstat worked out by hand.

REPO_STEPS = [
    ("master", "Initial import", {"src/A.java": ["L1", "L2", "L3"], "README.md": ["R1", "R2"]}),
    ("master", "Extend A", {"src/A.java": ["L1", "L2", "L3", "L4", "L5"]}),
    ("master", "Add guide", {"docs/guide.md": ["G1"]}),
    ("master", "Fix line two", {"src/A.java": ["L1", "L2x", "L3", "L4", "L5"]}),
    ("master", "Add build file", {"build.xml": ["B1", "B2"]}),
    ("feature", "Add B", {"src/B.java": ["b1", "b2", "b3", "b4"]}),
    ("feature", "Extend B", {"src/B.java": ["b1", "b2", "b3", "b4", "b5"]}),
    ("master", "Tweak readme", {"README.md": ["R1", "R2x"]}),
    ("master", "Merge branch 'feature'", "MERGE"),
    ("master", "Drop guide", {"docs/guide.md": None}),
    ("master", "Add logo", {"img.bin": b"\x00\x01\x02\xff\x00binary"}),
    ("master", "Replace last line", {"src/A.java": ["L1", "L2x", "L3", "L4", "L6"]}),
]

EXPECTED_DIFFSTATS = {
    "Initial import": {"src/A.java": (3, 0), "README.md": (2, 0)},
    "Extend A": {"src/A.java": (2, 0)},
    "Add guide": {"docs/guide.md": (1, 0)},
    "Fix line two": {"src/A.java": (1, 1)},
    "Add build file": {"build.xml": (2, 0)},
    "Add B": {"src/B.java": (4, 0)},
    "Extend B": {"src/B.java": (1, 0)},
    "Tweak readme": {"README.md": (1, 1)},
    "Merge branch 'feature'": {"src/B.java": (5, 0)},
    "Drop guide": {"docs/guide.md": (0, 1)},
    "Add logo": {"img.bin": (0, 0)},
    "Replace last line": {"src/A.java": (1, 1)},
}

IMPACTFUL = {"Initial import", "Extend A", "Fix line two", "Add B", "Extend B", "Merge branch 'feature'", "Replace last line"}


def _git(repo, *args, env=None):
    return subprocess.run(["git", "-C", str(repo), *args], check=True, capture_output=True, env=env).stdout


def make_repo(path):
    path.mkdir(parents=True, exist_ok=True)
    base = dict(os.environ)
    base.update(
        GIT_AUTHOR_NAME="Dev",
        GIT_AUTHOR_EMAIL="dev@example.org",
        GIT_COMMITTER_NAME="Dev",
        GIT_COMMITTER_EMAIL="dev@example.org",
        GIT_CONFIG_NOSYSTEM="1",
        HOME=str(path),
    )
    _git(path, "init", "-q", "-b", "master", env=base)
    t = 1_600_000_000
    for i, (branch, message, files) in enumerate(REPO_STEPS):
        env = dict(base, GIT_AUTHOR_DATE=f"@{t + 60 * i} +0000", GIT_COMMITTER_DATE=f"@{t + 60 * i} +0000")
        if branch == "feature" and message == "Add B":
            _git(path, "checkout", "-q", "-b", "feature", env=env)
        elif branch == "master":
            current = _git(path, "symbolic-ref", "--short", "HEAD", env=env).decode().strip()
            if current != "master":
                _git(path, "checkout", "-q", "master", env=env)
        if files == "MERGE":
            _git(path, "merge", "-q", "--no-ff", "-m", message, "feature", env=env)
            continue
        for rel, content in files.items():
            target = path / rel
            if content is None:
                _git(path, "rm", "-q", rel, env=env)
                continue
            target.parent.mkdir(parents=True, exist_ok=True)
            if isinstance(content, bytes):
                target.write_bytes(content)
            else:
                target.write_text("\n".join(content) + "\n")
            _git(path, "add", rel, env=env)
        _git(path, "commit", "-q", "-m", message, env=env)
    return path


@pytest.fixture(scope="session")
def git_repo(tmp_path_factory):
    return make_repo(tmp_path_factory.mktemp("fixture") / "repo")


# ---------------------------------------------------------------------------
# 30-commit DAG for pair construction
#
# (name, parents, impactful, compilable, tags)

DAG = [
    ("c00", (), False, True, {"documentation"}),
    ("c01", ("c00",), True, True, {"feature_add"}),
    ("c02", ("c01",), False, True, {"bug_fix"}),
    ("c03", ("c02",), True, False, {"build"}),
    ("c04", ("c03",), False, True, None),
    ("c05", ("c04",), False, True, {"testing"}),
    ("c06", ("c05",), True, True, {"refactoring"}),
    ("c07", ("c06",), False, True, {"testing"}),
    ("c08", ("c06",), True, True, {"feature_add"}),
    ("c09", ("c08",), False, None, {"bug_fix"}),
    ("c10", ("c07", "c09"), False, True, {"merge"}),
    ("c11", ("c10",), True, True, {"build"}),
    ("c12", ("c11",), False, True, {"documentation"}),
    ("c13", ("c12",), False, False, {"build"}),
    ("c14", ("c13",), False, True, {"clean_up"}),
    ("c15", ("c14",), True, True, {"feature_add", "testing"}),
    ("c16", ("c15",), True, True, None),
    ("c17", ("c16",), False, True, {"rename"}),
    ("c18", (), True, True, {"legal"}),
    ("c19", ("c18",), False, True, {"data"}),
    ("c20", ("c19",), False, False, {"data"}),
    ("c21", ("c20",), False, True, {"debug"}),
    ("c22", ("c17",), False, True, {"bug_fix"}),
    ("c23", ("c22",), True, False, {"feature_add"}),
    ("c24", ("c23",), False, True, {"refactoring"}),
    ("c25", ("c24", "c21"), False, True, {"merge"}),
    ("c26", ("c25",), True, True, {"maintenance"}),
    ("c27", ("c26",), False, True, {"versioning"}),
    ("c28", ("c27",), False, True, {"testing"}),
    ("c29", ("c28",), True, True, {"bug_fix"}),
]

# (child, parent, findbugs.total_bugs increment) enumerated by hand; every
# pmd.codesize increment is 1 because codesize grows with the commit index.
EXPECTED_PAIRS = [
    ("c02", "c01", 1),
    ("c05", "c03", 0),
    ("c06", "c03", 0),
    ("c07", "c06", 1),
    ("c08", "c06", 1),
    ("c10", "c06", 0),
    ("c11", "c06", 0),
    ("c12", "c11", 1),
    ("c14", "c11", 1),
    ("c15", "c11", 0),
    ("c17", "c16", 1),
    ("c19", "c18", 1),
    ("c21", "c18", 0),
    ("c22", "c16", 1),
    ("c24", "c23", 1),
    ("c25", "c23", 0),
    ("c26", "c23", 0),
    ("c27", "c26", 1),
    ("c28", "c26", 1),
    ("c29", "c26", 1),
]
EXPECTED_SKIPPED = [("c00", "root"), ("c01", "root"), ("c18", "root")]


def sha_of(name):
    return hashlib.sha1(name.encode()).hexdigest()


def dag_records():
    out = []
    for name, parents, impactful, compilable, tags in DAG:
        i = int(name[1:])
        out.append(
            CommitRecord(
                sha=sha_of(name),
                project="dag",
                message=name,
                parents=tuple(sha_of(p) for p in parents),
                impactful=impactful,
                compilable=compilable,
                tags=frozenset(tags) if tags else None,
                metrics={"findbugs.total_bugs": float(i % 5), "pmd.codesize": float(100 + i)},
            )
        )
    return out


@pytest.fixture
def dag():
    return dag_records()


@pytest.fixture(scope="session")
def synthetic():
    return generate_corpus()


@pytest.fixture(scope="session")
def synthetic_clean():
    return generate_corpus(noise=0.0)


# ---------------------------------------------------------------------------
# acceptance reporting: one line per criterion, repeated in the summary

CRITERIA = {}


@pytest.fixture
def criterion():
    def record(number, ok, detail=""):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        CRITERIA[number] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[number])
