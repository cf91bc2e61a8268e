import math
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from conftest import EXPECTED_PAIRS, EXPECTED_SKIPPED, dag_records, sha_of
from hypothesis import given, settings, strategies as st

from commitlens.corpus import CommitRecord, Dataset
from commitlens.errors import BrokenParentChain, LengthMismatch, MissingMetrics, NoLabeledCompilability, UnknownMetric
from commitlens.stats import (
    CommitPair,
    ContingencyTable,
    build_pairs,
    compare_proportions,
    compilability_table,
    compilability_tests,
    fisher_exact,
    metric_keys,
    pearson,
    run_battery,
    tag_metric_table,
)

NAMES = {sha_of(f"c{i:02d}"): f"c{i:02d}" for i in range(30)}


def brute_force(a, b, c, d):
    """Exact rational enumeration of every table with the same margins."""
    r1, c1, n = a + b, a + c, a + b + c + d
    denom = comb(n, c1)
    probs = {k: Fraction(comb(r1, k) * comb(n - r1, c1 - k), denom) for k in range(max(0, c1 - (n - r1)), min(r1, c1) + 1)}
    obs = probs[a]
    less = sum(p for k, p in probs.items() if k <= a)
    greater = sum(p for k, p in probs.items() if k >= a)
    two = sum(p for p in probs.values() if p <= obs * Fraction(10**7 + 1, 10**7))
    return float(two), float(greater), float(less), float(obs)


tables = st.tuples(*(st.integers(0, 12) for _ in range(4))).filter(lambda t: sum(t) > 0)


@given(tables)
@settings(max_examples=300)
def test_fisher_vs_brute_force(t):
    r = fisher_exact(ContingencyTable(*t))
    two, greater, less, point = brute_force(*t)
    assert r.p_two_sided == pytest.approx(two, abs=1e-10)
    assert r.p_greater == pytest.approx(greater, abs=1e-10)
    assert r.p_less == pytest.approx(less, abs=1e-10)
    assert r.p_point == pytest.approx(point, abs=1e-10)


@given(tables)
def test_fisher_properties(t):
    r = fisher_exact(ContingencyTable(*t))
    assert abs(r.p_greater + r.p_less - r.p_point - 1) < 1e-10
    assert r.p_two_sided >= min(r.p_greater, r.p_less) - 1e-10
    for p in (r.p_two_sided, r.p_greater, r.p_less):
        assert 0 <= p <= 1
    a, b, c, d = t
    swapped = fisher_exact(ContingencyTable(d, c, b, a))
    assert swapped.p_two_sided == pytest.approx(r.p_two_sided, abs=1e-12)
    assert swapped.p_greater == pytest.approx(r.p_greater, abs=1e-12)


@given(tables)
@settings(max_examples=100)
def test_fisher_matches_scipy(t):
    from scipy.stats import fisher_exact as sp_fisher

    r = fisher_exact(ContingencyTable(*t))
    table = [[t[0], t[1]], [t[2], t[3]]]
    assert r.p_two_sided == pytest.approx(sp_fisher(table)[1], abs=1e-9)
    assert r.p_greater == pytest.approx(sp_fisher(table, alternative="greater")[1], abs=1e-9)
    assert r.p_less == pytest.approx(sp_fisher(table, alternative="less")[1], abs=1e-9)


def test_fisher_known_values():
    assert fisher_exact([[3, 1], [1, 3]]).p_two_sided == pytest.approx(34 / 70, abs=1e-12)
    assert round(compare_proportions(81, 600, 218, 1600).p_two_sided, 2) == 1.00
    assert round(compare_proportions(109, 600, 230, 1600).p_two_sided, 2) == 0.03
    assert fisher_exact([[3, 1], [1, 3]]).odds_ratio == 9.0
    assert fisher_exact([[0, 0], [2, 3]]).p_two_sided == 1.0
    assert math.isinf(fisher_exact([[2, 0], [0, 2]]).odds_ratio)


def test_contingency_validation():
    with pytest.raises(ValueError):
        ContingencyTable(0, 0, 0, 0)
    with pytest.raises(ValueError):
        ContingencyTable(-1, 2, 3, 4)


def test_pearson_examples():
    x = [1.0, 2.0, 3.0, 4.0]
    assert pearson(x, x) == pytest.approx(1.0)
    assert pearson(x, [-v for v in x]) == pytest.approx(-1.0)
    # by hand: sum dxdy = 3.5, sxx = 5, syy = 4.75
    assert pearson(x, [2, 4, 5, 4]) == pytest.approx(3.5 / math.sqrt(5 * 4.75), abs=1e-12)
    assert math.isnan(pearson([1, 1, 1], [1, 2, 3]))
    with pytest.raises(LengthMismatch):
        pearson([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        pearson([1], [1])


vectors = st.integers(2, 40).flatmap(
    lambda n: st.tuples(
        st.lists(st.floats(-1e3, 1e3), min_size=n, max_size=n),
        st.lists(st.floats(-1e3, 1e3), min_size=n, max_size=n),
    )
)


@given(vectors, st.floats(0.1, 10), st.floats(-100, 100))
def test_pearson_properties(xy, a, b):
    x, y = map(np.asarray, xy)
    r = pearson(x, y)
    if math.isnan(r) or np.ptp(x) < 1e-6 or np.ptp(y) < 1e-6:
        return
    assert pearson(y, x) == pytest.approx(r, abs=1e-12)
    assert pearson(a * x + b, y) == pytest.approx(r, abs=1e-9)
    assert pearson(-a * x + b, y) == pytest.approx(-r, abs=1e-9)


def test_build_pairs_fixture_dag(dag):
    ps = build_pairs(Dataset(dag))
    got = [(NAMES[p.child_sha], NAMES[p.parent_sha], p.metric_deltas["findbugs.total_bugs"]) for p in ps]
    assert got == EXPECTED_PAIRS
    assert [(NAMES[s], r) for s, r in ps.skipped] == EXPECTED_SKIPPED
    assert all(p.metric_deltas["pmd.codesize"] == 1 for p in ps)
    neutral_tagged = sum(1 for r in dag if r.tags and r.is_neutral)
    assert len(ps) + len(ps.skipped) == neutral_tagged


def test_build_pairs_indicator_zero_for_equal():
    parent = CommitRecord(sha_of("p"), "x", impactful=True, metrics={"pmd.x": 10.0})
    child = CommitRecord(sha_of("c"), "x", parents=(parent.sha,), compilable=True, tags=frozenset({"build"}), metrics={"pmd.x": 10.0})
    (pair,) = build_pairs([parent, child])
    assert pair.metric_deltas == {"pmd.x": 0}


def test_build_pairs_errors():
    orphan = CommitRecord(sha_of("c"), "x", parents=(sha_of("gone"),), compilable=True, tags=frozenset({"build"}), metrics={})
    with pytest.raises(BrokenParentChain):
        build_pairs([orphan])
    parent = CommitRecord(sha_of("p"), "x", impactful=True)
    child = CommitRecord(sha_of("c"), "x", parents=(parent.sha,), compilable=True, tags=frozenset({"build"}), metrics={})
    with pytest.raises(MissingMetrics):
        build_pairs([parent, child])


def test_build_pairs_depth_cap():
    recs = [CommitRecord(sha_of("r0"), "x", impactful=True, metrics={})]
    for i in range(1, 6):
        recs.append(CommitRecord(sha_of(f"r{i}"), "x", parents=(recs[-1].sha,), impactful=False, compilable=True, tags=frozenset({"build"}), metrics={}))
    ps = build_pairs(recs, max_walk=3)
    assert [NAMES.get(s, s) for s, r in ps.skipped if r == "depth"] == [sha_of("r4"), sha_of("r5")]


def _pairs(rows):
    return [CommitPair(str(i), "p", "x", {"m.k": inc}, {"m.k": float(inc)}, frozenset(tags)) for i, (tags, inc) in enumerate(rows)]


def test_tag_metric_table():
    pairs = _pairs([({"t"}, 1), ({"t"}, 0), ({"u"}, 1), ({"u"}, 0)])
    assert tag_metric_table(pairs, "t", "m.k") == ContingencyTable(1, 1, 1, 1)
    assert tag_metric_table(_pairs([({"t"}, 1)] * 3), "t", "m.k") == ContingencyTable(3, 0, 0, 0)
    absent = tag_metric_table(pairs, "v", "m.k")
    assert (absent.a, absent.b) == (0, 0)
    with pytest.raises(UnknownMetric):
        tag_metric_table(pairs, "t", "pmd.nope")


def test_battery():
    pairs = _pairs([({"t"}, 1), ({"t"}, 0), ({"u"}, 1), ({"u"}, 0)])
    b = run_battery(pairs, ["t"], ["m.k"])
    assert list(b.cells) == [("t", "m.k")]
    cell = b.cell("t", "m.k")
    assert cell.result.p_two_sided == pytest.approx(1.0) and cell.r == 0.0
    b2 = run_battery(pairs, ["zz", "t"], ["m.k", "pmd.nope"], n_jobs=2)
    assert math.isnan(b2.cell("zz", "m.k").r)
    assert b2.cell("zz", "m.k").result.p_two_sided == 1.0
    assert b2.cell("t", "pmd.nope").error
    assert metric_keys(pairs) == ["m.k"]


def test_battery_serial_equals_parallel(dag):
    ps = build_pairs(dag)
    tags = ["bug_fix", "testing", "feature_add"]
    a = run_battery(ps, tags, metric_keys(ps))
    b = run_battery(ps, tags, metric_keys(ps), n_jobs=3)
    assert [(k, v.result) for k, v in a.cells.items()] == [(k, v.result) for k, v in b.cells.items()]


def test_compilability(dag):
    t = compilability_table(dag, "build")
    # 27 labeled and tagged commits (c04, c16 untagged; c09 unlabeled).
    # build: c11 neutral, c03 and c13 breakers; other breakers c20 and c23
    assert t == ContingencyTable(1, 2, 22, 2)
    r = compilability_tests(dag, "branch")
    assert (r.p_two_sided, r.p_greater, r.p_less) == (1.0, 1.0, 1.0)
    with pytest.raises(NoLabeledCompilability):
        compilability_tests([CommitRecord(sha_of("x"), "p")], "build")


def test_compilability_directions():
    def recs(tagged_neutral, tagged_breaker, other_neutral, other_breaker, tag):
        out = []
        for n, tags, ok in [
            (tagged_neutral, {tag}, True),
            (tagged_breaker, {tag}, False),
            (other_neutral, {"testing"}, True),
            (other_breaker, {"testing"}, False),
        ]:
            out += [CommitRecord(sha_of(f"{tag}{ok}{len(out)}{i}"), "p", compilable=ok, tags=frozenset(tags)) for i in range(n)]
        return out

    doc = compilability_tests(recs(300, 2, 900, 60, "documentation"), "documentation")
    assert doc.p_greater < 0.01 and doc.p_less > 0.99
    build = compilability_tests(recs(20, 30, 900, 60, "build"), "build")
    assert build.p_less < 0.01 and build.p_greater > 0.99
