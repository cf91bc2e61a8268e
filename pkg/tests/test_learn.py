import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from commitlens.errors import (
    DatasetTooSmall,
    EmptyTrainingSet,
    FingerprintMismatch,
    LabelWidthMismatch,
    LengthMismatch,
    ModelLoadError,
    NoTermColumns,
    WidthMismatch,
)
from commitlens.features import fit_vocabulary
from commitlens.learn import (
    BinaryRelevanceClassifier,
    CommitClassifier,
    DecisionTreeClassifier,
    ExtraTreesClassifier,
    ForestClassifier,
    RandomForestClassifier,
    TreeParams,
    build_tree,
    evaluate,
    format_prediction,
    gini,
    keywords,
    predict,
    primary_tag,
    split_train_test,
    train_forest,
    train_multilabel,
    train_tree,
)
from commitlens.learn.labels import indicator_matrix
from commitlens.seeding import substream


def check_structure(tree, params, n_features):
    for node in range(tree.node_count):
        assert tree.value[node].sum() > 0
        if node > 0:  # the root holds whatever it was given
            assert tree.n_samples[node] >= params.min_samples_leaf
        if params.max_depth is not None:
            assert tree.depth[node] <= params.max_depth
        if tree.feature[node] >= 0:
            assert tree.feature[node] < n_features
            assert np.isfinite(tree.threshold[node])
            l, r = tree.left[node], tree.right[node]
            weighted = (tree.n_samples[l] * tree.impurity[l] + tree.n_samples[r] * tree.impurity[r]) / tree.n_samples[node]
            assert weighted <= tree.impurity[node] + 1e-12


def test_gini():
    assert gini([5, 0]) == 0.0
    assert gini([1, 1]) == 0.5
    assert gini([]) == 0.0


def test_pure_root_is_leaf():
    X = np.random.default_rng(0).random((6, 3))
    tree = build_tree(X, np.zeros(6, int), 1, TreeParams(split_mode="best"), substream(1, "t"))
    assert tree.node_count == 1 and tree.impurity[0] == 0.0


def test_separable_four_points():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    y = np.array([0, 0, 1, 1])
    model = train_tree(X, y)
    assert list(model.predict(X)) == [0, 0, 1, 1]
    tree = model.trees_[0]
    # one split on column 0 at the midpoint
    assert tree.node_count == 3 and tree.feature[0] == 0 and tree.threshold[0] == 0.5


def test_max_depth_zero_majority():
    X = np.arange(5.0)[:, None]
    y = ["b", "a", "b", "a", "b"]
    model = DecisionTreeClassifier(max_depth=0).fit(X, y)
    assert set(model.predict(X)) == {"b"}


def test_tie_goes_to_smallest_label():
    X = np.zeros((2, 1))
    model = DecisionTreeClassifier().fit(X, ["zeta", "alpha"])
    assert model.predict(X)[0] == "alpha"


def test_single_class_model():
    X = np.random.default_rng(2).random((5, 2))
    model = ExtraTreesClassifier(n_trees=3).fit(X, ["x"] * 5)
    assert set(model.predict(X)) == {"x"}


def test_errors():
    with pytest.raises(EmptyTrainingSet):
        ForestClassifier().fit(np.zeros((0, 2)), [])
    with pytest.raises(LabelWidthMismatch):
        ForestClassifier().fit(np.zeros((3, 2)), [1, 2])
    model = ExtraTreesClassifier(n_trees=2).fit(np.eye(3), [0, 1, 2])
    with pytest.raises(WidthMismatch):
        model.predict(np.eye(4))
    with pytest.raises(ValueError):
        TreeParams(min_samples_leaf=0)
    with pytest.raises(ValueError):
        ForestClassifier(kind="svm").fit(np.eye(2), [0, 1])


@st.composite
def consistent_data(draw):
    n = draw(st.integers(2, 25))
    d = draw(st.integers(1, 4))
    X = np.array(draw(st.lists(st.lists(st.integers(0, 3), min_size=d, max_size=d), min_size=n, max_size=n)), float)
    labels = {}
    y = []
    for row in map(tuple, X):
        labels.setdefault(row, draw(st.integers(0, 2)))
        y.append(labels[row])
    return X, np.array(y)


@given(consistent_data(), st.sampled_from(["best", "random_threshold"]), st.integers(0, 2**32))
@settings(max_examples=60, deadline=None)
def test_unlimited_tree_fits_consistent_data(data, mode, seed):
    X, y = data
    params = TreeParams(split_mode=mode, max_depth=None, seed=seed)
    tree = build_tree(X, y, 3, params, substream(seed, "t"))
    pred = np.argmax(tree.predict_proba(X), axis=1)
    assert (pred == y).all()
    check_structure(tree, params, X.shape[1])


@given(consistent_data(), st.integers(1, 4), st.integers(0, 6))
@settings(max_examples=40, deadline=None)
def test_structure_invariants(data, leaf, depth):
    X, y = data
    params = TreeParams(split_mode="best", min_samples_leaf=leaf, max_depth=depth)
    check_structure(build_tree(X, y, 3, params, substream(0, "t")), params, X.shape[1])


def test_duplication_invariance_extra_trees():
    rng = np.random.default_rng(4)
    X = rng.random((30, 5))
    y = (X[:, 0] + X[:, 1] > 1).astype(int)
    a = ExtraTreesClassifier(n_trees=5, seed=9).fit(X, y)
    b = ExtraTreesClassifier(n_trees=5, seed=9).fit(np.vstack([X, X]), np.concatenate([y, y]))
    for ta, tb in zip(a.trees_, b.trees_):
        assert ta.feature.tolist() == tb.feature.tolist()
        assert ta.threshold.tolist() == tb.threshold.tolist()


def test_random_forest_single_tree_is_bootstrap():
    X = np.random.default_rng(5).random((20, 3))
    y = (X[:, 0] > 0.5).astype(int)
    rf = RandomForestClassifier(n_trees=1, seed=3).fit(X, y)
    assert rf.trees_[0].n_samples[0] == 20
    boot = substream(3, "tree/0").integers(0, 20, size=20)
    assert rf.trees_[0].value[0].tolist() == np.bincount(y[boot], minlength=2).tolist()


def test_determinism_and_parallel():
    rng = np.random.default_rng(6)
    X = rng.random((60, 8))
    y = (X[:, 2] > 0.4).astype(int) + (X[:, 5] > 0.7)
    for kind in ("random_forest", "extra_trees"):
        a = ForestClassifier(kind=kind, n_trees=12, seed=11).fit(X, y)
        b = ForestClassifier(kind=kind, n_trees=12, seed=11, n_jobs=4).fit(X, y)
        assert a.to_dict() == b.to_dict()
        c = ForestClassifier.from_dict(a.to_dict())
        np.testing.assert_array_equal(c.predict_proba(X), a.predict_proba(X))
    d = ForestClassifier(n_trees=12, seed=12).fit(X, y)
    assert d.to_dict() != a.to_dict()


def test_feature_importances():
    X = np.array([[0.0, 5.0], [1.0, 5.0], [0.0, 5.0], [1.0, 5.0]])
    model = DecisionTreeClassifier().fit(X, [0, 1, 0, 1])
    assert model.feature_importances_.tolist() == [1.0, 0.0]


def test_binary_relevance():
    X = np.eye(4)
    Y = [{"testing"}] * 4
    model = BinaryRelevanceClassifier(n_trees=5, tags=["bug_fix", "testing"]).fit(X, Y)
    assert model.predict(X) == [frozenset({"testing"})] * 4
    assert model.vote_fractions(X)[:, 0].tolist() == [0.0] * 4
    back = BinaryRelevanceClassifier.from_dict(model.to_dict())
    assert back.predict(X) == model.predict(X)


def test_train_multilabel_config_filter():
    X = np.eye(3)
    model = train_multilabel(X, [{"testing"}, {"build", "feature_add", "testing"}, {"bug_fix"}], TreeParams(n_trees=3), "no_maint28")
    assert "maintenance" not in model.classes_
    assert len(model.classes_) == 28
    assert train_forest(X, [0, 1, 0], TreeParams(n_trees=2)).n_trees == 2


def test_predict_checks_fingerprint():
    model = CommitClassifier(n_trees=3).fit(_records([("fix parser", {"bug_fix"}), ("add test", {"testing"})]))
    fm = model._features(_records([("fix", {"bug_fix"})]))
    assert predict(model, fm) == ["bug_fix"]
    fm.fingerprint = "0" * 64
    with pytest.raises(FingerprintMismatch):
        predict(model, fm)


@pytest.mark.parametrize(
    "pred,truth,mode,expected",
    [
        (["a", "b"], ["a", "b"], "single", (1.0, 1.0, 1.0)),
        (["a", "a"], ["b", "b"], "single", (0.0, 0.0, 0.0)),
        ([{"a"}, {"a"}], [{"a"}, {"b"}], "multi", (0.5, 0.5, 0.5)),
        ([set(), {"a", "b"}], [set(), {"a"}], "multi", (0.75, 1.0, 2 / 3)),
    ],
)
def test_evaluate(pred, truth, mode, expected):
    r = evaluate(pred, truth, mode)
    np.testing.assert_allclose(r.row(), expected)
    p, rc = r.precision, r.recall
    assert r.f1 == pytest.approx(2 * p * rc / (p + rc) if p + rc else 0.0)


def test_evaluate_length():
    with pytest.raises(LengthMismatch):
        evaluate(["a"], [], "single")


def test_primary_tag_priority():
    assert primary_tag({"testing", "feature_add", "build"}) == "feature_add"
    assert primary_tag({"testing", "documentation"}) == "testing"
    assert primary_tag({"rename", "legal"}) == "legal"
    assert primary_tag(set()) is None


def test_split():
    rows = [type("R", (), {"tags": frozenset({t})})() for t in ["a", "b"] * 5]
    train, test = split_train_test(rows, 0.8, seed=1, key=lambda r: min(r.tags))
    assert len(train) == 8 and len(test) == 2
    assert not set(map(id, train)) & set(map(id, test))
    assert {min(r.tags) for r in test} == {"a", "b"}
    again = split_train_test(rows, 0.8, seed=1, key=lambda r: min(r.tags))
    assert [id(r) for r in again[0]] == [id(r) for r in train]
    with pytest.raises(DatasetTooSmall):
        split_train_test(rows, 1.0)
    with pytest.raises(DatasetTooSmall):
        split_train_test(rows[:1], 0.5)


def test_indicator_matrix():
    assert indicator_matrix([{"a"}, {"a", "b"}], ["a", "b"]).tolist() == [[1, 0], [1, 1]]


# -- CommitClassifier -------------------------------------------------------


def _records(rows):
    from commitlens.corpus import CommitRecord
    from conftest import sha_of

    return [CommitRecord(sha_of(f"{i}{m}"), "p", message=m, tags=frozenset(t)) for i, (m, t) in enumerate(rows)]


def test_keywords_single_split():
    recs = _records([("fix parser", {"bug_fix"}), ("add parser", {"feature_add"})])
    model = CommitClassifier(model="tree").fit(recs)
    report = model.keywords()
    assert report.per_tag["*"][0][0] in {"fix", "add"}
    assert report.per_tag["*"][0][1] == 1.0
    scores = dict(report.per_tag["*"])
    assert "parser" not in scores  # unsplit column has zero importance


def test_keywords_requires_terms():
    model = ExtraTreesClassifier(n_trees=2).fit(np.eye(2), [0, 1])
    with pytest.raises(NoTermColumns):
        keywords(model, fit_vocabulary([[]]))


def test_multilabel_none_sentinel():
    recs = _records([("fix parser", {"bug_fix"}), ("add feature", {"feature_add"})] * 5)
    model = CommitClassifier(mode="multi", n_trees=10, config="no_maint28").fit(recs)
    preds = model.predict_messages(["completely unrelated words"])
    assert format_prediction(preds[0]) == "none" or preds[0]
    assert format_prediction(frozenset()) == "none"
    assert format_prediction(frozenset({"b", "a"})) == "a,b"


def test_model_persistence(tmp_path, synthetic):
    recs = synthetic.records[:120]
    lookup = {(r.project, r.sha): r for r in synthetic.records}
    a = CommitClassifier(mode="multi", n_trees=8, metadata=True, features="tfidf").fit(recs, lookup=lookup)
    path = tmp_path / "m.clm"
    a.save(path)
    b = CommitClassifier.load(path)
    assert b.dumps() == a.dumps()
    assert b.predict(recs, lookup) == a.predict(recs, lookup)
    with pytest.raises(ModelLoadError):
        b.predict_messages(["fix"])


def test_model_load_errors(tmp_path):
    bad = tmp_path / "bad.clm"
    bad.write_text("{not json")
    with pytest.raises(ModelLoadError):
        CommitClassifier.load(bad)
    bad.write_text('{"format": "other"}')
    with pytest.raises(ModelLoadError):
        CommitClassifier.load(bad)


def test_estimator_params():
    clf = CommitClassifier(n_trees=7)
    assert clf.get_params()["n_trees"] == 7
    assert clf.set_params(model="rf").model == "rf"
    with pytest.raises(ValueError):
        CommitClassifier(mode="both").fit(_records([("x", {"build"})]))
