import numpy as np
import pytest

from astembed.forest import (
    ConfusionMatrix,
    DecisionTree,
    ForestConfig,
    RandomForest,
    RandomForestFamilyClassifier,
    _TreeNode,
    _weighted_gini,
    class_weights,
    confusion,
    cross_validate,
    filter_families,
    oob_score,
    stratified_split,
    train_forest,
    train_tree,
    tune_max_depth,
)
from astembed.rng import substream


def separable_dataset(n_classes=8, per_class=60, seed=0):
    """Disjoint node-count bands per class: trivially separable."""
    rng = np.random.default_rng(seed)
    X, y = [], []
    for c in range(n_classes):
        lo = 20 + c * 30
        for _ in range(per_class):
            X.append([int(rng.integers(3, 12)), int(rng.integers(lo, lo + 10))])
            y.append(c)
    return np.array(X, dtype=np.float64), np.array(y, dtype=np.int64)


class TestClassWeights:
    def test_formula(self):
        labels = np.array([0] * 10 + [1] * 30)
        w = class_weights(labels)
        assert w[0] == pytest.approx(2.0)
        assert w[1] == pytest.approx(40 / 60)

    def test_balanced(self):
        w = class_weights(np.array([0, 0, 1, 1, 2, 2]))
        assert all(v == pytest.approx(1.0) for v in w.values())

    def test_single_class(self):
        assert class_weights(np.array([3, 3, 3]))[3] == pytest.approx(1.0)

    def test_empty(self):
        with pytest.raises(ValueError):
            class_weights(np.array([]))


class TestFilterFamilies:
    def test_threshold(self):
        X = np.zeros((60, 2))
        y = np.array([0] * 50 + [1] * 10)
        X2, y2, names = filter_families(X, y, ["A", "B"], 41)
        assert names == ["A"]
        assert len(X2) == 50
        assert set(y2) == {0}

    def test_all_survive(self):
        X = np.zeros((100, 2))
        y = np.array([0] * 50 + [1] * 50)
        _, y2, names = filter_families(X, y, ["A", "B"], 41)
        assert names == ["A", "B"]
        assert len(y2) == 100

    def test_boundary_strictly_more_than_40(self):
        X = np.zeros((40, 2))
        y = np.zeros(40, dtype=int)
        with pytest.raises(ValueError):
            filter_families(X, y, ["A"], 41)


class TestGini:
    def test_pure_zero(self):
        assert _weighted_gini(np.array([5.0, 0.0])) == 0.0

    def test_balanced_half(self):
        assert _weighted_gini(np.array([1.0, 1.0])) == pytest.approx(0.5)


class TestTree:
    def test_separable_two_class(self):
        X = np.array([[3, 10], [4, 11], [3, 50], [5, 52]], dtype=float)
        y = np.array([0, 0, 1, 1])
        tree = train_tree(X, y, np.ones(4), max_depth=2)
        assert (tree.predict(X) == y).all()
        # one split suffices: children are leaves
        assert tree.root.feature >= 0
        assert tree.root.left.feature == -1

    def test_single_class_leaf(self):
        X = np.array([[1, 2], [3, 4]], dtype=float)
        tree = train_tree(X, np.array([2, 2]), np.ones(2), max_depth=5, n_classes=3)
        assert tree.root.feature == -1
        assert tree.root.prediction == 2

    def test_grid_separable_four_class(self):
        # brute-force separable: thresholds exist at 15 on each feature
        X = np.array(
            [[d, n] for d in (10, 20) for n in (10, 20) for _ in range(5)],
            dtype=float,
        )
        y = np.repeat(np.arange(4), 5)
        tree = train_tree(X, y, np.ones(len(X)), max_depth=3)
        assert (tree.predict(X) == y).all()

    def test_unlimited_depth_memorizes(self):
        rng = np.random.default_rng(0)
        X = rng.integers(0, 50, size=(40, 2)).astype(float)
        X = np.unique(X, axis=0)
        y = rng.integers(0, 3, size=len(X))
        tree = train_tree(X, y, np.ones(len(X)), max_depth=64)
        assert (tree.predict(X) == y).all()


class TestForest:
    def test_deterministic(self):
        X, y = separable_dataset(3, 20)
        cfg = ForestConfig(n_trees=10, seed=7)
        probe = X[::3]
        a = train_forest(X, y, cfg).predict(probe)
        b = train_forest(X, y, cfg).predict(probe)
        assert np.array_equal(a, b)

    def test_single_tree_equals_forest_of_one(self):
        X, y = separable_dataset(2, 15)
        cfg = ForestConfig(n_trees=1, seed=3)
        forest = train_forest(X, y, cfg)
        assert len(forest.trees) == 1
        assert np.array_equal(forest.predict(X), forest.trees[0].predict(X))

    def test_bootstrap_cardinality(self):
        X, y = separable_dataset(2, 15)
        forest = train_forest(X, y, ForestConfig(n_trees=5, seed=1))
        for idx in forest.bootstrap_indices:
            assert len(idx) == len(X)

    def test_oob_accuracy_separable(self):
        X, y = separable_dataset(8, 60)
        forest = train_forest(X, y, ForestConfig(n_trees=30, seed=2))
        assert oob_score(forest, X, y) >= 0.85

    def test_two_classes_required(self):
        X = np.zeros((10, 2))
        with pytest.raises(ValueError):
            train_forest(X, np.zeros(10, dtype=int), ForestConfig())

    def test_vote_tie_breaks_to_smaller_id(self):
        leaf1 = DecisionTree(root=_TreeNode(prediction=1), n_classes=4)
        leaf3 = DecisionTree(root=_TreeNode(prediction=3), n_classes=4)
        forest = RandomForest(trees=[leaf3, leaf1], n_classes=4)
        assert forest.predict_one(np.array([0.0, 0.0])) == 1


class TestSplit:
    def test_seventy_thirty(self):
        X = np.zeros((20, 2))
        y = np.array([0] * 10 + [1] * 10)
        train, test = stratified_split(X, y, 0.7, seed=0)
        assert len(train) == 14 and len(test) == 6
        for c in (0, 1):
            assert (y[train] == c).sum() == 7
            assert (y[test] == c).sum() == 3

    def test_partition(self):
        X = np.zeros((30, 2))
        y = np.repeat([0, 1, 2], 10)
        train, test = stratified_split(X, y, 0.6, seed=4)
        merged = np.sort(np.concatenate([train, test]))
        assert np.array_equal(merged, np.arange(30))

    def test_fraction_one_rejected(self):
        X = np.zeros((10, 2))
        y = np.repeat([0, 1], 5)
        with pytest.raises(ValueError):
            stratified_split(X, y, 1.0, seed=0)

    def test_tiny_class_rejected(self):
        X = np.zeros((3, 2))
        y = np.array([0, 0, 1])
        with pytest.raises(ValueError):
            stratified_split(X, y, 0.7, seed=0)


class TestCrossValidate:
    def test_separable_perfect(self):
        X, y = separable_dataset(4, 30)
        mean, folds = cross_validate(X, y, ForestConfig(n_trees=15, seed=0))
        assert len(folds) == 3
        assert mean == pytest.approx(1.0)

    def test_shuffled_labels_chance_level(self):
        X, _ = separable_dataset(8, 12, seed=1)
        accs = []
        for seed in range(20):
            rng = substream(seed, "label-shuffle")
            y = rng.integers(0, 8, size=len(X))
            if len(np.unique(y)) < 8 or np.bincount(y, minlength=8).min() < 3:
                continue
            cfg = ForestConfig(n_trees=10, seed=seed)
            mean, _ = cross_validate(X, y, cfg)
            accs.append(mean)
        assert len(accs) >= 10
        assert abs(np.mean(accs) - 1 / 8) < 0.05

    def test_class_smaller_than_folds(self):
        X = np.zeros((5, 2))
        y = np.array([0, 0, 0, 1, 1])
        with pytest.raises(ValueError):
            cross_validate(X, y, ForestConfig(cv_folds=3))


class TestConfusion:
    def test_perfect_diagonal(self):
        X, y = separable_dataset(3, 20)
        forest = train_forest(X, y, ForestConfig(n_trees=10, seed=0))
        cm = confusion(forest, X, y, ["a", "b", "c"])
        assert np.array_equal(cm.counts, np.diag(np.bincount(y)))
        assert cm.accuracy == 1.0

    def test_constant_classifier_single_column(self):
        leaf = DecisionTree(root=_TreeNode(prediction=0), n_classes=3)
        forest = RandomForest(trees=[leaf], n_classes=3)
        X = np.zeros((9, 2))
        y = np.repeat([0, 1, 2], 3)
        cm = confusion(forest, X, y, ["a", "b", "c"])
        assert cm.counts[:, 0].sum() == 9
        assert cm.counts[:, 1:].sum() == 0

    def test_row_sums(self):
        X, y = separable_dataset(4, 15)
        forest = train_forest(X, y, ForestConfig(n_trees=5, seed=9))
        cm = confusion(forest, X, y, list("abcd"))
        assert np.array_equal(cm.counts.sum(axis=1), np.bincount(y))

    def test_renders(self):
        cm = ConfusionMatrix(
            counts=np.array([[5, 1], [0, 6]]), labels=["fam1", "fam2"]
        )
        assert "fam1,5,1" in cm.to_csv()
        assert "fam1" in cm.to_heatmap()


class TestTuneDepth:
    def test_prefers_working_depth(self):
        X, y = separable_dataset(3, 24)
        depth, acc = tune_max_depth(
            X, y, ForestConfig(n_trees=5, seed=0), depths=range(1, 6)
        )
        assert acc == pytest.approx(1.0)
        # ties go to the smallest depth reaching the best accuracy
        assert depth == 1


class TestEstimator:
    def test_fit_predict_score(self):
        X, y = separable_dataset(3, 30)
        clf = RandomForestFamilyClassifier(n_trees=10, seed=0)
        clf.fit(X, y)
        assert clf.score(X, y) == pytest.approx(1.0)

    def test_get_set_params(self):
        clf = RandomForestFamilyClassifier()
        assert clf.get_params()["max_depth"] == 11
        clf.set_params(max_depth=5, n_trees=3)
        assert clf.get_params()["max_depth"] == 5
        with pytest.raises(ValueError):
            clf.set_params(bogus=1)

    def test_unfitted_raises(self):
        with pytest.raises(RuntimeError):
            RandomForestFamilyClassifier().predict(np.zeros((1, 2)))
