"""Class-weighted decision trees and random forest over (depth, node_count).

Everything here is written out directly: exhaustive midpoint split search on
the two integer features, weighted Gini impurity, bootstrap resampling per
tree, stratified train/test splitting and k-fold cross-validation. Feature
subsampling per split is deliberately disabled; with only two features it
adds noise without diversity, so tree randomness comes from bootstrapping
alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.utils.validation import check_array

from astembed.rng import substream

__all__ = [
    "ForestConfig",
    "ConfusionMatrix",
    "class_weights",
    "filter_families",
    "train_tree",
    "train_forest",
    "predict",
    "stratified_split",
    "cross_validate",
    "confusion",
    "RandomForest",
    "DecisionTree",
    "RandomForestFamilyClassifier",
]


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int = 11
    min_samples_per_family: int = 41  # families need "more than 40" examples
    train_fraction: float = 0.7
    cv_folds: int = 3
    seed: int = 0

    def validate(self) -> None:
        if self.n_trees < 1 or self.max_depth < 1 or self.cv_folds < 2:
            raise ValueError("invalid forest configuration")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")


@dataclass
class ConfusionMatrix:
    counts: np.ndarray  # (K, K), rows = true class, columns = predicted
    labels: list[str]

    @property
    def accuracy(self) -> float:
        total = int(self.counts.sum())
        return float(np.trace(self.counts)) / total if total else 0.0

    def to_csv(self) -> str:
        lines = ["true\\pred," + ",".join(self.labels)]
        for i, label in enumerate(self.labels):
            lines.append(label + "," + ",".join(str(int(c)) for c in self.counts[i]))
        return "\n".join(lines) + "\n"

    def to_heatmap(self) -> str:
        """Monospaced text heatmap; cell shade scales with the row maximum."""
        shades = " .:-=+*#%@"
        width = max(len(l) for l in self.labels)
        lines = [" " * (width + 1) + " ".join(f"{j:>4d}" for j in range(len(self.labels)))]
        for i, label in enumerate(self.labels):
            row = self.counts[i]
            peak = row.max() if row.max() > 0 else 1
            cells = []
            for c in row:
                shade = shades[min(int(c / peak * (len(shades) - 1)), len(shades) - 1)]
                cells.append(f"{shade * 2}{int(c):>2d}")
            lines.append(f"{label:>{width}} " + " ".join(f"{c:>4s}" for c in cells))
        legend = ", ".join(f"{i}={l}" for i, l in enumerate(self.labels))
        return "\n".join(lines) + "\n" + legend + "\n"


def class_weights(labels: np.ndarray) -> dict[int, float]:
    """Balanced inverse-frequency weights: N / (K * n_c) per class c."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise ValueError("no labels")
    classes, counts = np.unique(labels, return_counts=True)
    N, K = labels.size, classes.size
    return {int(c): N / (K * int(n)) for c, n in zip(classes, counts)}


def filter_families(
    X: np.ndarray, y: np.ndarray, names: list[str], min_count: int
) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Keep classes with at least ``min_count`` samples and relabel densely."""
    X = np.asarray(X)
    y = np.asarray(y)
    classes, counts = np.unique(y, return_counts=True)
    keep = [int(c) for c, n in zip(classes, counts) if n >= min_count]
    if not keep:
        raise ValueError(f"no family has {min_count}+ examples")
    remap = {old: new for new, old in enumerate(keep)}
    mask = np.isin(y, keep)
    new_y = np.array([remap[int(c)] for c in y[mask]], dtype=np.int64)
    return X[mask], new_y, [names[c] for c in keep]


@dataclass
class _TreeNode:
    prediction: int
    feature: int = -1  # -1 marks a leaf
    threshold: float = 0.0
    left: "_TreeNode | None" = None
    right: "_TreeNode | None" = None


@dataclass
class DecisionTree:
    root: _TreeNode
    n_classes: int

    def predict_one(self, x) -> int:
        node = self.root
        while node.feature >= 0:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.prediction

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.array([self.predict_one(row) for row in np.asarray(X)])


def _weighted_gini(weight_per_class: np.ndarray) -> float:
    total = weight_per_class.sum()
    if total <= 0:
        return 0.0
    p = weight_per_class / total
    return float(1.0 - (p * p).sum())


def _majority(weight_per_class: np.ndarray) -> int:
    # argmax takes the smallest index on ties, which is the tie-break rule
    return int(np.argmax(weight_per_class))


def _best_split(X, y, w, n_classes):
    """Exhaustive search over midpoints of consecutive distinct values on
    both features; returns (feature, threshold, decrease) or None."""
    total_w = np.zeros(n_classes)
    np.add.at(total_w, y, w)
    parent = _weighted_gini(total_w)
    total = total_w.sum()
    best = None
    best_decrease = 0.0
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        ys = y[order]
        ws = w[order]
        left_w = np.zeros(n_classes)
        cum = 0.0
        for i in range(len(xs) - 1):
            left_w[ys[i]] += ws[i]
            cum += ws[i]
            if xs[i] == xs[i + 1]:
                continue
            right_w = total_w - left_w
            child = (cum / total) * _weighted_gini(left_w) + (
                (total - cum) / total
            ) * _weighted_gini(right_w)
            decrease = parent - child
            if decrease > best_decrease + 1e-15:
                best_decrease = decrease
                best = (f, (xs[i] + xs[i + 1]) / 2.0, decrease)
    return best


def _grow(X, y, w, n_classes, depth, max_depth) -> _TreeNode:
    weight_per_class = np.zeros(n_classes)
    np.add.at(weight_per_class, y, w)
    node = _TreeNode(prediction=_majority(weight_per_class))
    if depth >= max_depth or len(np.unique(y)) <= 1:
        return node
    split = _best_split(X, y, w, n_classes)
    if split is None:
        return node
    f, thr, _ = split
    mask = X[:, f] <= thr
    node.feature = f
    node.threshold = thr
    node.left = _grow(X[mask], y[mask], w[mask], n_classes, depth + 1, max_depth)
    node.right = _grow(X[~mask], y[~mask], w[~mask], n_classes, depth + 1, max_depth)
    return node


def train_tree(
    X: np.ndarray,
    y: np.ndarray,
    sample_weights: np.ndarray,
    max_depth: int,
    n_classes: int | None = None,
) -> DecisionTree:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(X) == 0:
        raise ValueError("no samples")
    if n_classes is None:
        n_classes = int(y.max()) + 1
    root = _grow(X, y, np.asarray(sample_weights, dtype=np.float64),
                 n_classes, 0, max_depth)
    return DecisionTree(root=root, n_classes=n_classes)


@dataclass
class RandomForest:
    trees: list[DecisionTree]
    n_classes: int
    labels: list[str] = field(default_factory=list)
    # per-tree bootstrap sample indices; kept for out-of-bag scoring only
    bootstrap_indices: list[np.ndarray] | None = None

    def predict_one(self, x) -> int:
        votes = np.zeros(self.n_classes, dtype=np.int64)
        for tree in self.trees:
            votes[tree.predict_one(x)] += 1
        return int(np.argmax(votes))  # smallest class id wins ties

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.array([self.predict_one(row) for row in np.asarray(X)])


def train_forest(
    X: np.ndarray,
    y: np.ndarray,
    config: ForestConfig,
    labels: list[str] | None = None,
    bootstrap: bool = True,
) -> RandomForest:
    """Bootstrap-aggregated class-weighted trees; class weights come from the
    full training set, not the per-tree resample."""
    config.validate()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    classes = np.unique(y)
    if classes.size < 2:
        raise ValueError("need at least 2 classes")
    n_classes = int(y.max()) + 1
    weights = class_weights(y)
    w = np.array([weights[int(c)] for c in y])
    rng = substream(config.seed, "forest")
    trees = []
    indices = []
    for _ in range(config.n_trees):
        if bootstrap:
            idx = rng.integers(0, len(X), size=len(X))
        else:
            idx = np.arange(len(X))
        indices.append(idx)
        trees.append(
            train_tree(X[idx], y[idx], w[idx], config.max_depth, n_classes)
        )
    return RandomForest(
        trees=trees, n_classes=n_classes, labels=labels or [],
        bootstrap_indices=indices,
    )


def oob_score(forest: RandomForest, X: np.ndarray, y: np.ndarray) -> float:
    """Out-of-bag accuracy: each sample voted on only by trees whose
    bootstrap missed it."""
    if forest.bootstrap_indices is None:
        raise ValueError("forest was trained without recorded bootstraps")
    X = np.asarray(X)
    y = np.asarray(y, dtype=np.int64)
    votes = np.zeros((len(X), forest.n_classes), dtype=np.int64)
    for tree, idx in zip(forest.trees, forest.bootstrap_indices):
        in_bag = np.zeros(len(X), dtype=bool)
        in_bag[idx] = True
        for i in np.flatnonzero(~in_bag):
            votes[i, tree.predict_one(X[i])] += 1
    scored = votes.sum(axis=1) > 0
    pred = np.argmax(votes[scored], axis=1)
    return float((pred == y[scored]).mean())


def predict(forest: RandomForest, X: np.ndarray) -> np.ndarray:
    return forest.predict(X)


def stratified_split(
    X: np.ndarray, y: np.ndarray, train_fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-class proportional split; returns (train_idx, test_idx).

    The per-class train count rounds half-up and is clamped so every class
    keeps at least one sample on each side.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1) exclusive")
    y = np.asarray(y)
    rng = substream(seed, "split")
    train_idx: list[int] = []
    test_idx: list[int] = []
    for c in np.unique(y):
        members = np.flatnonzero(y == c)
        if members.size < 2:
            raise ValueError(f"class {c} has fewer than 2 samples")
        members = members[rng.permutation(members.size)]
        n_train = int(np.floor(members.size * train_fraction + 0.5))
        n_train = min(max(n_train, 1), members.size - 1)
        train_idx.extend(members[:n_train])
        test_idx.extend(members[n_train:])
    return np.sort(np.array(train_idx)), np.sort(np.array(test_idx))


def _fold_assignment(y: np.ndarray, folds: int, seed: int) -> np.ndarray:
    """Stratified fold ids: per class, shuffled then dealt round-robin."""
    y = np.asarray(y)
    out = np.empty(len(y), dtype=np.int64)
    rng = substream(seed, "folds")
    for c in np.unique(y):
        members = np.flatnonzero(y == c)
        if members.size < folds:
            raise ValueError(f"class {c} has fewer than {folds} samples")
        members = members[rng.permutation(members.size)]
        out[members] = np.arange(members.size) % folds
    return out


def cross_validate(
    X: np.ndarray, y: np.ndarray, config: ForestConfig
) -> tuple[float, list[float]]:
    """Stratified k-fold CV accuracy: (mean, per-fold)."""
    config.validate()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    fold_of = _fold_assignment(y, config.cv_folds, config.seed)
    accs = []
    for fold in range(config.cv_folds):
        test = fold_of == fold
        forest = train_forest(X[~test], y[~test], config)
        pred = forest.predict(X[test])
        accs.append(float((pred == y[test]).mean()))
    return float(np.mean(accs)), accs


def confusion(
    forest: RandomForest, X: np.ndarray, y: np.ndarray, labels: list[str]
) -> ConfusionMatrix:
    X = np.asarray(X)
    y = np.asarray(y, dtype=np.int64)
    if len(X) == 0:
        raise ValueError("empty test set")
    K = len(labels)
    counts = np.zeros((K, K), dtype=np.int64)
    for true, pred in zip(y, forest.predict(X)):
        counts[true, pred] += 1
    return ConfusionMatrix(counts=counts, labels=labels)


def tune_max_depth(
    X: np.ndarray, y: np.ndarray, config: ForestConfig, depths=range(1, 21)
) -> tuple[int, float]:
    """Grid search on max depth by CV accuracy; ties go to the smaller depth."""
    best_depth, best_acc = None, -1.0
    for depth in depths:
        cfg = ForestConfig(
            n_trees=config.n_trees, max_depth=depth,
            min_samples_per_family=config.min_samples_per_family,
            train_fraction=config.train_fraction,
            cv_folds=config.cv_folds, seed=config.seed,
        )
        mean, _ = cross_validate(X, y, cfg)
        if mean > best_acc + 1e-12:
            best_depth, best_acc = depth, mean
    return best_depth, best_acc


class RandomForestFamilyClassifier:
    """sklearn-style estimator facade over the from-scratch forest."""

    def __init__(
        self,
        n_trees: int = 100,
        max_depth: int = 11,
        min_samples_per_family: int = 41,
        train_fraction: float = 0.7,
        cv_folds: int = 3,
        seed: int = 0,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_per_family = min_samples_per_family
        self.train_fraction = train_fraction
        self.cv_folds = cv_folds
        self.seed = seed

    def get_params(self, deep: bool = True) -> dict:
        return {
            name: getattr(self, name)
            for name in (
                "n_trees", "max_depth", "min_samples_per_family",
                "train_fraction", "cv_folds", "seed",
            )
        }

    def set_params(self, **params) -> "RandomForestFamilyClassifier":
        for name, value in params.items():
            if name not in self.get_params():
                raise ValueError(f"unknown parameter {name!r}")
            setattr(self, name, value)
        return self

    def _config(self) -> ForestConfig:
        return ForestConfig(
            n_trees=self.n_trees, max_depth=self.max_depth,
            min_samples_per_family=self.min_samples_per_family,
            train_fraction=self.train_fraction, cv_folds=self.cv_folds,
            seed=self.seed,
        )

    def fit(self, X, y, labels: list[str] | None = None):
        X = check_array(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        self.forest_ = train_forest(X, y, self._config(), labels=labels)
        self.classes_ = np.unique(y)
        return self

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "forest_"):
            raise RuntimeError("estimator is not fitted")
        X = check_array(X, dtype=np.float64)
        return self.forest_.predict(X)

    def score(self, X, y) -> float:
        return float((self.predict(X) == np.asarray(y)).mean())
