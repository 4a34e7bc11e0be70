"""CART-style decision trees and a bagged random forest.

Splits are axis-aligned, chosen to maximize Gini impurity decrease over
candidate thresholds (midpoints of consecutive distinct sorted values)
among a per-node sampled feature subset. Tie-breaks are deterministic:
equal-gain splits go to the lowest feature index, then lowest threshold;
vote ties in the forest go to the lowest class ordinal.

Feature importance is mean decrease in impurity: each tree's per-feature
weighted impurity decreases are normalized to sum 1, averaged over the
ensemble, and renormalized.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ..errors import InvalidParameterError, LearningError

log = logging.getLogger(__name__)

_MIN_GAIN = 1e-12


@dataclass(frozen=True)
class RandomForestParams:
    """Forest hyperparameters; the sweep grids (estimators 1-500, depth 1-15)
    are all representable."""

    n_estimators: int = 100
    max_depth: int = 10
    features_per_split: Union[int, str] = "sqrt"
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_estimators < 1:
            raise InvalidParameterError(f"n_estimators must be >= 1, got {self.n_estimators}")
        if self.max_depth < 1:
            raise InvalidParameterError(f"max_depth must be >= 1, got {self.max_depth}")
        if isinstance(self.features_per_split, str):
            if self.features_per_split != "sqrt":
                raise InvalidParameterError(
                    f'features_per_split must be a count or "sqrt", got {self.features_per_split!r}'
                )
        elif self.features_per_split < 1:
            raise InvalidParameterError(
                f"features_per_split must be >= 1, got {self.features_per_split}"
            )


class DecisionTree:
    """Fitted binary decision tree stored as parallel node arrays.

    ``feature[i] == -1`` marks a leaf; internal nodes send samples with
    value <= threshold to the left child. Leaves (and internal nodes) store
    per-class training counts.
    """

    def __init__(self, feature, threshold, left, right, class_counts, classes, importance_raw):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.class_counts = class_counts
        self.classes = classes
        self.importance_raw = importance_raw

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by each row."""
        X = np.asarray(X, dtype=np.float64)
        node = np.zeros(len(X), dtype=np.int32)
        while True:
            feats = self.feature[node]
            active = np.nonzero(feats >= 0)[0]
            if active.size == 0:
                return node
            cur = node[active]
            x = X[active, self.feature[cur]]
            go_left = x <= self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Majority label of the reached leaf (ties to the lowest class ordinal)."""
        leaves = self.apply(X)
        return self.classes[np.argmax(self.class_counts[leaves], axis=1)]


def _resolve_features_per_split(spec: Union[int, str], n_features: int) -> int:
    if spec == "sqrt":
        return max(1, int(np.sqrt(n_features)))
    return min(int(spec), n_features)


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: int,
    features_per_split: Union[int, str] = "sqrt",
    rng: Optional[np.random.Generator] = None,
    classes: Optional[np.ndarray] = None,
) -> DecisionTree:
    """Grow a tree by greedy Gini-decrease split search.

    ``rng`` drives the per-node feature subsampling; ``classes`` fixes the
    label universe (a bootstrap resample may miss a class but votes must
    stay aligned across a forest).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or len(X) == 0:
        raise LearningError("training set must be a non-empty 2-D matrix")
    if len(X) != len(y):
        raise LearningError(f"got {len(X)} rows but {len(y)} labels")
    if max_depth < 1:
        raise InvalidParameterError(f"max_depth must be >= 1, got {max_depth}")
    if rng is None:
        rng = np.random.default_rng(0)
    if classes is None:
        classes = np.unique(y)
    k = len(classes)
    y_idx = np.searchsorted(classes, y).astype(np.int64)
    n_total, n_features = X.shape
    m = _resolve_features_per_split(features_per_split, n_features)
    eye = np.eye(k, dtype=np.float64)

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    counts: list[np.ndarray] = []
    importance_raw = np.zeros(n_features, dtype=np.float64)

    # (sample indices, depth, parent node id, is_left_child)
    stack: list[tuple[np.ndarray, int, int, bool]] = [
        (np.arange(n_total, dtype=np.intp), 0, -1, False)
    ]
    while stack:
        idx, depth, parent, is_left = stack.pop()
        node_id = len(feature)
        if parent >= 0:
            if is_left:
                left[parent] = node_id
            else:
                right[parent] = node_id

        yn = y_idx[idx]
        node_counts = np.bincount(yn, minlength=k).astype(np.float64)
        n = len(idx)
        gini_node = 1.0 - float(((node_counts / n) ** 2).sum())

        best = None  # (gain, feature, threshold)
        if depth < max_depth and gini_node > 0.0 and n >= 2:
            if m < n_features:
                feats = np.sort(rng.choice(n_features, size=m, replace=False))
            else:
                feats = np.arange(n_features)
            oh = eye[yn]
            for j in feats:
                xs = X[idx, j]
                order = np.argsort(xs, kind="stable")
                xs_s = xs[order]
                valid = xs_s[1:] > xs_s[:-1]
                if not valid.any():
                    continue
                cum = np.cumsum(oh[order], axis=0)
                nl = np.arange(1, n, dtype=np.float64)
                nr = n - nl
                left_counts = cum[:-1]
                right_counts = node_counts - left_counts
                gl = 1.0 - ((left_counts / nl[:, None]) ** 2).sum(axis=1)
                gr = 1.0 - ((right_counts / nr[:, None]) ** 2).sum(axis=1)
                weighted = np.where(valid, (nl * gl + nr * gr) / n, np.inf)
                pos = int(np.argmin(weighted))
                gain = gini_node - float(weighted[pos])
                if gain > _MIN_GAIN and (best is None or gain > best[0]):
                    t = 0.5 * (xs_s[pos] + xs_s[pos + 1])
                    if t >= xs_s[pos + 1]:  # midpoint rounded up between adjacent floats
                        t = xs_s[pos]
                    best = (gain, int(j), float(t))

        if best is None:
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            counts.append(node_counts)
            continue

        gain, j, t = best
        importance_raw[j] += (n / n_total) * gain
        feature.append(j)
        threshold.append(t)
        left.append(-1)
        right.append(-1)
        counts.append(node_counts)

        go_left = X[idx, j] <= t
        # push right first so the left child is built (and numbered) first
        stack.append((idx[~go_left], depth + 1, node_id, False))
        stack.append((idx[go_left], depth + 1, node_id, True))

    return DecisionTree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        class_counts=np.asarray(counts, dtype=np.float64),
        classes=classes,
        importance_raw=importance_raw,
    )


class RandomForestModel:
    """Bagged ensemble of decision trees with majority voting."""

    def __init__(self, params: RandomForestParams, trees: Sequence[DecisionTree],
                 classes: np.ndarray, importances: np.ndarray):
        self.params = params
        self.trees = list(trees)
        self.classes = classes
        self.importances = importances

    def tree_votes(self, X: np.ndarray) -> np.ndarray:
        """Per-tree predicted labels, shape (n_trees, n_samples)."""
        return np.stack([t.predict(X) for t in self.trees])

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if len(X) == 0:
            return np.empty(0, dtype=self.classes.dtype)
        k = len(self.classes)
        tally = np.zeros((len(X), k), dtype=np.int64)
        rows = np.arange(len(X))
        for tree in self.trees:
            leaf = tree.apply(X)
            tally[rows, np.argmax(tree.class_counts[leaf], axis=1)] += 1
        return self.classes[np.argmax(tally, axis=1)]


def fit_forest(X: np.ndarray, y: np.ndarray, params: RandomForestParams,
               n_threads: int = 1) -> RandomForestModel:
    """Fit ``n_estimators`` trees on bootstrap resamples.

    Each tree consumes an independent RNG stream spawned from the seed, so
    the assembled forest is identical whether trees are fit sequentially or
    across threads.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or len(X) == 0:
        raise LearningError("training set must be a non-empty 2-D matrix")
    if len(X) != len(y):
        raise LearningError(f"got {len(X)} rows but {len(y)} labels")
    classes = np.unique(y)
    if len(classes) < 2:
        log.warning("forest trained on a single class; it will predict that class everywhere")

    n = len(X)
    streams = np.random.SeedSequence(params.seed).spawn(params.n_estimators)

    def build(i: int) -> DecisionTree:
        rng = np.random.default_rng(streams[i])
        if params.bootstrap:
            idx = rng.integers(0, n, size=n)
            Xi, yi = X[idx], y[idx]
        else:
            Xi, yi = X, y
        return fit_tree(Xi, yi, params.max_depth, params.features_per_split,
                        rng=rng, classes=classes)

    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            trees = list(pool.map(build, range(params.n_estimators)))
    else:
        trees = [build(i) for i in range(params.n_estimators)]

    per_tree = np.zeros((params.n_estimators, X.shape[1]))
    for i, tree in enumerate(trees):
        total = tree.importance_raw.sum()
        if total > 0:
            per_tree[i] = tree.importance_raw / total
    importances = per_tree.mean(axis=0)
    total = importances.sum()
    if total > 0:
        importances = importances / total
    return RandomForestModel(params=params, trees=trees, classes=classes, importances=importances)
