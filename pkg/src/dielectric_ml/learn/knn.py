"""K-nearest-neighbor classifier with selectable distance metrics.

Fitting just stores the (standardized) training matrix. Prediction is a
majority vote over the k nearest rows; distance ties resolve to the lower
training index, vote ties to the class of the nearest neighbor among the
tied classes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameterError, LearningError

METRICS = ("euclidean", "manhattan", "minkowski")


@dataclass(frozen=True)
class KnnParams:
    k: int
    metric: str = "euclidean"
    p: float = 2.0

    def __post_init__(self):
        if self.k < 1:
            raise InvalidParameterError(f"k must be >= 1, got {self.k}")
        if self.metric not in METRICS:
            raise InvalidParameterError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if self.metric == "minkowski" and not self.p > 0:
            raise InvalidParameterError(f"minkowski order p must be > 0, got {self.p}")


def _distances(train: np.ndarray, queries: np.ndarray, params: KnnParams) -> np.ndarray:
    """Pairwise distances, shape (n_queries, n_train)."""
    diff = queries[:, None, :] - train[None, :, :]
    if params.metric == "euclidean":
        return np.sqrt((diff ** 2).sum(axis=2))
    if params.metric == "manhattan":
        return np.abs(diff).sum(axis=2)
    return (np.abs(diff) ** params.p).sum(axis=2) ** (1.0 / params.p)


class KnnModel:
    def __init__(self, params: KnnParams, train: np.ndarray, labels: np.ndarray):
        self.params = params
        self.train = train
        self.labels = labels
        self.classes = np.unique(labels)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if len(X) == 0:
            return np.empty(0, dtype=self.labels.dtype)
        if X.ndim != 2 or X.shape[1] != self.train.shape[1]:
            raise LearningError(
                f"query matrix has {X.shape[1] if X.ndim == 2 else '?'} columns, "
                f"model was fitted with {self.train.shape[1]}"
            )
        dist = _distances(self.train, X, self.params)
        # stable sort: equidistant neighbors keep training order (lower index wins)
        order = np.argsort(dist, axis=1, kind="stable")[:, : self.params.k]
        out = np.empty(len(X), dtype=self.labels.dtype)
        for i, neighbors in enumerate(order):
            votes = self.labels[neighbors]
            values, counts = np.unique(votes, return_counts=True)
            top = counts.max()
            tied = set(values[counts == top])
            if len(tied) == 1:
                out[i] = next(iter(tied))
            else:
                # nearest neighbor belonging to a tied class decides
                for lbl in votes:
                    if lbl in tied:
                        out[i] = lbl
                        break
        return out


def fit_knn(X: np.ndarray, y: np.ndarray, params: KnnParams) -> KnnModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or len(X) == 0:
        raise LearningError("training set must be a non-empty 2-D matrix")
    if len(X) != len(y):
        raise LearningError(f"got {len(X)} rows but {len(y)} labels")
    if params.k > len(X):
        raise LearningError(f"k={params.k} exceeds training size {len(X)}")
    return KnnModel(params=params, train=X.copy(), labels=y.copy())
