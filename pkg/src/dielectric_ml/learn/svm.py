"""Soft-margin kernel SVM trained by sequential pair optimization.

Each one-vs-rest binary problem maximizes the dual objective

    W(a) = sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij,   0 <= a_i <= C

by repeatedly picking a KKT-violating index i and pairing it with the
index j maximizing |E_i - E_j| (deterministic second-choice heuristic, so
no RNG is involved), then solving the two-variable subproblem analytically.
Every committed step increases W, so the objective is non-decreasing across
passes. A pass with no updates means all KKT conditions hold within the
tolerance and the solver reports convergence; hitting the iteration cap is
a valid outcome and is flagged, not raised.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..errors import InvalidParameterError, LearningError

KERNELS = ("linear", "rbf", "poly", "sigmoid")

CONVERGED = "converged"
ITERATION_CAPPED = "iteration_capped"


@dataclass(frozen=True)
class SvmParams:
    c: float = 1.0
    kernel: str = "rbf"
    gamma: Union[float, str] = "scale"
    degree: int = 3
    coef0: float = 0.0
    max_iterations: int = 1000
    tolerance: float = 1e-3

    def __post_init__(self):
        if not self.c > 0:
            raise InvalidParameterError(f"regularization c must be > 0, got {self.c}")
        if self.kernel not in KERNELS:
            raise InvalidParameterError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")
        if self.gamma != "scale" and not (isinstance(self.gamma, (int, float)) and self.gamma > 0):
            raise InvalidParameterError(f'gamma must be "scale" or > 0, got {self.gamma!r}')
        if self.degree < 1:
            raise InvalidParameterError(f"degree must be >= 1, got {self.degree}")
        if self.max_iterations < 1:
            raise InvalidParameterError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not self.tolerance > 0:
            raise InvalidParameterError(f"tolerance must be > 0, got {self.tolerance}")


def kernel_matrix(a: np.ndarray, b: np.ndarray, kernel: str, gamma: float,
                  degree: int, coef0: float) -> np.ndarray:
    """Gram matrix K[i, j] = k(a_i, b_j)."""
    if kernel == "rbf":
        sq = (a ** 2).sum(1)[:, None] + (b ** 2).sum(1)[None, :] - 2.0 * (a @ b.T)
        return np.exp(-gamma * np.maximum(sq, 0.0))
    dot = a @ b.T
    if kernel == "linear":
        return dot
    if kernel == "poly":
        return (gamma * dot + coef0) ** degree
    return np.tanh(gamma * dot + coef0)


@dataclass
class BinarySvm:
    """Fitted one-vs-rest sub-classifier for a single positive class."""

    positive_class: int
    dual_coef: np.ndarray       # alpha_i * y_i over support vectors
    support_vectors: np.ndarray
    bias: float
    status: str
    passes: int
    alpha_history: Optional[list] = None  # [(alpha snapshot, bias)] when recorded


def _solve_binary(K: np.ndarray, y: np.ndarray, c: float, tol: float,
                  max_iterations: int, record_history: bool):
    n = len(y)
    alpha = np.zeros(n)
    b = 0.0
    f = np.zeros(n)  # sum_k alpha_k y_k K[k, i], bias excluded
    history = [(alpha.copy(), b)] if record_history else None
    status = ITERATION_CAPPED
    passes = 0

    for _ in range(max_iterations):
        passes += 1
        changed = 0
        for i in range(n):
            e_i = f[i] + b - y[i]
            r_i = e_i * y[i]
            if not ((r_i < -tol and alpha[i] < c) or (r_i > tol and alpha[i] > 0)):
                continue
            errors = f + b - y
            gaps = np.abs(e_i - errors)
            gaps[i] = -1.0
            j = int(np.argmax(gaps))
            if j == i:
                continue
            a_i_old, a_j_old = alpha[i], alpha[j]
            if y[i] != y[j]:
                lo, hi = max(0.0, a_j_old - a_i_old), min(c, c + a_j_old - a_i_old)
            else:
                lo, hi = max(0.0, a_i_old + a_j_old - c), min(c, a_i_old + a_j_old)
            if lo >= hi:
                continue
            eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
            if eta >= 0:
                continue
            e_j = errors[j]
            a_j = np.clip(a_j_old - y[j] * (e_i - e_j) / eta, lo, hi)
            if abs(a_j - a_j_old) < 1e-12:
                continue
            a_i = a_i_old + y[i] * y[j] * (a_j_old - a_j)
            b1 = b - e_i - y[i] * (a_i - a_i_old) * K[i, i] - y[j] * (a_j - a_j_old) * K[i, j]
            b2 = b - e_j - y[i] * (a_i - a_i_old) * K[i, j] - y[j] * (a_j - a_j_old) * K[j, j]
            if 0 < a_i < c:
                b = b1
            elif 0 < a_j < c:
                b = b2
            else:
                b = 0.5 * (b1 + b2)
            f = f + (a_i - a_i_old) * y[i] * K[i] + (a_j - a_j_old) * y[j] * K[j]
            alpha[i], alpha[j] = a_i, a_j
            changed += 1
        if record_history:
            history.append((alpha.copy(), b))
        if changed == 0:
            status = CONVERGED
            break

    return alpha, b, status, passes, history


class SvmModel:
    """One-vs-rest multiclass SVM; prediction is the argmax decision value,
    ties resolving to the lowest class ordinal."""

    def __init__(self, params: SvmParams, gamma_value: float, classes: np.ndarray,
                 binaries: list[BinarySvm], n_features: int):
        self.params = params
        self.gamma_value = gamma_value
        self.classes = classes
        self.binaries = binaries
        self.n_features = n_features

    @property
    def status(self) -> str:
        return CONVERGED if all(m.status == CONVERGED for m in self.binaries) else ITERATION_CAPPED

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise LearningError(
                f"query matrix has {X.shape[1] if X.ndim == 2 else '?'} columns, "
                f"model was fitted with {self.n_features}"
            )
        scores = np.empty((len(X), len(self.binaries)))
        for c_ix, m in enumerate(self.binaries):
            if len(m.support_vectors):
                k = kernel_matrix(X, m.support_vectors, self.params.kernel,
                                  self.gamma_value, self.params.degree, self.params.coef0)
                scores[:, c_ix] = k @ m.dual_coef + m.bias
            else:
                scores[:, c_ix] = m.bias
        return scores

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if len(X) == 0:
            return np.empty(0, dtype=self.classes.dtype)
        return self.classes[np.argmax(self.decision_function(X), axis=1)]


def _looks_standardized(X: np.ndarray) -> bool:
    mean = np.abs(X.mean(axis=0)).max()
    std = X.std(axis=0)
    return mean <= 1.5 and std.max() <= 5.0 and std.min() >= 0.05


def fit_svm(X: np.ndarray, y: np.ndarray, params: SvmParams,
            record_history: bool = False) -> SvmModel:
    """Train one binary sub-problem per class (one-vs-rest).

    ``record_history`` keeps per-pass (alpha, bias) snapshots on each
    binary classifier so the dual objective trajectory can be audited.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or len(X) == 0:
        raise LearningError("training set must be a non-empty 2-D matrix")
    if len(X) != len(y):
        raise LearningError(f"got {len(X)} rows but {len(y)} labels")
    classes = np.unique(y)
    if len(classes) < 2:
        raise LearningError("SVM training needs at least 2 classes")
    if not _looks_standardized(X):
        warnings.warn(
            "SVM training data does not look standardized; kernel numerics degrade "
            "on unscaled features",
            UserWarning,
            stacklevel=2,
        )

    if params.gamma == "scale":
        var = float(X.var())
        gamma_value = 1.0 / (X.shape[1] * var) if var > 0 else 1.0
    else:
        gamma_value = float(params.gamma)

    K = kernel_matrix(X, X, params.kernel, gamma_value, params.degree, params.coef0)
    binaries = []
    for cls in classes:
        targets = np.where(y == cls, 1.0, -1.0)
        alpha, b, status, passes, history = _solve_binary(
            K, targets, params.c, params.tolerance, params.max_iterations, record_history
        )
        support = alpha > 0
        binaries.append(BinarySvm(
            positive_class=int(cls),
            dual_coef=(alpha * targets)[support],
            support_vectors=X[support].copy(),
            bias=float(b),
            status=status,
            passes=passes,
            alpha_history=history,
        ))
    return SvmModel(params=params, gamma_value=gamma_value, classes=classes,
                    binaries=binaries, n_features=X.shape[1])
