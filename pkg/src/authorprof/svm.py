"""L2-regularized linear SVM trained by dual coordinate descent.

The bias is learned as the weight of an extra constant feature of value 1,
so it is regularized together with ``w``. For the hinge loss the dual box is
``0 <= alpha_i <= C``; for the squared hinge ``alpha_i >= 0`` and the Hessian
diagonal gains ``1 / (2C)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .features import SparseVector, to_csr

logger = logging.getLogger(__name__)

LOSSES = ("hinge", "squared_hinge")


@dataclass(frozen=True)
class SvmConfig:
    C: float = 1.0
    loss: str = "squared_hinge"
    tol: float = 1e-4
    max_passes: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.C > 0:
            raise ValueError("C must be positive")
        if self.loss not in LOSSES:
            raise ValueError(f"unknown loss {self.loss!r}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_passes < 1:
            raise ValueError("max_passes must be >= 1")


@dataclass
class DualSolution:
    w: np.ndarray
    b: float
    alpha: np.ndarray
    passes: int
    converged: bool


@dataclass
class LinearModel:
    """One-vs-rest weights. Two-class models hold a single row for classes[1]."""

    classes: list[str]
    weights: np.ndarray
    intercepts: np.ndarray
    config: SvmConfig

    @property
    def is_binary(self) -> bool:
        return len(self.classes) == 2

    @property
    def dim(self) -> int:
        return self.weights.shape[1]


def _as_csr(X) -> sp.csr_matrix:
    if sp.issparse(X):
        return sp.csr_matrix(X)
    if isinstance(X, np.ndarray):
        return sp.csr_matrix(X)
    return to_csr(list(X))


def solve_dual(
    X,
    y: Sequence[int],
    config: SvmConfig,
    callback: Callable[[np.ndarray, np.ndarray, float], None] | None = None,
) -> DualSolution:
    """Run dual coordinate descent on one binary problem.

    ``callback(alpha, w, b)`` is invoked after every coordinate step with
    live arrays; copy them if they must be kept.
    """
    X = _as_csr(X)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    if len(y) != n:
        raise ValueError(f"{n} examples but {len(y)} labels")
    if n < 2:
        raise ValueError("need at least two examples")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if np.all(y == y[0]):
        raise ValueError("degenerate single-class problem")

    if config.loss == "hinge":
        upper, diag = config.C, 0.0
    else:
        upper, diag = np.inf, 0.5 / config.C

    indptr, indices, data = X.indptr, X.indices, X.data
    sq_norms = np.asarray(X.multiply(X).sum(axis=1)).ravel()
    qdiag = sq_norms + 1.0 + diag  # +1 for the bias feature
    alpha = np.zeros(n)
    w = np.zeros(d)
    b = 0.0
    rng = np.random.default_rng(config.seed)
    order = np.arange(n)

    converged = False
    passes = 0
    for passes in range(1, config.max_passes + 1):
        rng.shuffle(order)
        max_violation = 0.0
        for i in order:
            lo, hi = indptr[i], indptr[i + 1]
            idx, val = indices[lo:hi], data[lo:hi]
            yi = y[i]
            ai = alpha[i]
            g = yi * (float(w[idx] @ val) + b) - 1.0 + diag * ai
            if ai == 0.0:
                pg = min(g, 0.0)
            elif ai >= upper:
                pg = max(g, 0.0)
            else:
                pg = g
            max_violation = max(max_violation, abs(pg))
            if pg != 0.0:
                new = min(max(ai - g / qdiag[i], 0.0), upper)
                step = (new - ai) * yi
                alpha[i] = new
                w[idx] += step * val
                b += step
            if callback is not None:
                callback(alpha, w, b)
        if max_violation < config.tol:
            converged = True
            break
    if not converged:
        logger.warning("dual coordinate descent stopped after %d passes without converging", passes)
    return DualSolution(w, b, alpha, passes, converged)


def train_binary(X, y: Sequence[int], config: SvmConfig) -> tuple[np.ndarray, float]:
    sol = solve_dual(X, y, config)
    return sol.w, sol.b


def dual_objective(X, y: Sequence[int], alpha: np.ndarray, config: SvmConfig) -> float:
    """Dual value ``sum(a) - |sum a_i y_i x~_i|^2 / 2 - diag * |a|^2 / 2``, computed from scratch."""
    X = _as_csr(X)
    y = np.asarray(y, dtype=np.float64)
    coef = alpha * y
    w = X.T @ coef
    b = coef.sum()
    diag = 0.0 if config.loss == "hinge" else 0.5 / config.C
    return float(alpha.sum() - 0.5 * (w @ w + b * b) - 0.5 * diag * (alpha @ alpha))


def train_ovr(X, labels: Sequence[str], config: SvmConfig) -> LinearModel:
    X = _as_csr(X)
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise ValueError("need at least two distinct labels")
    labels = np.asarray(labels, dtype=object)
    positives = classes[1:] if len(classes) == 2 else classes
    weights = np.zeros((len(positives), X.shape[1]))
    intercepts = np.zeros(len(positives))
    for k, cls in enumerate(positives):
        y = np.where(labels == cls, 1, -1)
        weights[k], intercepts[k] = train_binary(X, y, config)
    return LinearModel(classes, weights, intercepts, config)


def decision_function(model: LinearModel, X) -> np.ndarray:
    """Scores of shape ``(n, K)``, or ``(n,)`` for two-class models."""
    X = _as_csr(X)
    if X.shape[1] != model.dim:
        raise ValueError(f"dimension mismatch: {X.shape[1]} != {model.dim}")
    scores = np.asarray(X @ model.weights.T) + model.intercepts
    return scores[:, 0] if model.is_binary else scores


def decision(model: LinearModel, x: SparseVector) -> np.ndarray | float:
    if x.dim != model.dim:
        raise ValueError(f"dimension mismatch: {x.dim} != {model.dim}")
    scores = model.weights[:, x.indices] @ x.values + model.intercepts
    return float(scores[0]) if model.is_binary else scores


def _label_from_scores(model: LinearModel, scores) -> str:
    if model.is_binary:
        return model.classes[1] if scores > 0 else model.classes[0]
    # argmax returns the first maximum, i.e. the smallest label on ties
    return model.classes[int(np.argmax(scores))]


def predict(model: LinearModel, x: SparseVector) -> str:
    return _label_from_scores(model, decision(model, x))


def predict_many(model: LinearModel, X) -> list[str]:
    return [_label_from_scores(model, s) for s in decision_function(model, X)]
