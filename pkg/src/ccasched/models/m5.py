"""M5 model tree: SDR splits, linear models at nodes, pruning and smoothing."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from ..errors import ValidationError
from .linear import LinearModel, ols
from .trees import SD_REDUCTION, TreeNode, grow_tree

# error multiplier when a node has no more rows than model parameters
SMALL_NODE_PENALTY = 10.0


@dataclass(frozen=True)
class M5Params:
    min_leaf: int = 4
    sd_stop_fraction: float = 0.05
    smoothing_k: float = 15.0
    prune: bool = True

    def __post_init__(self):
        if self.min_leaf < 1:
            raise ValidationError("min_leaf must be >= 1")
        if not 0 <= self.sd_stop_fraction < 1:
            raise ValidationError("sd_stop_fraction must be in [0, 1)")
        if self.smoothing_k < 0:
            raise ValidationError("smoothing_k must be >= 0")


def adjusted_error(model: LinearModel, X: np.ndarray, y: np.ndarray) -> float:
    """Mean absolute residual inflated by (n + v) / (n - v) for v parameters."""
    n, v = len(y), model.n_params
    mae = float(np.mean(np.abs(y - model.predict(X)))) if n else 0.0
    factor = (n + v) / (n - v) if n > v else SMALL_NODE_PENALTY
    return mae * factor


def fit_node_model(X: np.ndarray, y: np.ndarray, candidates: list[int]) -> LinearModel:
    """OLS on the candidate attributes, then greedy backward elimination.

    An attribute is dropped whenever that does not raise the adjusted error.
    """
    attrs = tuple(a for a in candidates if np.ptp(X[:, a]) > 0)
    model = ols(X, y, attrs)
    err = adjusted_error(model, X, y)
    while model.attrs:
        best, best_err = None, np.inf
        for a in model.attrs:
            trial = ols(X, y, tuple(b for b in model.attrs if b != a))
            e = adjusted_error(trial, X, y)
            if e < best_err:
                best, best_err = trial, e
        if best_err > err:
            break
        model, err = best, best_err
    return model


@dataclass
class M5ModelTree:
    root: TreeNode
    smoothing_k: float = 15.0

    tag = "m5"

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return self._predict(self.root, X)

    def _predict(self, node: TreeNode, X: np.ndarray) -> np.ndarray:
        if node.is_leaf:
            return node.model.predict(X)
        left = node.goes_left(X)
        p = np.empty(X.shape[0])
        if left.any():
            p[left] = self._predict(node.left, X[left])
        if (~left).any():
            p[~left] = self._predict(node.right, X[~left])
        k = self.smoothing_k
        if k > 0:
            n_below = np.where(left, node.left.n, node.right.n).astype(float)
            p = (n_below * p + k * node.model.predict(X)) / (n_below + k)
        return p

    def to_dict(self) -> dict[str, Any]:
        return {"smoothing_k": self.smoothing_k, "root": self.root.to_dict()}

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "M5ModelTree":
        return cls(TreeNode.from_dict(doc["root"]), float(doc["smoothing_k"]))


def _attach_models(node: TreeNode, X: np.ndarray, y: np.ndarray, path: frozenset[int]) -> set[int]:
    """Fit a model at every node; returns the attributes tested in the subtree.

    Candidates are the attributes tested below the node plus those tested on
    its path from the root, so terminal leaves still get a linear model.
    """
    if node.is_leaf:
        below: set[int] = set()
    else:
        inner = path | {node.attr}
        below = {node.attr} | _attach_models(node.left, X, y, inner) | _attach_models(node.right, X, y, inner)
    rows = node.rows
    node.model = fit_node_model(X[rows], y[rows], sorted(below | path))
    return below


def _prune(node: TreeNode, X: np.ndarray, y: np.ndarray, tol: float) -> float:
    rows = node.rows
    own = adjusted_error(node.model, X[rows], y[rows])
    if node.is_leaf:
        return own
    sub = (node.left.n * _prune(node.left, X, y, tol) + node.right.n * _prune(node.right, X, y, tol)) / node.n
    if own <= sub + tol:
        node.make_leaf()
        return own
    return sub


def fit_m5(X: np.ndarray, y: np.ndarray, params: M5Params = M5Params()) -> M5ModelTree:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < params.min_leaf or n == 0:
        raise ValidationError(f"M5 needs at least min_leaf={params.min_leaf} rows, got {n}")
    sd_root = float(y.std())

    def stop(yn: np.ndarray, depth: int) -> bool:
        return len(yn) < 2 * params.min_leaf or float(yn.std()) < params.sd_stop_fraction * sd_root

    root = grow_tree(X, y, np.arange(n), SD_REDUCTION, params.min_leaf, stop)
    _attach_models(root, X, y, frozenset())
    if params.prune:
        _prune(root, X, y, tol=1e-9 * sd_root)
    for node in root.walk():
        node.rows = None
    return M5ModelTree(root, params.smoothing_k)
