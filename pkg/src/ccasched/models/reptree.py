"""Fast regression tree with reduced-error pruning on a seeded holdout."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from ..errors import ValidationError
from .trees import VARIANCE_REDUCTION, TreeNode, grow_tree, route

MIN_VARIANCE_FRACTION = 1e-3


@dataclass(frozen=True)
class RepParams:
    min_leaf: int = 2
    n_prune_folds: int = 3
    max_depth: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.min_leaf < 1:
            raise ValidationError("min_leaf must be >= 1")
        if self.n_prune_folds < 2:
            raise ValidationError("n_prune_folds must be >= 2")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValidationError("max_depth must be >= 0")


@dataclass
class REPTree:
    root: TreeNode

    tag = "reptree"

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.empty(X.shape[0])

        def assign(node: TreeNode, idx: np.ndarray) -> None:
            if node.is_leaf:
                out[idx] = node.value

        route(self.root, X, np.arange(X.shape[0]), assign)
        return out

    def to_dict(self) -> dict[str, Any]:
        return {"root": self.root.to_dict()}

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "REPTree":
        return cls(TreeNode.from_dict(doc["root"]))


def _reduced_error_prune(node: TreeNode, X: np.ndarray, y: np.ndarray, idx: np.ndarray) -> float:
    """Collapse any subtree whose holdout SSE is not better than its node mean's."""
    as_leaf = float(np.sum((y[idx] - node.value) ** 2))
    if node.is_leaf:
        return as_leaf
    left = node.goes_left(X[idx])
    sub = _reduced_error_prune(node.left, X, y, idx[left]) + _reduced_error_prune(node.right, X, y, idx[~left])
    if as_leaf <= sub:
        node.make_leaf()
        return as_leaf
    return sub


def _backfit(root: TreeNode, X: np.ndarray, y: np.ndarray) -> None:
    def refit(node: TreeNode, idx: np.ndarray) -> None:
        if idx.size:
            node.n = int(idx.size)
            node.value = float(y[idx].mean())

    route(root, X, np.arange(len(y)), refit)


def fit_reptree(X: np.ndarray, y: np.ndarray, params: RepParams = RepParams()) -> REPTree:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < 2 * params.min_leaf:
        raise ValidationError(f"REPTree needs at least 2*min_leaf={2 * params.min_leaf} rows, got {n}")
    perm = np.random.default_rng(params.seed).permutation(n)
    n_hold = n // params.n_prune_folds
    if n - n_hold < 2 * params.min_leaf:
        n_hold = 0
    hold, grow_rows = np.sort(perm[:n_hold]), np.sort(perm[n_hold:])
    var_root = float(y[grow_rows].var())

    def stop(yn: np.ndarray, depth: int) -> bool:
        if params.max_depth is not None and depth >= params.max_depth:
            return True
        return len(yn) < 2 * params.min_leaf or float(yn.var()) <= MIN_VARIANCE_FRACTION * var_root

    root = grow_tree(X, y, grow_rows, VARIANCE_REDUCTION, params.min_leaf, stop)
    for node in root.walk():
        node.rows = None
    if n_hold:
        _reduced_error_prune(root, X, y, hold)
        _backfit(root, X, y)
    return REPTree(root)
