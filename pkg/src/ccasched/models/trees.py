"""Binary regression-tree structure and greedy growth shared by M5 and REPTree."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .. import kernels
from .linear import LinearModel

SD_REDUCTION = 0
VARIANCE_REDUCTION = 1


@dataclass(eq=False)
class TreeNode:
    n: int
    value: float
    attr: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    model: LinearModel | None = None
    rows: np.ndarray | None = field(default=None, repr=False)  # training scratch, never serialized

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def make_leaf(self) -> None:
        self.left = self.right = None
        self.attr = -1
        self.threshold = 0.0

    def goes_left(self, X: np.ndarray) -> np.ndarray:
        return X[:, self.attr] <= self.threshold

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())

    def n_leaves(self) -> int:
        if self.is_leaf:
            return 1
        return self.left.n_leaves() + self.right.n_leaves()

    def walk(self):
        yield self
        if not self.is_leaf:
            yield from self.left.walk()
            yield from self.right.walk()

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"n": self.n, "value": self.value}
        if self.model is not None:
            doc["model"] = self.model.to_dict()
        if not self.is_leaf:
            doc.update(attr=self.attr, threshold=self.threshold, left=self.left.to_dict(), right=self.right.to_dict())
        return doc

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "TreeNode":
        node = cls(int(doc["n"]), float(doc["value"]))
        if "model" in doc:
            node.model = LinearModel.from_dict(doc["model"])
        if "left" in doc:
            node.attr = int(doc["attr"])
            node.threshold = float(doc["threshold"])
            node.left = cls.from_dict(doc["left"])
            node.right = cls.from_dict(doc["right"])
        return node


StopRule = Callable[[np.ndarray, int], bool]


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    rows: np.ndarray,
    criterion: int,
    min_leaf: int,
    stop: StopRule,
) -> TreeNode:
    """Greedy top-down growth.

    Every attribute is argsorted once for the root; children inherit
    order-preserving filters of their parent's sorted index lists. A split
    must leave ``min_leaf`` rows on each side and strictly improve the
    criterion. Rows with ``x <= threshold`` go left.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    rows = np.asarray(rows, dtype=np.intp)
    lists = [rows[np.argsort(X[rows, a], kind="stable")] for a in range(X.shape[1])]
    mark = np.zeros(X.shape[0], dtype=bool)
    best_split = kernels.best_split

    def build(lists: list[np.ndarray], depth: int) -> TreeNode:
        idx = lists[0]
        yn = y[idx]
        mean = float(yn.mean())
        node = TreeNode(len(idx), mean, rows=np.sort(idx))
        if np.ptp(yn) == 0 or stop(yn, depth):
            return node
        best_gain, best_attr, best_pos = 0.0, -1, 0
        for a, ia in enumerate(lists):
            gain, pos = best_split(
                np.ascontiguousarray(X[ia, a]), np.ascontiguousarray(y[ia] - mean), min_leaf, criterion
            )
            if pos and gain > best_gain:
                best_gain, best_attr, best_pos = gain, a, pos
        if best_attr < 0:
            return node
        ia = lists[best_attr]
        lo, hi = X[ia[best_pos - 1], best_attr], X[ia[best_pos], best_attr]
        threshold = 0.5 * (lo + hi)
        if not lo <= threshold < hi:
            threshold = lo
        mark[ia[:best_pos]] = True
        left = [l[mark[l]] for l in lists]
        right = [l[~mark[l]] for l in lists]
        mark[ia[:best_pos]] = False
        node.attr, node.threshold = best_attr, float(threshold)
        node.left = build(left, depth + 1)
        node.right = build(right, depth + 1)
        return node

    return build(lists, 0)


def route(node: TreeNode, X: np.ndarray, idx: np.ndarray, fn: Callable[[TreeNode, np.ndarray], None]) -> None:
    """Call ``fn(node, rows)`` for every node with the rows of ``X`` reaching it."""
    fn(node, idx)
    if node.is_leaf:
        return
    left = node.goes_left(X[idx])
    route(node.left, X, idx[left], fn)
    route(node.right, X, idx[~left], fn)
