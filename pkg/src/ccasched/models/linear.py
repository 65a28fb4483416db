"""Ordinary least squares and least-median-of-squares regression."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..errors import SingularFitError, ValidationError

RIDGE_JITTER = 1e-8


@dataclass(frozen=True)
class LinearModel:
    """intercept + sum(coef[i] * X[:, attrs[i]])"""

    attrs: tuple[int, ...]
    coef: tuple[float, ...]
    intercept: float

    tag = "linear"

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        # elementwise accumulation keeps each row's result independent of batch size
        out = np.full(X.shape[0], self.intercept)
        for a, c in zip(self.attrs, self.coef):
            out = out + c * X[:, a]
        return out

    @property
    def n_params(self) -> int:
        return len(self.attrs) + 1

    def to_dict(self) -> dict[str, Any]:
        return {"attrs": list(self.attrs), "coef": list(self.coef), "intercept": self.intercept}

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "LinearModel":
        return cls(tuple(int(a) for a in doc["attrs"]), tuple(float(c) for c in doc["coef"]), float(doc["intercept"]))


def ols(X: np.ndarray, y: np.ndarray, attrs: tuple[int, ...] | None = None) -> LinearModel:
    """Least squares with intercept via centered normal equations.

    A relative ridge jitter is added only when the Gram matrix is singular
    or numerically close to it.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if attrs is None:
        attrs = tuple(range(X.shape[1]))
    ybar = float(y.mean())
    if not attrs:
        return LinearModel((), (), ybar)
    A = X[:, list(attrs)]
    xbar = A.mean(axis=0)
    Ac = A - xbar
    G = Ac.T @ Ac
    rhs = Ac.T @ (y - ybar)
    try:
        singular = np.linalg.cond(G) > 1e12
    except np.linalg.LinAlgError:
        singular = True
    if singular:
        scale = max(float(np.trace(G)) / len(attrs), 1e-300)
        G = G + RIDGE_JITTER * scale * np.eye(len(attrs))
    w = np.linalg.solve(G, rhs)
    return LinearModel(tuple(attrs), tuple(float(v) for v in w), float(ybar - xbar @ w))


def fit_linear(X: np.ndarray, y: np.ndarray) -> LinearModel:
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    if n <= d:
        raise ValidationError(f"linear regression needs more rows than features ({n} <= {d})")
    if np.all(X == X[0]):
        raise SingularFitError("all rows are identical; the fit is degenerate")
    return ols(X, y)


@dataclass(frozen=True)
class LmsParams:
    n_subsets: int = 500
    subset_size: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n_subsets < 1:
            raise ValidationError("n_subsets must be >= 1")
        if self.subset_size is not None and self.subset_size < 1:
            raise ValidationError("subset_size must be >= 1")


def _elemental_subsets(n: int, size: int, n_subsets: int, seed: int):
    if math.comb(n, size) <= n_subsets:
        yield from itertools.combinations(range(n), size)
        return
    rng = np.random.default_rng(seed)
    for _ in range(n_subsets):
        yield tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))


def fit_lms(X: np.ndarray, y: np.ndarray, params: LmsParams = LmsParams()) -> LinearModel:
    """Least median of squares by elemental-subset search.

    Each subset is fitted exactly; the candidate with the smallest median
    squared residual over all rows wins (first one on ties). When the
    number of possible subsets does not exceed ``n_subsets`` every subset
    is tried.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, d = X.shape
    size = params.subset_size or d + 1
    if n < size:
        raise ValidationError(f"LMS needs at least subset_size={size} rows, got {n}")
    if np.all(X == X[0]):
        raise SingularFitError("all rows are identical; the fit is degenerate")
    design = np.hstack([np.ones((n, 1)), X])
    best, best_crit = None, math.inf
    for subset in _elemental_subsets(n, size, params.n_subsets, params.seed):
        idx = list(subset)
        beta, _, rank, _ = np.linalg.lstsq(design[idx], y[idx], rcond=None)
        if rank < d + 1:
            continue
        crit = float(np.median((y - design @ beta) ** 2))
        if crit < best_crit:
            best, best_crit = beta, crit
    if best is None:
        raise SingularFitError("every elemental subset was singular")
    return LinearModel(tuple(range(d)), tuple(float(v) for v in best[1:]), float(best[0]))


def median_squared_residual(model: LinearModel, X: np.ndarray, y: np.ndarray) -> float:
    return float(np.median((np.asarray(y, dtype=float) - model.predict(X)) ** 2))
