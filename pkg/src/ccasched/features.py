"""Feature scaling, correlation ranking and PCA diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .dataset import HPC_NAMES, TrainTable
from .errors import DomainError, ValidationError

PAPER_FEATURES = ("l1d_access", "l2_access", "l2_miss", "br_mispred")
PAPER_FEATURE_INDICES = tuple(HPC_NAMES.index(n) for n in PAPER_FEATURES)
FEATURE_MODES = ("auto", "paper_fixed")


@dataclass(frozen=True)
class Scaler:
    """Min-max scaling fitted on training rows; no clamping on apply."""

    mins: tuple[float, ...]
    maxs: tuple[float, ...]

    @classmethod
    def fit(cls, X: np.ndarray) -> "Scaler":
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValidationError("cannot fit a scaler on an empty table")
        return cls(tuple(X.min(axis=0).tolist()), tuple(X.max(axis=0).tolist()))

    @property
    def width(self) -> int:
        return len(self.mins)

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.width:
            raise ValidationError(f"scaler fitted on width {self.width}, got {X.shape[-1]}")
        lo = np.array(self.mins)
        span = np.array(self.maxs) - lo
        safe = np.where(span > 0, span, 1.0)
        return np.where(span > 0, (X - lo) / safe, 0.0)

    def to_dict(self) -> dict[str, Any]:
        return {"mins": list(self.mins), "maxs": list(self.maxs)}

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "Scaler":
        return cls(tuple(float(v) for v in doc["mins"]), tuple(float(v) for v in doc["maxs"]))


def fit_scaler(table: TrainTable) -> Scaler:
    return Scaler.fit(table.X)


def apply_scaler(scaler: Scaler, row: np.ndarray) -> np.ndarray:
    return scaler.apply(row)


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("pearson needs two 1-D vectors of equal length")
    if x.size < 2:
        raise ValidationError("pearson needs at least 2 samples")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise DomainError("correlation undefined: zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def jacobi_eigh(A: np.ndarray, tol: float = 1e-15, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors as columns), unsorted.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValidationError("jacobi_eigh needs a square matrix")
    V = np.eye(n)
    scale = max(np.abs(A).max(initial=0.0), 1e-300)
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.triu(A, 1) ** 2)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    return np.diag(A).copy(), V


@dataclass(frozen=True)
class PcaResult:
    eigenvalues: np.ndarray
    explained: np.ndarray
    loadings: np.ndarray  # columns are components
    means: np.ndarray
    stds: np.ndarray

    def standardize(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.means) / self.stds


def pca(X: np.ndarray) -> PcaResult:
    """Principal components of the correlation matrix of standardized columns.

    Constant columns standardize to zero and contribute a zero eigenvalue.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2 or X.shape[1] < 2:
        raise ValidationError("pca needs at least 2 rows and 2 features")
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    stds = np.where(stds > 0, stds, 1.0)
    Z = (X - means) / stds
    R = (Z.T @ Z) / X.shape[0]
    R = 0.5 * (R + R.T)
    vals, vecs = jacobi_eigh(R)
    vals = np.where(np.abs(vals) < 1e-10, 0.0, vals)
    vals = np.maximum(vals, 0.0)
    order = np.argsort(-vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    total = vals.sum()
    explained = vals / total if total > 0 else np.full_like(vals, 1.0 / len(vals))
    return PcaResult(vals, explained, vecs, means, stds)


def _hpc_columns(table: TrainTable) -> list[tuple[int, int]]:
    """(table column, counter schema index) for every counter column in the table."""
    return [(j, HPC_NAMES.index(n)) for j, n in enumerate(table.feature_names) if n in HPC_NAMES]


def target_correlations(table: TrainTable) -> dict[int, float]:
    """Pearson r against the target per counter; constant columns score 0."""
    out = {}
    for j, idx in _hpc_columns(table):
        try:
            out[idx] = pearson(table.X[:, j], table.y)
        except DomainError:
            out[idx] = 0.0
    return out


def rank_features(table: TrainTable) -> list[int]:
    corr = target_correlations(table)
    return sorted(corr, key=lambda idx: (-abs(corr[idx]), idx))


def select_features(table: TrainTable, k: int = 4, mode: str = "auto") -> list[int]:
    """Counter schema indices to feed the models, sorted ascending."""
    if mode not in FEATURE_MODES:
        raise ValidationError(f"unknown feature mode {mode!r}; expected one of {FEATURE_MODES}")
    if k < 1:
        raise ValidationError("k must be >= 1")
    if mode == "paper_fixed":
        return list(PAPER_FEATURE_INDICES)
    ranked = rank_features(table)
    if k > len(ranked):
        raise ValidationError(f"k={k} exceeds the {len(ranked)} available counters")
    return sorted(ranked[:k])


@dataclass(frozen=True)
class FeatureReport:
    correlations: dict[int, float]
    pca: PcaResult
    selected: list[int]
    mode: str

    def to_dict(self) -> dict[str, Any]:
        names = [HPC_NAMES[i] for i in sorted(self.correlations)]
        return {
            "mode": self.mode,
            "selected": [HPC_NAMES[i] for i in self.selected],
            "selected_indices": list(self.selected),
            "correlation_with_edp": {HPC_NAMES[i]: self.correlations[i] for i in sorted(self.correlations)},
            "pca": {
                "features": names,
                "explained_variance": self.pca.explained.tolist(),
                "loadings": self.pca.loadings.tolist(),
            },
        }


def feature_report(table: TrainTable, k: int = 4, mode: str = "auto") -> FeatureReport:
    cols = _hpc_columns(table)
    X = table.X[:, [j for j, _ in cols]]
    return FeatureReport(target_correlations(table), pca(X), select_features(table, k, mode), mode)
