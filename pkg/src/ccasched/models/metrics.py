"""Relative mean absolute error and the derived accuracy figure."""

from __future__ import annotations

import numpy as np

from ..errors import DomainError, ValidationError


def rmae(predicted, actual) -> float:
    """Mean of |predicted - actual| / actual, in percent."""
    predicted = np.asarray(predicted, dtype=float)
    actual = np.asarray(actual, dtype=float)
    if predicted.shape != actual.shape or predicted.ndim != 1:
        raise ValidationError("predicted and actual must be 1-D vectors of equal length")
    if predicted.size == 0:
        raise ValidationError("rmae of an empty vector is undefined")
    if np.any(actual <= 0):
        raise DomainError("rmae needs strictly positive actual values")
    return float(np.mean(np.abs(predicted - actual) / actual) * 100.0)


def accuracy(predicted, actual) -> float:
    return 100.0 - rmae(predicted, actual)
