"""Pure numpy implementation of the split scan (fallback for ``_kernels``)."""

from __future__ import annotations

import numpy as np


def _spread(s, ss, n, criterion):
    m = s / n
    v = ss / n - m * m
    v = np.maximum(v, 0.0)
    return np.sqrt(v) if criterion == 0 else v


def best_split(x, y, min_leaf: int, criterion: int) -> tuple[float, int]:
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError("x and y must have equal length")
    n = x.shape[0]
    if n < 2:
        return float("-inf"), 0
    # add.accumulate is a sequential running sum, same order as the C loop
    cs = np.cumsum(y)
    css = np.cumsum(y * y)
    s_tot, ss_tot = cs[-1], css[-1]
    dn = np.float64(n)
    parent = _spread(s_tot, ss_tot, dn, criterion)
    nl = np.arange(1, n, dtype=np.float64)
    nr = dn - nl
    sl, ssl = cs[:-1], css[:-1]
    gain = parent - (nl * _spread(sl, ssl, nl, criterion) + nr * _spread(s_tot - sl, ss_tot - ssl, nr, criterion)) / dn
    ok = (nl >= min_leaf) & (nr >= min_leaf) & (x[1:] > x[:-1])
    if not ok.any():
        return float("-inf"), 0
    gain = np.where(ok, gain, -np.inf)
    i = int(np.argmax(gain))
    return float(gain[i]), i + 1
