# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled split scan for the regression-tree learners.

Mirrors ccasched._kernels_py operation for operation so that both backends
return bit-identical results.
"""

from libc.math cimport sqrt, INFINITY


cdef inline double _spread(double s, double ss, double n, int criterion) nogil:
    cdef double m = s / n
    cdef double v = ss / n - m * m
    if v < 0.0:
        v = 0.0
    if criterion == 0:
        return sqrt(v)
    return v


def best_split(const double[::1] x, const double[::1] y, Py_ssize_t min_leaf, int criterion):
    """Best binary split of a node along one attribute.

    ``x`` holds the node's attribute values sorted ascending and ``y`` the
    aligned (ideally node-centered) targets. ``criterion`` 0 scores by
    standard-deviation reduction, 1 by variance reduction. Returns
    ``(gain, pos)``; the left child is ``[:pos]``. ``pos == 0`` means no
    admissible split.
    """
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, best_pos = 0
    cdef double s_tot = 0.0, ss_tot = 0.0, sl = 0.0, ssl = 0.0
    cdef double nl, nr, dn, parent, gain, best_gain = -INFINITY
    if y.shape[0] != n:
        raise ValueError("x and y must have equal length")
    if n < 2:
        return best_gain, 0
    with nogil:
        for i in range(n):
            s_tot += y[i]
            ss_tot += y[i] * y[i]
        dn = <double>n
        parent = _spread(s_tot, ss_tot, dn, criterion)
        for i in range(n - 1):
            sl += y[i]
            ssl += y[i] * y[i]
            nl = <double>(i + 1)
            nr = dn - nl
            if i + 1 < min_leaf or n - i - 1 < min_leaf or not (x[i + 1] > x[i]):
                continue
            gain = parent - (nl * _spread(sl, ssl, nl, criterion)
                             + nr * _spread(s_tot - sl, ss_tot - ssl, nr, criterion)) / dn
            if gain > best_gain:
                best_gain = gain
                best_pos = i + 1
    return best_gain, best_pos
