# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: cyclic Jacobi eigenvalues and the matrix-free GW tensor contractions."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, hypot, pow, sqrt

cnp.import_array()


cdef inline double _loss(double a, double b, double p) noexcept nogil:
    cdef double r = fabs(a - b)
    if p == 1.0:
        return r
    if p == 2.0:
        return r * r
    return pow(r, p)


def jacobi_eigenvalues(double[:, ::1] a, double tol, int max_sweeps):
    """Diagonalize ``a`` in place with cyclic Jacobi rotations.

    Returns ``(diagonal, sweeps, off_norm)``. Iteration stops once the
    off-diagonal Frobenius norm drops to ``tol``.
    """
    cdef Py_ssize_t k = a.shape[0]
    cdef Py_ssize_t p, q, r
    cdef double apq, app, aqq, theta, t, c, s, arp, arq, off
    cdef int sweep = 0

    with nogil:
        while True:
            off = 0.0
            for p in range(k):
                for q in range(p + 1, k):
                    off += a[p, q] * a[p, q]
            off = sqrt(2.0 * off)
            if off <= tol or sweep >= max_sweeps:
                break
            sweep += 1
            for p in range(k - 1):
                for q in range(p + 1, k):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    app = a[p, p]
                    aqq = a[q, q]
                    theta = (aqq - app) / (2.0 * apq)
                    if theta >= 0.0:
                        t = 1.0 / (theta + hypot(theta, 1.0))
                    else:
                        t = -1.0 / (-theta + hypot(theta, 1.0))
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    for r in range(k):
                        if r == p or r == q:
                            continue
                        arp = a[r, p]
                        arq = a[r, q]
                        a[r, p] = c * arp - s * arq
                        a[r, q] = s * arp + c * arq
                        a[p, r] = a[r, p]
                        a[q, r] = a[r, q]
                    a[p, p] = app - t * apq
                    a[q, q] = aqq + t * apq
                    a[p, q] = 0.0
                    a[q, p] = 0.0

    diag = np.empty(k, dtype=np.float64)
    cdef double[::1] d = diag
    for p in range(k):
        d[p] = a[p, p]
    return diag, sweep, off


def tensor_objective(const double[:, ::1] dx, const double[:, ::1] dy, double p, const double[:, ::1] plan):
    """Sum over i,j,k,l of |dx[i,k] - dy[j,l]|^p * plan[i,j] * plan[k,l]."""
    cdef Py_ssize_t m = dx.shape[0], n = dy.shape[0]
    cdef Py_ssize_t i, j, k, l
    cdef double total = 0.0, inner, pij
    with nogil:
        for i in range(m):
            for j in range(n):
                pij = plan[i, j]
                if pij == 0.0:
                    continue
                inner = 0.0
                for k in range(m):
                    for l in range(n):
                        inner = inner + _loss(dx[i, k], dy[j, l], p) * plan[k, l]
                total = total + pij * inner
    return total


def tensor_gradient(const double[:, ::1] dx, const double[:, ::1] dy, double p, const double[:, ::1] plan):
    """Gradient 2 * sum_{k,l} |dx[i,k] - dy[j,l]|^p * plan[k,l] as an m x n array."""
    cdef Py_ssize_t m = dx.shape[0], n = dy.shape[0]
    cdef Py_ssize_t i, j, k, l
    cdef double inner
    out = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] g = out
    with nogil:
        for i in range(m):
            for j in range(n):
                inner = 0.0
                for k in range(m):
                    for l in range(n):
                        inner = inner + _loss(dx[i, k], dy[j, l], p) * plan[k, l]
                g[i, j] = 2.0 * inner
    return out
