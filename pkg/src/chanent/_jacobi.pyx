# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Cyclic Jacobi eigensolver for small dense Hermitian matrices.

Every matrix function evaluated by the optimisers goes through an
eigendecomposition of a matrix of dimension at most a few dozen, so the
per-call overhead matters more than asymptotic speed.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

ctypedef double complex cplx


cdef inline double cabs2(cplx z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline cplx conj(cplx z) nogil:
    return z.real - 1j * z.imag


def eigh(a, double rtol=1e-15, int max_sweeps=64):
    """Eigendecomposition of a Hermitian matrix.

    Only the upper triangle and the real part of the diagonal are read.

    Returns:
        ``(w, v)`` with ascending eigenvalues ``w`` and unitary ``v`` whose
        columns are the eigenvectors.
    """
    cdef const cplx[:, ::1] src = np.ascontiguousarray(a, dtype=np.complex128)
    cdef Py_ssize_t n = src.shape[0]
    if src.shape[1] != n:
        raise ValueError("matrix must be square")
    out_a = np.empty((n, n), dtype=np.complex128)
    out_v = np.zeros((n, n), dtype=np.complex128)
    cdef cplx[:, ::1] A = out_a
    cdef cplx[:, ::1] V = out_v
    cdef Py_ssize_t i, j, k, p, q, sweep
    cdef double norm2 = 0.0, off2, r, theta, t, c, s, app, aqq, thresh
    cdef cplx e, se, sec, x, y

    for i in range(n):
        A[i, i] = src[i, i].real
        V[i, i] = 1.0
        norm2 += A[i, i].real * A[i, i].real
        for j in range(i + 1, n):
            A[i, j] = src[i, j]
            A[j, i] = conj(src[i, j])
            norm2 += 2.0 * cabs2(src[i, j])

    thresh = rtol * rtol * norm2
    with nogil:
        for sweep in range(max_sweeps):
            off2 = 0.0
            for p in range(n - 1):
                for q in range(p + 1, n):
                    off2 += cabs2(A[p, q])
            if off2 <= thresh or off2 == 0.0:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    r = sqrt(cabs2(A[p, q]))
                    if r < 1e-300:
                        continue
                    app = A[p, p].real
                    aqq = A[q, q].real
                    e = A[p, q] / r
                    theta = (aqq - app) / (2.0 * r)
                    if fabs(theta) > 1e150:
                        t = 0.5 / theta
                    elif theta >= 0:
                        t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                    else:
                        t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    se = s * e
                    sec = s * conj(e)
                    # A <- A J with J = [[c, s e], [-s conj(e), c]] on (p, q)
                    for k in range(n):
                        x = A[k, p]
                        y = A[k, q]
                        A[k, p] = c * x - sec * y
                        A[k, q] = se * x + c * y
                    # A <- J^dagger A
                    for k in range(n):
                        x = A[p, k]
                        y = A[q, k]
                        A[p, k] = c * x - se * y
                        A[q, k] = sec * x + c * y
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    A[p, p] = A[p, p].real
                    A[q, q] = A[q, q].real
                    for k in range(n):
                        x = V[k, p]
                        y = V[k, q]
                        V[k, p] = c * x - sec * y
                        V[k, q] = se * x + c * y

    # insertion sort keeps equal eigenvalues in their original order
    w = np.empty(n, dtype=np.float64)
    vs = np.empty((n, n), dtype=np.complex128)
    cdef double[::1] wv = w
    cdef cplx[:, ::1] VS = vs
    cdef Py_ssize_t[64] order_buf
    cdef Py_ssize_t[::1] order
    if n <= 64:
        order = order_buf
    else:
        order = np.empty(n, dtype=np.intp)
    cdef double key
    cdef Py_ssize_t idx
    for i in range(n):
        order[i] = i
    for i in range(1, n):
        idx = order[i]
        key = A[idx, idx].real
        j = i - 1
        while j >= 0 and A[order[j], order[j]].real > key:
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = idx
    for i in range(n):
        wv[i] = A[order[i], order[i]].real
        for k in range(n):
            VS[k, i] = V[k, order[i]]
    return w, vs


def reconstruct(v, f):
    """Return ``v @ diag(f) @ v^dagger`` for real ``f``."""
    cdef const cplx[:, ::1] V = np.ascontiguousarray(v, dtype=np.complex128)
    cdef const double[::1] F = np.ascontiguousarray(f, dtype=np.float64)
    cdef Py_ssize_t n = V.shape[0], m = V.shape[1]
    if F.shape[0] != m:
        raise ValueError("spectrum length does not match eigenvector count")
    out = np.zeros((n, n), dtype=np.complex128)
    cdef cplx[:, ::1] R = out
    cdef Py_ssize_t i, j, k
    cdef cplx acc
    with nogil:
        for i in range(n):
            for j in range(i, n):
                acc = 0.0
                for k in range(m):
                    if F[k] != 0.0:
                        acc = acc + V[i, k] * F[k] * conj(V[j, k])
                R[i, j] = acc
                R[j, i] = conj(acc)
            R[i, i] = R[i, i].real
    return out
