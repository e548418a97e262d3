# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled subset singular value kernels.

Each row of ``subsets`` selects columns of ``A``.  The selected block is
copied into a column-major scratch buffer, oriented so that it has
``min(rows, k)`` columns, and its singular values are computed without
singular vectors: by one-sided (Hestenes) Jacobi for small blocks, by LAPACK
``zgesvd`` otherwise.  Only the largest and the smallest of the
``min(rows, k)`` singular values are kept.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs
from scipy.linalg.cython_lapack cimport zgesvd

cnp.import_array()

# Blocks with at most this many columns (after orientation) use Jacobi.
DEF JACOBI_MAX = 4
DEF MAX_SWEEPS = 60
DEF DBL_EPS = 2.220446049250313e-16


cdef inline double _abs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef int _jacobi(double complex *a, int m, int n, double *smax, double *smin) noexcept nogil:
    """Column norms of ``a`` (m x n, m >= n) after one-sided Jacobi orthogonalisation."""
    cdef int sweep, p, q, i, rotated
    cdef double alpha, beta, gabs, zeta, t, c, s, nrm, tol
    cdef double complex g, ph, ap, aq
    tol = DBL_EPS * m
    for sweep in range(MAX_SWEEPS):
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                g = 0.0
                for i in range(m):
                    ap = a[i + p * m]
                    aq = a[i + q * m]
                    alpha += _abs2(ap)
                    beta += _abs2(aq)
                    g += ap.conjugate() * aq
                gabs = sqrt(_abs2(g))
                if gabs == 0.0 or gabs <= tol * sqrt(alpha * beta):
                    continue
                rotated = 1
                ph = (g / gabs).conjugate()
                zeta = (beta - alpha) / (2.0 * gabs)
                t = 1.0 / (fabs(zeta) + sqrt(1.0 + zeta * zeta))
                if zeta < 0:
                    t = -t
                c = 1.0 / sqrt(1.0 + t * t)
                s = c * t
                for i in range(m):
                    ap = a[i + p * m]
                    aq = a[i + q * m] * ph
                    a[i + p * m] = c * ap - s * aq
                    a[i + q * m] = s * ap + c * aq
        if not rotated:
            break
    smax[0] = 0.0
    smin[0] = -1.0
    for p in range(n):
        nrm = 0.0
        for i in range(m):
            nrm += _abs2(a[i + p * m])
        nrm = sqrt(nrm)
        if nrm > smax[0]:
            smax[0] = nrm
        if smin[0] < 0 or nrm < smin[0]:
            smin[0] = nrm
    return 0


cdef int _workspace(int m, int n) except -1:
    cdef char job = b'N'
    cdef int one = 1, lwork = -1, info = 0
    cdef int mn = m if m < n else n
    cdef double complex query
    cdef double complex dummy
    cdef double[::1] s = np.empty(mn, dtype=np.float64)
    cdef double[::1] rwork = np.empty(5 * mn, dtype=np.float64)
    cdef double complex[::1] a = np.empty(m * n, dtype=np.complex128)
    zgesvd(&job, &job, &m, &n, &a[0], &m, &s[0], &dummy, &one, &dummy, &one,
           &query, &lwork, &rwork[0], &info)
    if info != 0:
        raise ArithmeticError(f"zgesvd workspace query failed (info={info})")
    return max(<int>query.real, 1)


cdef int _sweep(const double complex[:, ::1] A, const cnp.int64_t[:, ::1] subsets,
                double[::1] smax, double[::1] smin, double rank_tol, bint stop_early,
                bint use_jacobi, Py_ssize_t *found) except -1:
    cdef int d = A.shape[0]
    cdef int k = subsets.shape[1]
    cdef Py_ssize_t K = subsets.shape[0]
    # Orient the block as m x n with m >= n.
    cdef bint transpose = k > d
    cdef int m = k if transpose else d
    cdef int n = d if transpose else k
    cdef char job = b'N'
    cdef int one = 1, info = 0
    cdef int lwork = 1 if use_jacobi else _workspace(m, n)
    cdef double complex dummy
    cdef double complex[::1] a = np.empty(m * n, dtype=np.complex128)
    cdef double complex[::1] work = np.empty(lwork, dtype=np.complex128)
    cdef double[::1] s = np.empty(n, dtype=np.float64)
    cdef double[::1] rwork = np.empty(5 * n, dtype=np.float64)
    cdef Py_ssize_t t, col
    cdef int r, c
    cdef double hi, lo
    found[0] = -1
    with nogil:
        for t in range(K):
            for c in range(k):
                col = subsets[t, c]
                if transpose:
                    for r in range(d):
                        a[c + r * m] = A[r, col]
                else:
                    for r in range(d):
                        a[r + c * m] = A[r, col]
            if use_jacobi:
                _jacobi(&a[0], m, n, &hi, &lo)
            else:
                zgesvd(&job, &job, &m, &n, &a[0], &m, &s[0], &dummy, &one, &dummy, &one,
                       &work[0], &lwork, &rwork[0], &info)
                if info != 0:
                    break
                hi = s[0]
                lo = s[n - 1]
            smax[t] = hi
            smin[t] = lo
            if stop_early and lo <= rank_tol * (hi if hi > 1.0 else 1.0):
                found[0] = t
                break
    if info != 0:
        raise ArithmeticError(f"zgesvd failed to converge (info={info})")
    return 0


cdef bint _pick_jacobi(int d, int k, method):
    cdef int n = d if d < k else k
    if method == "jacobi":
        return True
    if method == "lapack":
        return False
    return n <= JACOBI_MAX


def subset_singular_extremes(A, subsets, method="auto"):
    """Largest and ``min(d, k)``-th singular value of every column subset."""
    cdef Py_ssize_t found
    cdef Py_ssize_t K = subsets.shape[0]
    smax = np.zeros(K, dtype=np.float64)
    smin = np.zeros(K, dtype=np.float64)
    if K == 0 or subsets.shape[1] == 0:
        return smax, smin
    _sweep(A, subsets, smax, smin, 0.0, False,
           _pick_jacobi(A.shape[0], subsets.shape[1], method), &found)
    return smax, smin


def first_deficient(A, subsets, double rank_tol, method="auto"):
    """Index of the first subset whose block is rank deficient, or -1."""
    cdef Py_ssize_t found
    cdef Py_ssize_t K = subsets.shape[0]
    if K == 0:
        return -1
    if subsets.shape[1] == 0:
        return 0
    smax = np.zeros(K, dtype=np.float64)
    smin = np.zeros(K, dtype=np.float64)
    _sweep(A, subsets, smax, smin, rank_tol, True,
           _pick_jacobi(A.shape[0], subsets.shape[1], method), &found)
    return int(found)
