"""Pure NumPy implementation of the subset singular value kernels.

Column blocks are gathered in chunks and passed to the batched
``numpy.linalg.svd``.
"""

import numpy as np

CHUNK = 2048


def _chunk_svd(A, sub):
    stack = np.moveaxis(A[:, sub], 1, 0)
    return np.linalg.svd(stack, compute_uv=False)


def subset_singular_extremes(A, subsets):
    K, k = subsets.shape
    smax = np.zeros(K)
    smin = np.zeros(K)
    if K == 0 or k == 0:
        return smax, smin
    for start in range(0, K, CHUNK):
        s = _chunk_svd(A, subsets[start:start + CHUNK])
        smax[start:start + CHUNK] = s[:, 0]
        smin[start:start + CHUNK] = s[:, -1]
    return smax, smin


def first_deficient(A, subsets, rank_tol):
    K, k = subsets.shape
    if K == 0:
        return -1
    if k == 0:
        return 0
    for start in range(0, K, CHUNK):
        s = _chunk_svd(A, subsets[start:start + CHUNK])
        bad = np.flatnonzero(s[:, -1] <= rank_tol * np.maximum(s[:, 0], 1.0))
        if bad.size:
            return int(start + bad[0])
    return -1
