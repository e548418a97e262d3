"""Hot loops over column subsets of a matrix.

Two interchangeable backends provide the same functions: a compiled Cython
extension calling LAPACK directly, and a NumPy fallback.  The compiled one is
used when it imports; setting ``FRAMEKIT_PURE_PYTHON=1`` forces the fallback.
"""

import os

import numpy as np

from . import _pysubsets

_backends = {"python": _pysubsets}
try:
    from . import _csubsets
except ImportError:  # extension not built
    _csubsets = None
else:
    _backends["cython"] = _csubsets

if _csubsets is not None and not os.environ.get("FRAMEKIT_PURE_PYTHON"):
    BACKEND = "cython"
else:
    BACKEND = "python"


def available_backends():
    return sorted(_backends)


def _prepare(A, subsets):
    A = np.ascontiguousarray(A, dtype=np.complex128)
    subsets = np.ascontiguousarray(subsets, dtype=np.int64)
    if A.ndim != 2 or subsets.ndim != 2:
        raise ValueError("expected a matrix and a 2-D array of column indices")
    if subsets.size and (subsets.min() < 0 or subsets.max() >= A.shape[1]):
        raise IndexError("column index out of range")
    return A, subsets


def subset_singular_extremes(A, subsets, backend=None):
    """Per-subset ``(sigma_max, sigma_min)`` arrays.

    ``subsets`` is a ``K x k`` integer array; row ``t`` selects the columns
    of ``A`` forming block ``t``.  ``sigma_min`` is the ``min(rows, k)``-th
    singular value of the block.
    """
    A, subsets = _prepare(A, subsets)
    return _backends[backend or BACKEND].subset_singular_extremes(A, subsets)


def first_deficient(A, subsets, rank_tol, backend=None):
    """Row index of the first rank-deficient block, or ``-1`` if none is."""
    A, subsets = _prepare(A, subsets)
    return _backends[backend or BACKEND].first_deficient(A, subsets, float(rank_tol))
