"""Enumeration of index subsets and batched rank tests over them."""

from __future__ import annotations

import itertools
from math import comb

import numpy as np

from . import _kernels
from .core import rank_threshold

DEFAULT_BUDGET = 100_000


def combinations_array(n: int, k: int) -> np.ndarray:
    """All ``k``-subsets of ``range(n)`` as rows, in lexicographic order."""
    if k < 0 or k > n:
        return np.empty((0, max(k, 0)), dtype=np.int64)
    count = comb(n, k)
    out = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), k)),
        dtype=np.int64,
        count=count * k,
    )
    return out.reshape(count, k)


def sample_subsets(n: int, k: int, trials: int, seed: int) -> np.ndarray:
    """Seeded uniform ``k``-subsets, deduplicated and sorted lexicographically."""
    if k == 0:
        return np.empty((1, 0), dtype=np.int64)
    rng = np.random.default_rng(seed)
    rows = np.sort(np.argsort(rng.random((trials, n)), axis=1)[:, :k], axis=1)
    return np.unique(rows.astype(np.int64), axis=0)


def complements(subsets: np.ndarray, n: int) -> np.ndarray:
    """Row-wise sorted complement of each subset within ``range(n)``."""
    K, k = subsets.shape
    mask = np.ones((K, n), dtype=bool)
    if k:
        mask[np.arange(K)[:, None], subsets] = False
    return np.nonzero(mask)[1].reshape(K, n - k).astype(np.int64)


def span_extremes(A: np.ndarray, keep: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(sigma_max, sigma_min)`` of the spanning test for each kept column set.

    ``sigma_min`` is forced to zero when fewer columns than rows are kept.
    """
    smax, smin = _kernels.subset_singular_extremes(A, keep)
    if keep.shape[1] < A.shape[0]:
        smin = np.zeros_like(smin)
    return smax, smin


def full_rank_mask(smax: np.ndarray, smin: np.ndarray, rank_tol: float) -> np.ndarray:
    return smin > rank_tol * np.maximum(smax, 1.0)


def first_failure(A: np.ndarray, blocks: np.ndarray, rank_tol: float, span: bool) -> int:
    """Index of the first block that fails its rank test, or ``-1``.

    With ``span=True`` a block must span the column space of ``A``'s rows
    (needs at least ``rows`` columns); otherwise its columns must be
    independent (needs at most ``rows`` columns).
    """
    rows, k = A.shape[0], blocks.shape[1]
    if blocks.shape[0] == 0:
        return -1
    if (span and k < rows) or (not span and k > rows):
        return 0
    return _kernels.first_deficient(A, blocks, rank_tol)


def threshold(smax: float, rank_tol: float) -> float:
    return rank_threshold(smax, rank_tol)
