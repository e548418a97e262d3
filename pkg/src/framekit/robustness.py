"""Erasure robustness, spark and excess, and the matrix Γ of a frame.

A frame is ``m``-erasure robust when removing any ``m`` of its vectors leaves
a spanning set.  All subset sweeps go through :mod:`framekit.subsets`, which
dispatches to the compiled kernels when they are available.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from . import _kernels
from . import subsets as _subsets
from .core import Frame, frame_bounds, random_unitary, rank_threshold, span_certificate
from .errors import (
    InvalidM,
    NotAProjection,
    ShapeMismatch,
    SubsetBudgetExceeded,
    TailNotABasis,
    ZeroRange,
)
from .mrc import as_erasure

__all__ = [
    "RobustnessReport",
    "GammaMatrix",
    "ExcessReport",
    "RangeNullReport",
    "ColumnReport",
    "ReducedBoundCheck",
    "is_m_erasure_robust",
    "robustness_degree",
    "spark",
    "excess",
    "expansion_coefficients",
    "reorder_tail_basis",
    "build_gamma",
    "verify_range_equals_nullspace",
    "gamma_columns_independent",
    "project_frame",
    "random_projection",
    "reduced_bound_check",
]

# Subsets are evaluated in blocks of this many rows to bound memory.
_BLOCK = 1 << 14


@dataclass(frozen=True)
class RobustnessReport:
    m: int
    robust: bool
    checked_subsets: int
    failing_subset: tuple[int, ...] | None
    strategy: str
    min_certificate: float
    seed: int | None = None
    trials: int | None = None

    @property
    def probabilistic(self) -> bool:
        return self.strategy == "sampled"


@dataclass(frozen=True)
class ExcessReport:
    sup_excess: int
    uniform_excess: int


@dataclass(frozen=True)
class GammaMatrix:
    """``m x N`` matrix ``[I_m | -conj(D)]`` built from expansion coefficients ``D``."""

    m: int
    entries: np.ndarray
    permutation: tuple[int, ...] | None = None

    def __post_init__(self):
        e = np.array(self.entries, dtype=np.complex128, copy=True)
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def shape(self):
        return self.entries.shape


@dataclass(frozen=True)
class RangeNullReport:
    equal: bool
    range_in_null: float
    null_in_range: float
    range_dim: int
    null_dim: int


@dataclass(frozen=True)
class ColumnReport:
    independent: bool
    witness: tuple[int, ...] | None
    min_certificate: float
    checked_subsets: int
    strategy: str


@dataclass(frozen=True)
class ReducedBoundCheck:
    """Lower frame bound after an erasure against the excess estimate.

    ``estimate`` is ``A / (a m + 1)``, ``a`` the largest squared expansion
    coefficient; ``operator_estimate`` is ``A / (1 + ||X||^2)`` with ``X`` the
    full coefficient matrix, which is always a valid lower bound.
    """

    erased: tuple[int, ...]
    reduced_lower: float
    full_lower: float
    max_coefficient_sq: float
    estimate: float
    operator_estimate: float


def _choose_subsets(n, k, strategy, budget, trials, seed):
    total = comb(n, k)
    if strategy == "exhaustive" or (strategy == "auto" and total <= budget):
        return "exhaustive", None
    if strategy not in ("auto", "sampled"):
        raise ValueError(f"unknown strategy {strategy!r}")
    return "sampled", _subsets.sample_subsets(n, k, trials, seed)


def _iter_blocks(n, k, sampled):
    if sampled is not None:
        yield sampled
        return
    # Lexicographic enumeration, materialised block by block.
    it = itertools.combinations(range(n), k)
    while True:
        chunk = list(itertools.islice(it, _BLOCK))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.int64).reshape(len(chunk), k)


def is_m_erasure_robust(
    F: Frame,
    m: int,
    strategy: str = "auto",
    budget: int = _subsets.DEFAULT_BUDGET,
    trials: int = 10_000,
    seed: int = 0,
) -> RobustnessReport:
    """Check that every removal of ``m`` vectors leaves a spanning set.

    ``strategy="auto"`` enumerates all ``C(N, m)`` subsets when that count is
    within ``budget`` and otherwise checks ``trials`` seeded random subsets,
    marking the verdict as probabilistic.  The reported failing subset is the
    lexicographically smallest failure among those checked.
    """
    N = F.count
    if not (0 <= m < N):
        raise InvalidM(f"m must satisfy 0 <= m < {N}, got {m}")
    kind, sampled = _choose_subsets(N, m, strategy, budget, trials, seed)
    checked = 0
    worst = np.inf
    failing = None
    for erased in _iter_blocks(N, m, sampled):
        keep = _subsets.complements(erased, N)
        smax, smin = _subsets.span_extremes(F.matrix, keep)
        checked += erased.shape[0]
        worst = min(worst, float(smin.min()))
        ok = _subsets.full_rank_mask(smax, smin, F.tol.rank_tol)
        if failing is None and not ok.all():
            failing = tuple(int(i) for i in erased[np.argmin(ok)])
    return RobustnessReport(
        m=m,
        robust=failing is None,
        checked_subsets=checked,
        failing_subset=failing,
        strategy=kind,
        min_certificate=worst,
        seed=seed if kind == "sampled" else None,
        trials=trials if kind == "sampled" else None,
    )


def robustness_degree(F: Frame) -> int:
    """Largest ``m`` for which ``F`` is ``m``-erasure robust (exhaustive)."""
    m = 0
    while m + 1 <= F.count - F.dim:
        if not is_m_erasure_robust(F, m + 1, strategy="exhaustive").robust:
            break
        m += 1
    return m


def spark(F: Frame, budget: int = _subsets.DEFAULT_BUDGET) -> int:
    """Size of the smallest linearly dependent subset; ``N + 1`` if none exists.

    A frame containing the zero vector has spark 1.
    """
    N, d = F.count, F.dim
    for k in range(1, min(N, d) + 1):
        if comb(N, k) > budget:
            raise SubsetBudgetExceeded(f"C({N},{k}) subsets exceed the budget {budget}")
        for block in _iter_blocks(N, k, None):
            if _subsets.first_failure(F.matrix, block, F.tol.rank_tol, span=False) >= 0:
                return k
    return d + 1 if N > d else N + 1


def _greedy_spanning_subset(F: Frame) -> list[int]:
    kept: list[int] = []
    Q = np.zeros((F.dim, 0), dtype=np.complex128)
    scale = max(1.0, float(np.linalg.norm(F.matrix, 2)))
    for i in range(F.count):
        v = F.matrix[:, i]
        r = v - Q @ (Q.conj().T @ v)
        r = r - Q @ (Q.conj().T @ r)
        nrm = np.linalg.norm(r)
        if nrm > F.tol.rank_tol * scale:
            Q = np.column_stack([Q, r / nrm])
            kept.append(i)
            if len(kept) == F.dim:
                break
    return kept


def excess(F: Frame) -> ExcessReport:
    """Both excess notions.

    ``sup_excess`` is the largest number of vectors whose removal keeps the
    span (N minus the size of a spanning subset found greedily);
    ``uniform_excess`` is the largest ``m`` for which every ``m``-removal keeps
    the span.
    """
    sup = F.count - len(_greedy_spanning_subset(F))
    return ExcessReport(sup_excess=sup, uniform_excess=robustness_degree(F))


def expansion_coefficients(F: Frame, m: int) -> np.ndarray:
    """``D`` (``m x (N - m)``) with ``f_i = sum_j D[i, j] f_{m + j}`` for ``i < m``.

    The last ``N - m`` vectors must form a basis.
    """
    N, d = F.count, F.dim
    if not (0 <= m < N):
        raise InvalidM(f"m must satisfy 0 <= m < {N}, got {m}")
    if N - m != d:
        raise TailNotABasis(f"the last {N - m} vectors cannot be a basis of dimension {d}")
    tail = F.matrix[:, m:]
    smin, smax = span_certificate(tail)
    if smin <= rank_threshold(smax, F.tol.rank_tol):
        raise TailNotABasis(f"the last {N - m} vectors are dependent (sigma_min={smin:.3e})")
    D = np.linalg.solve(tail, F.matrix[:, :m]).T
    residual = np.max(np.abs(tail @ D.T - F.matrix[:, :m])) if m else 0.0
    if residual > F.tol.eq_tol * max(1.0, float(np.abs(F.matrix).max())):
        raise TailNotABasis(f"basis expansion residual {residual:.3e} too large")
    return D


def reorder_tail_basis(F: Frame, m: int) -> tuple[Frame, tuple[int, ...]]:
    """Permute ``F`` so its last ``N - m`` vectors form a basis.

    Returns the permuted frame and the permutation ``perm`` with
    ``new[k] = old[perm[k]]``.  A frame whose tail already is a basis comes
    back unchanged.
    """
    N, d = F.count, F.dim
    if N - m != d:
        raise TailNotABasis(f"a tail of {N - m} vectors cannot be a basis of dimension {d}")
    picked = []
    for i in reversed(range(N)):
        trial = picked + [i]
        smin, smax = span_certificate(F.subset(trial).conj().T)
        if smin > rank_threshold(smax, F.tol.rank_tol):
            picked = trial
            if len(picked) == d:
                break
    if len(picked) < d:
        raise TailNotABasis("no basis among the frame vectors")
    basis = sorted(picked)
    rest = [i for i in range(N) if i not in set(basis)]
    perm = tuple(rest + basis)
    return Frame(F.matrix[:, list(perm)], F.tol), perm


def build_gamma(F: Frame, m: int) -> GammaMatrix:
    """Γ = ``[I_m | -conj(D)]`` whose null space is the range of the analysis operator."""
    if m == 0:
        return GammaMatrix(0, np.zeros((0, F.count), dtype=np.complex128))
    D = expansion_coefficients(F, m)
    return GammaMatrix(m, np.hstack([np.eye(m), -D.conj()]))


def _orthonormal_range(M: np.ndarray, rank_tol: float) -> np.ndarray:
    if M.size == 0:
        return np.zeros((M.shape[0], 0), dtype=np.complex128)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    r = int(np.sum(s > rank_threshold(s[0] if s.size else 0.0, rank_tol)))
    return U[:, :r]


def _orthonormal_null(M: np.ndarray, rank_tol: float) -> np.ndarray:
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=np.complex128)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    r = int(np.sum(s > rank_threshold(s[0], rank_tol)))
    return Vh[r:].conj().T


def verify_range_equals_nullspace(F: Frame, gamma) -> RangeNullReport:
    """Compare the range of the analysis operator with the null space of Γ."""
    G = gamma.entries if isinstance(gamma, GammaMatrix) else np.asarray(gamma, dtype=np.complex128)
    if G.ndim != 2 or G.shape[1] != F.count:
        raise ShapeMismatch(f"Γ has shape {G.shape}, expected ? x {F.count}")
    Q1 = _orthonormal_range(F.matrix.conj().T, F.tol.rank_tol)
    Q2 = _orthonormal_null(G, F.tol.rank_tol)
    r1 = float(np.linalg.norm(Q1 - Q2 @ (Q2.conj().T @ Q1), 2)) if Q1.size else 0.0
    r2 = float(np.linalg.norm(Q2 - Q1 @ (Q1.conj().T @ Q2), 2)) if Q2.size else 0.0
    tol = F.tol.eq_tol
    equal = Q1.shape[1] == Q2.shape[1] and r1 <= tol and r2 <= tol
    return RangeNullReport(bool(equal), r1, r2, Q1.shape[1], Q2.shape[1])


def gamma_columns_independent(
    gamma,
    m: int,
    rank_tol: float = 1e-10,
    strategy: str = "auto",
    budget: int = _subsets.DEFAULT_BUDGET,
    trials: int = 10_000,
    seed: int = 0,
) -> ColumnReport:
    """Check that every ``m`` columns of Γ are linearly independent."""
    G = gamma.entries if isinstance(gamma, GammaMatrix) else np.asarray(gamma, dtype=np.complex128)
    rows, N = G.shape
    if not (0 <= m <= rows) or m > N:
        raise InvalidM(f"m={m} must not exceed the {rows} rows of Γ")
    if m == 0:
        return ColumnReport(True, None, np.inf, 1, "exhaustive")
    kind, sampled = _choose_subsets(N, m, strategy, budget, trials, seed)
    checked = 0
    worst = np.inf
    witness = None
    for block in _iter_blocks(N, m, sampled):
        smax, smin = _kernels.subset_singular_extremes(G, block)
        checked += block.shape[0]
        worst = min(worst, float(smin.min()))
        ok = _subsets.full_rank_mask(smax, smin, rank_tol)
        if witness is None and not ok.all():
            witness = tuple(int(i) for i in block[np.argmin(ok)])
    return ColumnReport(witness is None, witness, worst, checked, kind)


def random_projection(dim: int, rank: int, seed: int) -> np.ndarray:
    """Seeded orthogonal projection of the given rank."""
    Q = random_unitary(dim, seed)[:, :rank]
    return Q @ Q.conj().T


def project_frame(F: Frame, P) -> Frame:
    """``{P f_i}`` as a frame for the range of ``P``, in an orthonormal basis of it."""
    P = np.asarray(P, dtype=np.complex128)
    if P.shape != (F.dim, F.dim):
        raise NotAProjection(f"expected a {F.dim}x{F.dim} matrix, got {P.shape}")
    tol = F.tol.eq_tol
    if np.max(np.abs(P - P.conj().T)) > tol or np.max(np.abs(P @ P - P)) > tol:
        raise NotAProjection("matrix is not an orthogonal projection")
    w, V = np.linalg.eigh((P + P.conj().T) / 2)
    Q = V[:, w > 0.5]
    if Q.shape[1] == 0:
        raise ZeroRange("projection has zero range")
    return Frame.from_matrix(Q.conj().T @ F.matrix, F.tol)


def reduced_bound_check(F: Frame, lam) -> ReducedBoundCheck:
    """Measured lower bound of ``F`` minus ``lam`` against ``A / (a m + 1)``.

    The coefficients ``f_i = sum_{j not in lam} a_ij f_j`` are the
    minimum-norm solution when the remaining vectors are redundant.
    """
    lam = as_erasure(lam, F.count)
    keep = list(lam.complement)
    Fc = F.matrix[:, keep]
    X = np.linalg.lstsq(Fc, F.matrix[:, list(lam.indices)], rcond=None)[0]
    a = float(np.max(np.abs(X) ** 2)) if X.size else 0.0
    A = frame_bounds(F).lower
    smin, _ = span_certificate(Fc)
    m = len(lam)
    op = float(np.linalg.norm(X, 2) ** 2) if X.size else 0.0
    return ReducedBoundCheck(lam.indices, smin**2, A, a, A / (a * m + 1), A / (1 + op))
