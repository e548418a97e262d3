"""The minimal redundancy condition (MRC) and partial reconstruction.

An erasure set ``Λ`` satisfies the MRC for a frame when the vectors outside
``Λ`` still span the space.  Indices are 0-based throughout the library.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import Frame, FrameBounds, frame_operator, rank_threshold, span_certificate
from .duals import DualPair, DualPerturbation, perturbation_residual
from .errors import DimensionMismatch, HypothesisViolated, IndexOutOfRange, InvalidPerturbation
from . import subsets as _subsets

__all__ = [
    "ErasureSet",
    "MrcVerdict",
    "InvertibilityVerdict",
    "as_erasure",
    "satisfies_mrc",
    "mrc_sweep",
    "invertibility",
    "partial_frame_operator",
    "partial_reconstruction",
    "partial_reconstruction_operator",
    "canonical_mrc_operator",
    "perturbed_dual_mrc_operator",
    "MARGIN",
]

# Verdicts whose certificate lies within this factor of the threshold are marginal.
MARGIN = 10.0


@dataclass(frozen=True)
class ErasureSet:
    """Strictly increasing erased indices ``Λ`` out of ``n`` frame positions."""

    indices: tuple[int, ...]
    n: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise IndexOutOfRange(f"erasure indices must be strictly increasing: {idx}")
        if idx and (idx[0] < 0 or idx[-1] >= self.n):
            raise IndexOutOfRange(f"erasure indices {idx} out of range for {self.n} vectors")
        if len(idx) >= self.n:
            raise IndexOutOfRange("cannot erase every frame vector")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, indices: Iterable[int], n: int) -> "ErasureSet":
        """Sorts and deduplicates before validating."""
        return cls(tuple(sorted(set(int(i) for i in indices))), n)

    @property
    def complement(self) -> tuple[int, ...]:
        erased = set(self.indices)
        return tuple(i for i in range(self.n) if i not in erased)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


def as_erasure(lam, n: int) -> ErasureSet:
    if isinstance(lam, ErasureSet):
        if lam.n != n:
            raise IndexOutOfRange(f"erasure set is for {lam.n} vectors, frame has {n}")
        return lam
    return ErasureSet.of(lam, n)


def _is_marginal(certificate: float, threshold: float) -> bool:
    return threshold / MARGIN <= certificate <= threshold * MARGIN


@dataclass(frozen=True)
class MrcVerdict:
    satisfied: bool
    certificate: float
    threshold: float
    reduced_bounds: FrameBounds | None = None
    erased: tuple[int, ...] = ()

    @property
    def marginal(self) -> bool:
        return _is_marginal(self.certificate, self.threshold)


@dataclass(frozen=True)
class InvertibilityVerdict:
    invertible: bool
    sigma_min: float
    sigma_max: float
    threshold: float

    @property
    def marginal(self) -> bool:
        return _is_marginal(self.sigma_min, self.threshold)


def invertibility(M: np.ndarray, rank_tol: float) -> InvertibilityVerdict:
    """Relative-threshold invertibility test of a square matrix."""
    s = np.linalg.svd(M, compute_uv=False)
    thr = rank_threshold(s[0], rank_tol)
    return InvertibilityVerdict(bool(s[-1] > thr), float(s[-1]), float(s[0]), thr)


def satisfies_mrc(F: Frame, lam) -> MrcVerdict:
    """Whether the frame vectors outside ``lam`` span the space.

    The certificate is the smallest relevant singular value of the reduced
    synthesis matrix; when satisfied, the reduced frame's optimal bounds are
    reported as well.
    """
    lam = as_erasure(lam, F.count)
    smin, smax = span_certificate(F.subset(lam.complement))
    thr = rank_threshold(smax, F.tol.rank_tol)
    ok = smin > thr
    bounds = FrameBounds(smin**2, smax**2) if ok else None
    return MrcVerdict(bool(ok), smin, thr, bounds, lam.indices)


def mrc_sweep(F: Frame, size: int) -> list[MrcVerdict]:
    """MRC verdicts for every erasure set of the given size, in lexicographic order."""
    if size < 0 or size >= F.count:
        raise IndexOutOfRange(f"erasure size {size} invalid for {F.count} vectors")
    erased = _subsets.combinations_array(F.count, size)
    keep = _subsets.complements(erased, F.count)
    smax, smin = _subsets.span_extremes(F.matrix, keep)
    out = []
    for row, hi, lo in zip(erased, smax, smin):
        thr = rank_threshold(hi, F.tol.rank_tol)
        ok = lo > thr
        out.append(
            MrcVerdict(bool(ok), float(lo), thr, FrameBounds(lo**2, hi**2) if ok else None,
                       tuple(int(i) for i in row))
        )
    return out


def partial_frame_operator(F: Frame, lam) -> np.ndarray:
    """``sum_{i not in lam} f_i f_i^H``."""
    lam = as_erasure(lam, F.count)
    Fc = F.subset(lam.complement)
    return Fc @ Fc.conj().T


def partial_reconstruction_operator(pair: DualPair, lam) -> np.ndarray:
    """Matrix of ``R f = sum_{i not in lam} <f, g_i> f_i``."""
    lam = as_erasure(lam, pair.count)
    keep = list(lam.complement)
    return pair.primary.matrix[:, keep] @ pair.dual.matrix[:, keep].conj().T


def partial_reconstruction(pair: DualPair, lam, c) -> np.ndarray:
    """``sum_{i not in lam} c_i f_i``; entries of ``c`` at erased positions are ignored.

    ``c`` is the full coefficient vector ``<f, g_i>``; erased entries may hold
    anything, including NaN.
    """
    lam = as_erasure(lam, pair.count)
    c = np.asarray(c, dtype=np.complex128)
    if c.shape != (pair.count,):
        raise DimensionMismatch(f"expected {pair.count} coefficients, got shape {c.shape}")
    keep = list(lam.complement)
    return pair.primary.matrix[:, keep] @ c[keep]


def _inverse_frame_operator(F: Frame) -> np.ndarray:
    return np.linalg.inv(frame_operator(F))


def canonical_mrc_operator(F: Frame, lam) -> np.ndarray:
    """``I - sum_{i in lam} <., f_i> S^{-1} f_i``.

    Invertible exactly when ``lam`` satisfies the MRC for the canonical dual.
    """
    lam = as_erasure(lam, F.count)
    FL = F.subset(lam.indices)
    return np.eye(F.dim) - _inverse_frame_operator(F) @ FL @ FL.conj().T


def perturbed_dual_mrc_operator(F: Frame, h: DualPerturbation, lam) -> np.ndarray:
    """Four-term operator whose invertibility decides the MRC for ``{S^{-1} f_i + h_i}``.

    With ``S`` the frame operator, ``A_X = sum_{i in X} f_i f_i^H`` and
    ``h`` the dual perturbation, the operator is::

        (I - S^{-1} A_lam) S^{-1}
          - sum_{lam} h_i f_i^H S^{-1}
          - S^{-1} sum_{lam} f_i h_i^H
          + sum_{not lam} h_i h_i^H

    and equals the reduced frame operator of the perturbed dual.  ``lam`` must
    satisfy the MRC for ``F``.
    """
    lam = as_erasure(lam, F.count)
    r = perturbation_residual(F, h)
    if r > F.tol.eq_tol:
        raise InvalidPerturbation(r, F.tol.eq_tol)
    if not satisfies_mrc(F, lam).satisfied:
        raise HypothesisViolated(f"erasure set {lam.indices} does not satisfy the MRC for F")
    S_inv = _inverse_frame_operator(F)
    FL = F.subset(lam.indices)
    HL = h.matrix[:, list(lam.indices)]
    Hc = h.matrix[:, list(lam.complement)]
    I = np.eye(F.dim)
    return (
        (I - S_inv @ FL @ FL.conj().T) @ S_inv
        - HL @ FL.conj().T @ S_inv
        - S_inv @ FL @ HL.conj().T
        + Hc @ Hc.conj().T
    )
