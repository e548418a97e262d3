"""Naimark dilation and the 1-erasure characterizations built on it.

A frame ``F`` with frame operator ``S`` has the Parseval rescaling
``Φ = S^{-1/2} F``.  Its analysis map ``V = Φ^H`` is an isometry of the
``d``-dimensional ambient space into ``C^N`` and ``P = V V^H`` is an
orthogonal projection with ``P e_i = V φ_i`` on the standard basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Frame, frame_operator, psd_power, rank_threshold, span_certificate
from .errors import DimensionMismatch, NotOrthonormal, NumericalError

__all__ = [
    "Dilation",
    "OneErasureCertificate",
    "ComplementWitness",
    "EquivalentForm",
    "naimark_dilate",
    "onb_projection_frame",
    "one_erasure_certificate",
    "complement_witness",
    "norm_identity_check",
    "unitary_equivalent_form",
    "frames_unitarily_equivalent",
    "MAX_ATTEMPTS",
]

MAX_ATTEMPTS = 64


@dataclass(frozen=True, eq=False)
class Dilation:
    """``P`` acting on ``C^N`` with the standard basis as ``onb``.

    ``embedding`` is the ``N x d`` isometry ``V``, ``complement`` an
    orthonormal basis (columns) of the range of ``I - P`` and ``parseval``
    the synthesis matrix of ``S^{-1/2} F``.
    """

    big_dim: int
    onb: np.ndarray
    projection: np.ndarray
    embedding: np.ndarray
    complement: np.ndarray
    parseval: np.ndarray
    tol: object

    @property
    def rank(self) -> int:
        return self.embedding.shape[1]

    def idempotency_residual(self) -> float:
        P = self.projection
        return float(np.linalg.norm(P @ P - P, 2))

    def selfadjoint_residual(self) -> float:
        P = self.projection
        return float(np.linalg.norm(P - P.conj().T, 2))

    def image_residual(self) -> float:
        """``max_i ||P e_i - V S^{-1/2} f_i||``."""
        diff = self.projection @ self.onb - self.embedding @ self.parseval
        return float(np.max(np.linalg.norm(diff, axis=0)))


@dataclass(frozen=True, eq=False)
class OneErasureCertificate:
    """Either an all-nonzero dependence ``sum a_i f_i = 0`` or a witness index.

    When present, ``coefficients`` is scaled so that ``a_0 = 1``.  When
    absent, removing vector ``witness`` drops the rank, so every dependence
    vanishes there; ``witness_sigma`` is the certifying singular value.
    """

    present: bool
    coefficients: np.ndarray | None = None
    residual: float = 0.0
    min_abs: float = 0.0
    attempts: int = 0
    witness: int | None = None
    witness_sigma: float | None = None


@dataclass(frozen=True, eq=False)
class ComplementWitness:
    """A vector in the range of ``I - P`` with every coordinate nonzero, if any."""

    present: bool
    vector: np.ndarray | None = None
    min_abs: float = 0.0
    attempts: int = 0
    witness: int | None = None
    witness_sigma: float | None = None


@dataclass(frozen=True, eq=False)
class EquivalentForm:
    frame: Frame
    equivalent: bool
    residual: float


def naimark_dilate(F: Frame) -> Dilation:
    """Dilate ``F`` to the projection of the standard basis of ``C^N``."""
    S = frame_operator(F)
    phi = psd_power(S, -0.5, F.tol.rank_tol) @ F.matrix
    V = phi.conj().T
    # Complete an orthonormal basis of range(V) to one of C^N; P is built
    # from the basis rather than from V so that P e_i = V φ_i is a real check.
    U, _, _ = np.linalg.svd(V)
    Q, W = U[:, : F.dim], U[:, F.dim:]
    N = F.count
    return Dilation(N, np.eye(N, dtype=np.complex128), Q @ Q.conj().T, V, W, phi, F.tol)


def onb_projection_frame(D: Dilation) -> Frame:
    """``{P e_i}`` in the coordinates of the orthonormal basis ``V`` of the range of ``P``."""
    coords = D.embedding.conj().T @ D.projection @ D.onb
    return Frame.from_matrix(coords, D.tol)


def _rational_weights(k: int, attempt: int) -> np.ndarray:
    rng = np.random.default_rng(attempt)
    num = rng.integers(1, 98, size=k) * rng.choice([-1, 1], size=k)
    den = rng.integers(1, 98, size=k)
    return num / den


def _nonvanishing_combination(Z: np.ndarray, eq_tol: float):
    """Search ``Z w`` with no zero entry; returns (vector, min_abs, attempts)."""
    if Z.shape[1] == 0:
        return None, 0.0, 0
    for attempt in range(1, MAX_ATTEMPTS + 1):
        a = Z @ _rational_weights(Z.shape[1], attempt - 1)
        a = a / np.max(np.abs(a))
        lo = float(np.min(np.abs(a)))
        if lo > eq_tol:
            return a, lo, attempt
    return None, 0.0, MAX_ATTEMPTS


def _rank_witness(A: np.ndarray, rank_tol: float):
    """Column whose removal leaves the remaining columns rank deficient, if any."""
    _, smax = span_certificate(A)
    thr = rank_threshold(smax, rank_tol)
    best, best_sigma = None, np.inf
    for i in range(A.shape[1]):
        s, _ = span_certificate(np.delete(A, i, axis=1))
        if s < best_sigma:
            best, best_sigma = i, s
    if best is not None and best_sigma <= thr:
        return best, float(best_sigma)
    return None, None


def _null_basis(A: np.ndarray, real: bool, rank_tol: float) -> np.ndarray:
    M = A.real if real else A
    _, s, Vh = np.linalg.svd(M)
    rank = int(np.sum(s > rank_threshold(s[0] if s.size else 0.0, rank_tol)))
    return Vh[rank:].conj().T.astype(np.complex128)


def one_erasure_certificate(F: Frame) -> OneErasureCertificate:
    """All-nonzero scalars ``a_i`` with ``sum_i a_i f_i = 0``, or a certified absence.

    Such scalars exist exactly when the frame survives any single erasure.
    """
    Z = _null_basis(F.matrix, F.is_real, F.tol.rank_tol)
    a, lo, attempts = _nonvanishing_combination(Z, F.tol.eq_tol)
    if a is not None:
        a = a / a[0]
        res = float(np.linalg.norm(F.matrix @ a))
        return OneErasureCertificate(True, a, res, float(np.min(np.abs(a))), attempts)
    i, sigma = _rank_witness(F.matrix, F.tol.rank_tol)
    if i is None:
        raise NumericalError(
            f"no nonvanishing dependence found in {attempts} attempts and no rank witness"
        )
    return OneErasureCertificate(False, attempts=attempts, witness=i, witness_sigma=sigma)


def complement_witness(D: Dilation) -> ComplementWitness:
    """``f`` in the range of ``I - P`` with ``<f, e_i> != 0`` for every ``i``.

    Its coordinate vector is a dependence of the projected basis ``{P e_i}``.
    """
    f, lo, attempts = _nonvanishing_combination(D.complement, D.tol.eq_tol)
    if f is not None:
        return ComplementWitness(True, f, lo, attempts)
    i, sigma = _rank_witness(D.parseval, D.tol.rank_tol)
    if i is None:
        raise NumericalError(
            f"no nonvanishing complement vector found in {attempts} attempts and no rank witness"
        )
    return ComplementWitness(False, attempts=attempts, witness=i, witness_sigma=sigma)


def norm_identity_check(F: Frame) -> float:
    """Largest deviation in ``||f_j||^2 = sum_i |<V f_i, e_j>|^2`` over ``j``.

    Also folds in the identification ``S^{1/2} V^H P e_i = f_i``.
    """
    D = naimark_dilate(F)
    embedded = D.embedding @ F.matrix
    lhs = np.sum(np.abs(F.matrix) ** 2, axis=0)
    rhs = np.sum(np.abs(embedded) ** 2, axis=1)
    S_half = psd_power(frame_operator(F), 0.5, F.tol.rank_tol)
    back = S_half @ D.embedding.conj().T @ D.projection @ D.onb
    ident = float(np.max(np.abs(back - F.matrix)))
    return max(float(np.max(np.abs(lhs - rhs))), ident)


def _gram_residual(A: np.ndarray, B: np.ndarray) -> float:
    return float(np.max(np.abs(A.conj().T @ A - B.conj().T @ B)))


def frames_unitarily_equivalent(F1: Frame, F2: Frame) -> tuple[bool, float]:
    """Gramian equality of two frames with the same number of vectors."""
    if F1.count != F2.count:
        raise DimensionMismatch(f"frames have {F1.count} and {F2.count} vectors")
    r = _gram_residual(F1.matrix, F2.matrix)
    return r <= max(F1.tol.eq_tol, F2.tol.eq_tol), r


def unitary_equivalent_form(F: Frame, phi) -> EquivalentForm:
    """Normal form ``{sum_j <e_i, V φ_j> e_j}`` of the Parseval rescaling of ``F``.

    ``phi`` holds an orthonormal basis of the ambient space as columns.  The
    result lives in the span of the first ``d`` standard vectors and is
    compared to ``S^{-1/2} F`` by Gramians.
    """
    phi = np.asarray(phi, dtype=np.complex128)
    if phi.shape != (F.dim, F.dim):
        raise DimensionMismatch(f"expected a {F.dim}x{F.dim} basis, got shape {phi.shape}")
    dev = float(np.max(np.abs(phi.conj().T @ phi - np.eye(F.dim))))
    if dev > F.tol.eq_tol:
        raise NotOrthonormal(f"basis deviates from orthonormal by {dev:.3e}")
    D = naimark_dilate(F)
    # Coordinate j of the i-th vector is conj((V φ_j)_i).
    form = (D.embedding @ phi).conj().T
    r = _gram_residual(form, D.parseval)
    return EquivalentForm(F.with_matrix(form), r <= F.tol.eq_tol, r)
