"""Dual frames: the canonical dual, perturbed duals and equivalence of pairs.

Every dual of a frame ``F`` has the form ``{S^{-1} f_i + u_i}`` where the
perturbation ``u`` satisfies ``sum_i <f, u_i> f_i = 0`` for all ``f``.  In
matrix terms ``F @ U^H = 0``: the rows of the perturbation's synthesis
matrix are orthogonal to the rows of ``F``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Frame, apply_operator, frame_operator, rank_threshold
from .errors import DimensionMismatch, InvalidPerturbation, NoFreedom, NumericallySingular

__all__ = [
    "DualPair",
    "DualPerturbation",
    "canonical_dual",
    "is_dual_pair",
    "dual_residual",
    "perturbed_dual",
    "perturbation_residual",
    "random_dual_perturbation",
    "perturbation_basis",
    "pairs_unitarily_equivalent",
    "transform_pair",
]


@dataclass(frozen=True, eq=False)
class DualPair:
    primary: Frame
    dual: Frame

    @property
    def dim(self) -> int:
        return self.primary.dim

    @property
    def count(self) -> int:
        return self.primary.count

    def swapped(self) -> "DualPair":
        """The same pair with the roles of the two frames exchanged."""
        return DualPair(self.dual, self.primary)

    def __eq__(self, other):
        if not isinstance(other, DualPair):
            return NotImplemented
        return self.primary == other.primary and self.dual == other.dual


@dataclass(frozen=True, eq=False)
class DualPerturbation:
    """Synthesis matrix (``dim x N``) of the perturbation vectors ``u_i``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128, copy=True)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_vectors(cls, vectors) -> "DualPerturbation":
        return cls(np.stack([np.asarray(v, dtype=np.complex128) for v in vectors], axis=1))

    @classmethod
    def zero(cls, F: Frame) -> "DualPerturbation":
        return cls(np.zeros_like(F.matrix))

    def scaled(self, factor) -> "DualPerturbation":
        return DualPerturbation(self.matrix * factor)


def _check_same_shape(F: Frame, G: Frame):
    if F.dim != G.dim or F.count != G.count:
        raise DimensionMismatch(
            f"frames have shapes {F.dim}x{F.count} and {G.dim}x{G.count}"
        )


def dual_residual(F: Frame, G: Frame) -> float:
    """Spectral norm of ``Theta_G^* Theta_F - I``."""
    _check_same_shape(F, G)
    return float(np.linalg.norm(G.matrix @ F.matrix.conj().T - np.eye(F.dim), 2))


def is_dual_pair(F: Frame, G: Frame) -> tuple[bool, float]:
    """Whether ``f = sum_i <f, f_i> g_i`` holds for every ``f``, with the residual."""
    r = dual_residual(F, G)
    return r <= F.tol.eq_tol, r


def canonical_dual(F: Frame) -> DualPair:
    """``(F, {S^{-1} f_i})``."""
    S = frame_operator(F)
    w = np.linalg.eigvalsh(S)
    if w[0] <= rank_threshold(w[-1], F.tol.rank_tol):
        raise NumericallySingular(f"frame operator is not invertible (min eigenvalue {w[0]:.3e})")
    return DualPair(F, F.with_matrix(np.linalg.solve(S, F.matrix)))


def perturbation_residual(F: Frame, u: DualPerturbation) -> float:
    """Spectral norm of ``Theta_F^* Theta_u``; zero for a valid perturbation."""
    if u.matrix.shape != F.matrix.shape:
        raise DimensionMismatch(
            f"perturbation has shape {u.matrix.shape}, frame has {F.matrix.shape}"
        )
    return float(np.linalg.norm(F.matrix @ u.matrix.conj().T, 2))


def perturbed_dual(pair: DualPair, u: DualPerturbation) -> DualPair:
    """The dual ``{S^{-1} f_i + u_i}`` of ``pair.primary``.

    Raises :class:`InvalidPerturbation` if ``u`` violates its constraint.
    """
    F = pair.primary
    r = perturbation_residual(F, u)
    if r > F.tol.eq_tol:
        raise InvalidPerturbation(r, F.tol.eq_tol)
    base = canonical_dual(F).dual
    return DualPair(F, base.with_matrix(base.matrix + u.matrix))


def perturbation_basis(F: Frame) -> np.ndarray:
    """Orthonormal basis (columns, ``N x (N - dim)``) of the kernel of the synthesis map.

    A perturbation is valid exactly when the conjugate of each of its rows
    lies in the span of these columns.
    """
    _, s, Vh = np.linalg.svd(F.matrix)
    rank = F.dim
    return Vh[rank:].conj().T


def random_dual_perturbation(F: Frame, seed: int, scale: float = 1.0) -> DualPerturbation:
    """Seeded perturbation: a Gaussian block with rows projected off ``F``'s row space."""
    if F.count == F.dim:
        raise NoFreedom("a basis has only its canonical dual")
    rng = np.random.default_rng(seed)
    X = (rng.standard_normal(F.matrix.shape) + 1j * rng.standard_normal(F.matrix.shape)) / np.sqrt(2)
    if F.is_real:
        X = X.real.astype(np.complex128)
    # Rows of X (I - F^+ F) are orthogonal to the rows of F.
    P = np.eye(F.count) - np.linalg.pinv(F.matrix) @ F.matrix
    return DualPerturbation(scale * (X @ P))


def transform_pair(pair: DualPair, U: np.ndarray) -> DualPair:
    """``(UF, UG)`` for a unitary ``U``."""
    return DualPair(apply_operator(pair.primary, U), apply_operator(pair.dual, U))


def pairs_unitarily_equivalent(p1: DualPair, p2: DualPair) -> bool:
    """Whether ``(F', G') = (UF, UG)`` for some unitary ``U``.

    Decided by comparing the three cross Gramians ``F^H F``, ``G^H G`` and
    ``F^H G`` of both pairs.
    """
    if p1.count != p2.count:
        raise DimensionMismatch(f"pairs have {p1.count} and {p2.count} vectors")
    tol = max(p1.primary.tol.eq_tol, p2.primary.tol.eq_tol)

    def grams(p):
        F, G = p.primary.matrix, p.dual.matrix
        return F.conj().T @ F, G.conj().T @ G, F.conj().T @ G

    return all(np.max(np.abs(a - b)) <= tol for a, b in zip(grams(p1), grams(p2)))
