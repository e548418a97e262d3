"""Frames in finite-dimensional inner-product spaces.

A frame is stored through its synthesis matrix: a ``dim x N`` complex array
whose columns are the frame vectors.  The analysis matrix is the conjugate
transpose, so the frame operator is ``F @ F^H`` and the Gramian is
``F^H @ F``.  Inner products are linear in the first slot and conjugate-linear
in the second, ``<x, y> = sum(x * conj(y))``.

Rank and invertibility verdicts use one relative singular value rule
throughout the package::

    full rank  <=>  sigma_min > rank_tol * max(sigma_max, 1)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidShape, NotAFrame, NumericallySingular

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "Frame",
    "FrameBounds",
    "validate_frame",
    "analysis",
    "synthesis",
    "frame_operator",
    "frame_bounds",
    "gramian",
    "random_frame",
    "random_unitary",
    "apply_operator",
    "inv_sqrt_psd",
    "psd_power",
    "rank_threshold",
    "is_full_rank",
    "span_certificate",
    "fixture",
    "E2",
    "M3",
    "U3",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances attached to a frame.

    ``rank_tol`` is a relative singular value threshold used for rank and
    invertibility decisions; ``eq_tol`` is an absolute residual threshold for
    equality checks.
    """

    rank_tol: float = 1e-10
    eq_tol: float = 1e-8

    def __post_init__(self):
        if not (self.rank_tol > 0 and self.eq_tol > 0):
            raise ValueError("rank_tol and eq_tol must be positive")
        if not (np.isfinite(self.rank_tol) and np.isfinite(self.eq_tol)):
            raise ValueError("tolerances must be finite")


DEFAULT_TOL = ToleranceConfig()


def rank_threshold(sigma_max: float, rank_tol: float) -> float:
    """Singular value threshold below which a matrix is treated as singular."""
    return rank_tol * max(float(sigma_max), 1.0)


def is_full_rank(sigma_min: float, sigma_max: float, rank_tol: float) -> bool:
    return float(sigma_min) > rank_threshold(sigma_max, rank_tol)


def span_certificate(matrix: np.ndarray) -> tuple[float, float]:
    """Return ``(sigma_min, sigma_max)`` for the spanning test of ``matrix``.

    ``sigma_min`` is the ``rows``-th singular value, i.e. zero whenever the
    matrix has fewer columns than rows.
    """
    rows, cols = matrix.shape
    if cols == 0:
        return 0.0, 0.0
    s = np.linalg.svd(matrix, compute_uv=False)
    smax = float(s[0])
    smin = float(s[rows - 1]) if cols >= rows else 0.0
    return smin, smax


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float

    @property
    def is_tight(self) -> bool:
        return np.isclose(self.lower, self.upper, rtol=0, atol=1e-8 * max(1.0, self.upper))


@dataclass(frozen=True, eq=False)
class Frame:
    """An immutable finite frame.

    Use :func:`validate_frame` (or :meth:`Frame.from_matrix`) to build one;
    the constructor itself does not check the spanning property.
    """

    matrix: np.ndarray
    tol: ToleranceConfig = field(default=DEFAULT_TOL)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128, copy=True)
        if m.ndim != 2:
            raise InvalidShape("synthesis matrix must be two-dimensional")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, matrix, tol: ToleranceConfig = DEFAULT_TOL) -> "Frame":
        """Validate a ``dim x N`` synthesis matrix and wrap it."""
        m = np.asarray(matrix)
        if m.ndim != 2:
            raise InvalidShape("synthesis matrix must be two-dimensional")
        return validate_frame(list(m.T), tol)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def count(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return self.count

    @property
    def vectors(self) -> list[np.ndarray]:
        return [self.matrix[:, i] for i in range(self.count)]

    @property
    def is_real(self) -> bool:
        return not np.any(self.matrix.imag)

    def subset(self, indices: Sequence[int]) -> np.ndarray:
        """Synthesis matrix restricted to the given column indices."""
        return self.matrix[:, list(indices)]

    def with_matrix(self, matrix) -> "Frame":
        """A validated frame with new vectors but the same tolerances."""
        return Frame.from_matrix(matrix, self.tol)

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return (
            self.tol == other.tol
            and self.matrix.shape == other.matrix.shape
            and bool(np.array_equal(self.matrix, other.matrix))
        )

    def __hash__(self):
        return hash((self.matrix.shape, self.matrix.tobytes(), self.tol))

    def __repr__(self):
        return f"Frame(dim={self.dim}, count={self.count})"


def validate_frame(vectors, tol: ToleranceConfig = DEFAULT_TOL) -> Frame:
    """Build a :class:`Frame` from a list of vectors, checking they span.

    Raises
    ------
    DimensionMismatch
        If the list is empty or the vectors do not share one length.
    NotAFrame
        If the vectors span a proper subspace.
    """
    vecs = [np.atleast_1d(np.asarray(v, dtype=np.complex128)) for v in vectors]
    if not vecs:
        raise DimensionMismatch("a frame needs at least one vector")
    dims = {v.shape for v in vecs}
    if len(dims) != 1 or vecs[0].ndim != 1:
        for i, v in enumerate(vecs):
            if v.shape != vecs[0].shape or v.ndim != 1:
                raise DimensionMismatch(
                    f"vector {i} has shape {v.shape}, expected {vecs[0].shape}"
                )
    dim = vecs[0].shape[0]
    if dim == 0:
        raise DimensionMismatch("vectors must have positive length")
    matrix = np.stack(vecs, axis=1)
    if not np.all(np.isfinite(matrix)):
        raise DimensionMismatch("vectors contain NaN or infinite entries")
    smin, smax = span_certificate(matrix)
    if not is_full_rank(smin, smax, tol.rank_tol):
        s = np.linalg.svd(matrix, compute_uv=False)
        rank = int(np.sum(s > rank_threshold(smax, tol.rank_tol)))
        raise NotAFrame(rank, smin, dim)
    return Frame(matrix, tol)


def _as_vector(F: Frame, f) -> np.ndarray:
    v = np.asarray(f, dtype=np.complex128)
    if v.shape != (F.dim,):
        raise DimensionMismatch(f"expected a vector of length {F.dim}, got shape {v.shape}")
    return v


def analysis(F: Frame, f) -> np.ndarray:
    """Coefficients ``<f, f_i>`` for every frame vector."""
    return F.matrix.conj().T @ _as_vector(F, f)


def synthesis(F: Frame, c) -> np.ndarray:
    """``sum_i c_i f_i``."""
    c = np.asarray(c, dtype=np.complex128)
    if c.shape != (F.count,):
        raise DimensionMismatch(f"expected {F.count} coefficients, got shape {c.shape}")
    return F.matrix @ c


def frame_operator(F: Frame) -> np.ndarray:
    """The ``dim x dim`` frame operator ``S = sum_i f_i f_i^H``."""
    return F.matrix @ F.matrix.conj().T


def frame_bounds(F: Frame) -> FrameBounds:
    """Optimal frame bounds: extreme eigenvalues of the frame operator."""
    w = np.linalg.eigvalsh(frame_operator(F))
    return FrameBounds(float(max(w[0], 0.0)), float(w[-1]))


def gramian(F: Frame) -> np.ndarray:
    """``N x N`` Gramian with entry ``(k, i) = <f_i, f_k>``."""
    return F.matrix.conj().T @ F.matrix


def psd_power(S: np.ndarray, power: float, rank_tol: float = DEFAULT_TOL.rank_tol) -> np.ndarray:
    """Real power of a Hermitian positive definite matrix.

    Eigenvalues are clamped at ``rank_tol`` times the largest one; a matrix
    whose smallest eigenvalue falls under the clamp raises
    :class:`NumericallySingular` for negative powers.
    """
    w, V = np.linalg.eigh((S + S.conj().T) / 2)
    floor = rank_threshold(w[-1], rank_tol)
    if power < 0 and w[0] <= floor:
        raise NumericallySingular(f"smallest eigenvalue {w[0]:.3e} below {floor:.3e}")
    w = np.maximum(w, floor)
    return (V * w**power) @ V.conj().T


def inv_sqrt_psd(S: np.ndarray, rank_tol: float = DEFAULT_TOL.rank_tol) -> np.ndarray:
    """``S^{-1/2}`` for Hermitian positive definite ``S``."""
    return psd_power(S, -0.5, rank_tol)


def apply_operator(F: Frame, T: np.ndarray) -> Frame:
    """The frame ``{T f_i}`` for an invertible ``dim x dim`` operator ``T``."""
    return F.with_matrix(np.asarray(T, dtype=np.complex128) @ F.matrix)


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(dim: int, seed: int, field: str = "complex") -> np.ndarray:
    """Haar-distributed unitary (orthogonal when ``field="real"``).

    The QR factor is normalised so that ``R`` has a positive real diagonal,
    which makes the output a deterministic function of the seed.
    """
    rng = np.random.default_rng(seed)
    if field == "real":
        X = rng.standard_normal((dim, dim))
    else:
        X = _complex_gaussian(rng, (dim, dim))
    Q, R = np.linalg.qr(X)
    d = np.diag(R)
    phases = d / np.abs(d)
    return Q * phases


def random_frame(
    dim: int,
    count: int,
    seed: int,
    kind: str = "generic",
    field: str = "complex",
    tol: ToleranceConfig = DEFAULT_TOL,
) -> Frame:
    """Seeded random frame of ``count`` vectors in dimension ``dim``.

    ``kind`` is one of ``generic`` (i.i.d. standard Gaussian entries),
    ``parseval`` (generic frame mapped through ``S^{-1/2}``) or ``tight``
    (a Parseval frame scaled by a constant drawn from ``[0.5, 3]``).
    """
    if not (isinstance(dim, (int, np.integer)) and isinstance(count, (int, np.integer))):
        raise InvalidShape("dim and count must be integers")
    if dim < 1 or count < dim:
        raise InvalidShape(f"need count >= dim >= 1, got dim={dim}, count={count}")
    if kind not in ("generic", "parseval", "tight"):
        raise InvalidShape(f"unknown frame kind {kind!r}")
    if field not in ("real", "complex"):
        raise InvalidShape(f"unknown field {field!r}")
    rng = np.random.default_rng(seed)
    if field == "real":
        M = rng.standard_normal((dim, count)).astype(np.complex128)
    else:
        M = _complex_gaussian(rng, (dim, count))
    if kind != "generic":
        M = inv_sqrt_psd(M @ M.conj().T, tol.rank_tol) @ M
        if kind == "tight":
            M = M * rng.uniform(0.5, 3.0)
    return validate_frame(list(M.T), tol)


_FIXTURES = {
    "E2": [[1.0, 0.0], [0.0, 1.0]],
    "M3": [[1.0, 0.0], [-0.5, np.sqrt(3) / 2], [-0.5, -np.sqrt(3) / 2]],
    "U3": [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
}


def fixture(name: str, tol: ToleranceConfig = DEFAULT_TOL) -> Frame:
    """Named built-in frames.

    ``E2`` is the standard basis of C^2, ``M3`` the Mercedes-Benz frame and
    ``U3`` is ``{e1, e2, e1 + e2}``.
    """
    try:
        vecs = _FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(_FIXTURES)}") from None
    return validate_frame(vecs, tol)


E2 = fixture("E2")
M3 = fixture("M3")
U3 = fixture("U3")
