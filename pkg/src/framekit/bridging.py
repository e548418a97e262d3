"""Erasure recovery by bridging.

For a dual pair ``(F, G)`` the transmitted coefficients are ``<f, g_i>`` and
``f = sum_i <f, g_i> f_i``.  When the coefficients indexed by ``Λ`` are lost,
each erased dual vector ``g_k`` is replaced by a combination
``g'_k = sum_{l in δ} c_l^(k) g_l`` of received ones, chosen so that
``<f_j, g_k - g'_k> = 0`` for all ``j, k`` in ``Λ``.  The reduced error
operator ``E f = sum_{j in Λ} <f, g_j - g'_j> f_j`` then squares to zero and
the signal is recovered exactly as ``(I + E) f~`` from the bridged partial
reconstruction ``f~``.

A bridge set exists exactly when the received dual vectors ``{g_i}`` outside
``Λ`` still span the space, i.e. when ``Λ`` satisfies the MRC for ``G``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .duals import DualPair
from .errors import IndexOutOfRange, InvalidPlan, MissingCoefficient, NoBridge, OverlappingSets
from .mrc import as_erasure

__all__ = [
    "BridgePlan",
    "ReducedErrorOperator",
    "RandomErasures",
    "BurstErasures",
    "FixedErasures",
    "SignalRecord",
    "ChannelReport",
    "bridge_matrix",
    "solve_bridge",
    "find_bridge_set",
    "reduced_error_operator",
    "bridging_supplement_operator",
    "recover",
    "simulate_channel",
]


@dataclass(frozen=True, eq=False)
class BridgePlan:
    """A solved bridge equation for one erasure set.

    ``coefficients`` is the ``|δ| x |Λ|`` matrix whose column ``k`` holds
    ``c^(λ_k)``; ``replacement_duals`` holds the vectors ``g'_k`` as columns.
    """

    erased: tuple[int, ...]
    delta: tuple[int, ...]
    n: int
    coefficients: np.ndarray
    replacement_duals: np.ndarray
    residual: float
    cross_residual: float
    tol: float

    @property
    def valid(self) -> bool:
        return self.residual <= self.tol and self.cross_residual <= self.tol

    @property
    def C(self) -> np.ndarray:
        return self.coefficients


@dataclass(frozen=True, eq=False)
class ReducedErrorOperator:
    """``E f = sum_{j in Λ} <f, g_j - g'_j> f_j`` as a ``d x d`` matrix."""

    matrix: np.ndarray

    @property
    def nilpotency_residual(self) -> float:
        """Spectral norm of ``E^2``."""
        return float(np.linalg.norm(self.matrix @ self.matrix, 2))


def _ip_matrix(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """``M[r, c] = <x_r, y_c>`` for columns of ``X`` and ``Y``."""
    return X.T @ Y.conj()


def _indices(pair: DualPair, idx: Sequence[int]) -> tuple[int, ...]:
    out = tuple(int(i) for i in idx)
    if any(i < 0 or i >= pair.count for i in out):
        raise IndexOutOfRange(f"indices {out} out of range for {pair.count} vectors")
    if len(set(out)) != len(out):
        raise IndexOutOfRange(f"repeated index in {out}")
    return out


def bridge_matrix(pair: DualPair, lam, delta: Sequence[int]) -> np.ndarray:
    """``Ξ(F, G, Λ, δ)`` with entry ``(r, c) = <f_{λ_r}, g_{δ_c}>``.

    Passing ``delta`` equal to ``Λ`` gives the right-hand side block
    ``Ξ(F, G, Λ, Λ)`` of the bridge equation.
    """
    lam = as_erasure(lam, pair.count)
    delta = _indices(pair, delta)
    if delta != lam.indices and set(delta) & set(lam.indices):
        raise OverlappingSets(f"bridge set {delta} meets the erasure set {lam.indices}")
    return _ip_matrix(pair.primary.matrix[:, list(lam.indices)], pair.dual.matrix[:, list(delta)])


def _solve(pair: DualPair, lam, delta: tuple[int, ...]) -> BridgePlan:
    F, G = pair.primary.matrix, pair.dual.matrix
    tol = pair.primary.tol
    L = list(lam.indices)
    rhs = _ip_matrix(F[:, L], G[:, L])
    if not L:
        empty = np.zeros((len(delta), 0), dtype=np.complex128)
        return BridgePlan((), delta, pair.count, empty, np.zeros((pair.dim, 0), complex), 0.0, 0.0, tol.eq_tol)
    Xi = _ip_matrix(F[:, L], G[:, list(delta)])
    if delta:
        X = np.linalg.lstsq(Xi, rhs, rcond=tol.rank_tol)[0]
    else:
        X = np.zeros((0, len(L)), dtype=np.complex128)
    residual = float(np.max(np.abs(Xi @ X - rhs)))
    # The displayed unknowns are conj(c); store c itself.
    C = X.conj()
    G_rep = G[:, list(delta)] @ C
    cross = float(np.max(np.abs(rhs - _ip_matrix(F[:, L], G_rep))))
    return BridgePlan(lam.indices, delta, pair.count, C, G_rep, residual, cross, tol.eq_tol)


def solve_bridge(pair: DualPair, lam, delta: Sequence[int]) -> BridgePlan:
    """Minimum-norm least-squares solution of the bridge equation for ``δ``.

    Raises :class:`NoBridge` when the residual exceeds ``eq_tol``.
    """
    lam = as_erasure(lam, pair.count)
    delta = _indices(pair, delta)
    if set(delta) & set(lam.indices):
        raise OverlappingSets(f"bridge set {delta} meets the erasure set {lam.indices}")
    plan = _solve(pair, lam, delta)
    if not plan.valid:
        raise NoBridge(
            f"bridge set {delta} does not solve the bridge equation for {lam.indices} "
            f"(residual {max(plan.residual, plan.cross_residual):.3e})",
            residual=max(plan.residual, plan.cross_residual),
        )
    return plan


def find_bridge_set(pair: DualPair, lam, budget: int = 100_000) -> BridgePlan:
    """First valid bridge set, searching by size and then lexicographically.

    The whole complement is tried first: if it fails no subset of it can
    succeed and :class:`NoBridge` is raised.  When the ordered search would
    exceed ``budget`` candidate sets, the complement itself is returned.
    """
    lam = as_erasure(lam, pair.count)
    if not lam.indices:
        return _solve(pair, lam, ())
    comp = lam.complement
    full = _solve(pair, lam, comp)
    if not full.valid:
        raise NoBridge(
            f"no bridge set exists for {lam.indices}: the received dual vectors do not span",
            residual=max(full.residual, full.cross_residual),
        )
    tried = 0
    for size in range(1, len(comp)):
        for delta in itertools.combinations(comp, size):
            tried += 1
            if tried > budget:
                return full
            plan = _solve(pair, lam, delta)
            if plan.valid:
                return plan
    return full


def _check_plan(pair: DualPair, plan: BridgePlan):
    if plan.n != pair.count or plan.replacement_duals.shape[0] != pair.dim:
        raise InvalidPlan("plan was built for a different dual pair")
    if not plan.valid:
        raise InvalidPlan("plan residuals exceed tolerance")


def bridging_supplement_operator(pair: DualPair, plan: BridgePlan) -> np.ndarray:
    """Matrix of ``B f = sum_{j in Λ} <f, g'_j> f_j``."""
    FL = pair.primary.matrix[:, list(plan.erased)]
    return FL @ plan.replacement_duals.conj().T


def reduced_error_operator(pair: DualPair, plan: BridgePlan) -> ReducedErrorOperator:
    """The reduced error operator of a plan; equals ``I - R - B``."""
    L = list(plan.erased)
    FL = pair.primary.matrix[:, L]
    W = pair.dual.matrix[:, L] - plan.replacement_duals
    return ReducedErrorOperator(FL @ W.conj().T)


def _coefficients(received, n: int) -> np.ndarray:
    if isinstance(received, Mapping):
        c = np.full(n, np.nan, dtype=np.complex128)
        for i, v in received.items():
            i = int(i)
            if not 0 <= i < n:
                raise IndexOutOfRange(f"coefficient index {i} out of range")
            c[i] = v
        return c
    c = np.array([np.nan if v is None else v for v in received], dtype=np.complex128)
    if c.shape != (n,):
        raise MissingCoefficient(f"expected {n} coefficient slots, got {c.shape[0]}")
    return c


def recover(pair: DualPair, plan: BridgePlan, received) -> np.ndarray:
    """Reconstruct ``f`` from the coefficients ``<f, g_i>`` received outside ``Λ``.

    ``received`` is either a length-``N`` sequence with ``None``/NaN at lost
    positions or a mapping from index to coefficient.  Values at erased
    positions are ignored.
    """
    _check_plan(pair, plan)
    c = _coefficients(received, pair.count)
    lam = as_erasure(plan.erased, pair.count)
    keep = list(lam.complement)
    missing = [i for i in keep if not np.isfinite(c[i])]
    if missing:
        raise MissingCoefficient(f"coefficients {missing} outside the erasure set are missing")
    F = pair.primary.matrix
    f_tilde = F[:, keep] @ c[keep]
    if plan.erased:
        bridged = plan.coefficients.conj().T @ c[list(plan.delta)]
        f_tilde = f_tilde + F[:, list(plan.erased)] @ bridged
        f_tilde = f_tilde + reduced_error_operator(pair, plan).matrix @ f_tilde
    return f_tilde


@dataclass(frozen=True)
class RandomErasures:
    """Each coefficient is lost independently with probability ``p``."""

    p: float
    seed: int = 0


@dataclass(frozen=True)
class BurstErasures:
    """Positions ``start .. start + length - 1`` are lost (clipped to the frame)."""

    start: int
    length: int


@dataclass(frozen=True)
class FixedErasures:
    indices: tuple[int, ...] = ()


@dataclass(frozen=True)
class SignalRecord:
    index: int
    erased: tuple[int, ...]
    status: str
    delta: tuple[int, ...] | None = None
    rel_error: float | None = None


@dataclass(frozen=True)
class ChannelReport:
    records: tuple[SignalRecord, ...]
    summary: dict = field(default_factory=dict)


def _draw(model, n: int, rng) -> tuple[int, ...]:
    if isinstance(model, RandomErasures):
        return tuple(int(i) for i in np.flatnonzero(rng.random(n) < model.p))
    if isinstance(model, BurstErasures):
        return tuple(range(max(model.start, 0), min(model.start + model.length, n)))
    if isinstance(model, FixedErasures):
        return tuple(sorted(set(int(i) for i in model.indices)))
    raise TypeError(f"unknown erasure model {model!r}")


def simulate_channel(pair: DualPair, signals, model) -> ChannelReport:
    """Send each signal's coefficients through an erasure channel and recover it.

    Records are in signal order; a given model and seed always produce the
    same report.
    """
    rng = np.random.default_rng(model.seed if isinstance(model, RandomErasures) else 0)
    plans: dict[tuple[int, ...], BridgePlan | None] = {}
    records = []
    G = pair.dual.matrix
    for idx, f in enumerate(signals):
        f = np.asarray(f, dtype=np.complex128)
        erased = _draw(model, pair.count, rng)
        if len(erased) >= pair.count:
            records.append(SignalRecord(idx, erased, "lost"))
            continue
        if erased not in plans:
            try:
                plans[erased] = find_bridge_set(pair, erased)
            except NoBridge:
                plans[erased] = None
        plan = plans[erased]
        if plan is None:
            records.append(SignalRecord(idx, erased, "no_bridge"))
            continue
        c = G.conj().T @ f
        c[list(erased)] = np.nan
        f_hat = recover(pair, plan, c)
        scale = np.linalg.norm(f)
        err = float(np.linalg.norm(f_hat - f) / (scale if scale > 0 else 1.0))
        records.append(SignalRecord(idx, erased, "recovered", plan.delta, err))
    recovered = [r for r in records if r.status == "recovered"]
    summary = {
        "signals": len(records),
        "recovered": len(recovered),
        "no_bridge": sum(r.status == "no_bridge" for r in records),
        "lost": sum(r.status == "lost" for r in records),
        "max_rel_error": max((r.rel_error for r in recovered), default=0.0),
        "bridge_sizes": sorted({len(r.delta) for r in recovered}),
    }
    return ChannelReport(tuple(records), summary)
