"""Seeded property suites over random instances.

Each suite draws its instances from ``np.random.default_rng([seed, tag])`` so
results depend only on the seed, and returns a :class:`SuiteResult` whose
payload is free of timings.  ``verify-all`` runs every suite in order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np

from .bridging import find_bridge_set, recover, reduced_error_operator
from .core import Frame, apply_operator, random_frame, random_unitary
from .dilation import complement_witness, naimark_dilate, norm_identity_check, onb_projection_frame, one_erasure_certificate
from .duals import DualPair, DualPerturbation, canonical_dual, perturbed_dual, random_dual_perturbation
from .errors import NoBridge
from .io import canonical_json, frame_from_dict, frame_to_dict
from .mrc import invertibility, mrc_sweep, perturbed_dual_mrc_operator, satisfies_mrc
from .robustness import (
    build_gamma,
    excess,
    gamma_columns_independent,
    is_m_erasure_robust,
    reduced_bound_check,
    spark,
    verify_range_equals_nullspace,
)

__all__ = ["SuiteResult", "SUITES", "run_suite", "run_all"]

_KINDS = ("generic", "parseval", "tight", "duplicate")
_MAX_EXAMPLES = 5


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checked: int
    failures: int
    excluded: int = 0
    details: dict = field(default_factory=dict)
    examples: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f", {self.excluded} marginal excluded" if self.excluded else ""
        return f"{status} {self.name}: {self.checked - self.failures}/{self.checked} ok{extra}"


class _Tally:
    def __init__(self):
        self.checked = 0
        self.failures = 0
        self.excluded = 0
        self.examples = []

    def check(self, ok: bool, example=None):
        self.checked += 1
        if not ok:
            self.failures += 1
            if example is not None and len(self.examples) < _MAX_EXAMPLES:
                self.examples.append(example)

    def result(self, name, passed=None, **details) -> SuiteResult:
        if passed is None:
            passed = self.failures == 0 and self.checked > 0
        return SuiteResult(name, bool(passed), self.checked, self.failures, self.excluded,
                           details, self.examples)


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), tag])


def _draw_frame(rng, dmin=2, dmax=6, extra=(0, 4), kind=None) -> tuple[Frame, dict]:
    d = int(rng.integers(dmin, dmax + 1))
    N = d + int(rng.integers(extra[0], extra[1] + 1))
    kind = kind or _KINDS[int(rng.integers(len(_KINDS)))]
    s = int(rng.integers(2**31))
    if kind == "duplicate" and N > d:
        F = random_frame(d, N, s)
        M = F.matrix.copy()
        M[:, -1] = M[:, 0]
        F = F.with_matrix(M)
    else:
        kind = "generic" if kind == "duplicate" else kind
        F = random_frame(d, N, s, kind=kind)
    return F, {"dim": d, "count": N, "kind": kind, "seed": s}


def _isolated_frame(rng) -> tuple[Frame, dict]:
    """A frame with one vector outside the span of the others."""
    d = int(rng.integers(2, 6))
    N = d + int(rng.integers(1, 4))
    s = int(rng.integers(2**31))
    M = np.zeros((d, N), dtype=np.complex128)
    M[: d - 1, : N - 1] = random_frame(d - 1, N - 1, s).matrix
    M[d - 1, N - 1] = 1.0
    return Frame.from_matrix(M), {"dim": d, "count": N, "kind": "isolated", "seed": s}


# -- suites -----------------------------------------------------------------


def suite_mrc_duality(seed: int = 0, count: int = 200) -> SuiteResult:
    """MRC verdicts of a frame and its canonical dual agree."""
    rng = _rng(seed, 1)
    t = _Tally()
    for _ in range(count):
        F, info = _draw_frame(rng)
        G = canonical_dual(F).dual
        for size in range(F.count - F.dim + 1):
            for a, b in zip(mrc_sweep(F, size), mrc_sweep(G, size)):
                if a.marginal or b.marginal:
                    t.excluded += 1
                    continue
                t.check(a.satisfied == b.satisfied, {**info, "erased": a.erased})
    total = t.checked + t.excluded
    frac = t.excluded / total if total else 0.0
    return t.result("mrc-duality", t.failures == 0 and frac < 0.01, marginal_fraction=frac)


def suite_unitary_invariance(seed: int = 0, count: int = 100) -> SuiteResult:
    """MRC and robustness verdicts are unchanged by a unitary."""
    rng = _rng(seed, 2)
    t = _Tally()
    for _ in range(count):
        F, info = _draw_frame(rng)
        U = random_unitary(F.dim, int(rng.integers(2**31)))
        UF = apply_operator(F, U)
        for size in range(F.count):
            for a, b in zip(mrc_sweep(F, size), mrc_sweep(UF, size)):
                t.excluded += a.marginal or b.marginal
                t.check(a.satisfied == b.satisfied, {**info, "erased": a.erased})
        for m in range(F.count - F.dim + 1):
            r1, r2 = is_m_erasure_robust(F, m), is_m_erasure_robust(UF, m)
            t.check(r1.robust == r2.robust, {**info, "m": m})
    return t.result("unitary-invariance")


def _zeroing_perturbation(F: Frame, k: int) -> DualPerturbation | None:
    """Perturbation whose dual has ``g_k = 0``; needs ``F`` without ``k`` to span."""
    keep = [i for i in range(F.count) if i != k]
    Fk = F.matrix[:, keep]
    if np.linalg.matrix_rank(Fk) < F.dim:
        return None
    G = np.zeros_like(F.matrix)
    G[:, keep] = np.linalg.solve(Fk @ Fk.conj().T, Fk)
    base = np.linalg.solve(F.matrix @ F.matrix.conj().T, F.matrix)
    return DualPerturbation(G - base)


def suite_operator_criteria(seed: int = 0, count: int = 100) -> SuiteResult:
    """Invertibility of the four-term operator decides the MRC for a perturbed dual."""
    rng = _rng(seed, 3)
    t = _Tally()
    worst_identity = 0.0
    identity_checked = 0
    for idx in range(count):
        F, info = _draw_frame(rng, dmax=5, extra=(1, 4))
        if idx % 2:
            k = int(rng.integers(F.count))
            h = _zeroing_perturbation(F, k)
            info["perturbation"] = f"zeroing:{k}"
        else:
            h = None
        if h is None:
            s = int(rng.integers(2**31))
            h = random_dual_perturbation(F, s, scale=float(rng.uniform(0.2, 2.0)))
            info["perturbation"] = f"random:{s}"
        G = perturbed_dual(canonical_dual(F), h).dual
        for size in range(F.count - F.dim + 1):
            for lam in combinations(range(F.count), size):
                if not satisfies_mrc(F, lam).satisfied:
                    continue
                T = perturbed_dual_mrc_operator(F, h, lam)
                keep = [i for i in range(F.count) if i not in lam]
                Gc = G.matrix[:, keep]
                res = float(np.max(np.abs(T - Gc @ Gc.conj().T)))
                worst_identity = max(worst_identity, res)
                identity_checked += 1
                t.check(res <= 1e-8, {**info, "erased": lam, "identity_residual": res})
                inv = invertibility(T, F.tol.rank_tol)
                direct = satisfies_mrc(G, lam)
                if inv.marginal or direct.marginal:
                    t.excluded += 1
                    continue
                t.check(inv.invertible == direct.satisfied, {**info, "erased": lam})
    return t.result("operator-criteria", max_identity_residual=worst_identity,
                    identity_checks=identity_checked)


def _full_spark_frames(seed: int, count: int):
    rng = _rng(seed, 4)
    for _ in range(count):
        d = int(rng.integers(2, 7))
        N = d + int(rng.integers(1, 5))
        s = int(rng.integers(2**31))
        yield random_frame(d, N, s), {"dim": d, "count": N, "seed": s}


def suite_gamma_nullspace(seed: int = 0, count: int = 100) -> SuiteResult:
    """The analysis range equals the null space of Γ, with equal dimensions."""
    t = _Tally()
    worst = 0.0
    for F, info in _full_spark_frames(seed, count):
        m = F.count - F.dim
        t.check(spark(F) == F.dim + 1, {**info, "check": "full spark"})
        rep = verify_range_equals_nullspace(F, build_gamma(F, m))
        worst = max(worst, rep.range_in_null, rep.null_in_range)
        ok = (rep.range_in_null <= 1e-8 and rep.null_in_range <= 1e-8
              and rep.range_dim == rep.null_dim == F.dim)
        t.check(ok, {**info, "range_in_null": rep.range_in_null, "null_in_range": rep.null_in_range})
    return t.result("gamma-nullspace", max_residual=worst)


def suite_gamma_columns(seed: int = 0, count: int = 100) -> SuiteResult:
    """Every m columns of Γ are independent, exhaustively."""
    t = _Tally()
    worst = np.inf
    for F, info in _full_spark_frames(seed, count):
        m = F.count - F.dim
        rep = gamma_columns_independent(build_gamma(F, m), m, strategy="exhaustive")
        worst = min(worst, rep.min_certificate)
        t.check(rep.independent and rep.min_certificate > 1e-10,
                {**info, "witness": rep.witness, "certificate": rep.min_certificate})
    return t.result("gamma-columns", min_certificate=worst)


def _excess_frames(seed: int, count: int):
    rng = _rng(seed, 6)
    for i in range(count):
        if i % 5 == 4:
            yield _isolated_frame(rng)
        else:
            yield _draw_frame(rng, dmax=5)


def suite_excess_robustness(seed: int = 0, count: int = 150) -> SuiteResult:
    """Uniform excess at least m exactly when the frame is m-erasure robust."""
    t = _Tally()
    for F, info in _excess_frames(seed, count):
        u = excess(F).uniform_excess
        for m in range(F.count):
            rep = is_m_erasure_robust(F, m, strategy="exhaustive")
            t.check((u >= m) == rep.robust, {**info, "m": m, "uniform_excess": u})
    return t.result("excess-robustness")


def suite_excess_bound(seed: int = 0, count: int = 150) -> SuiteResult:
    """Reduced lower bound against ``A / (a m + 1)`` after every admissible erasure."""
    t = _Tally()
    operator_ok = 0
    operator_checked = 0
    worst_ratio = np.inf
    for F, info in _excess_frames(seed, count):
        u = excess(F).uniform_excess
        for m in range(1, u + 1):
            for lam in combinations(range(F.count), m):
                rep = reduced_bound_check(F, lam)
                operator_checked += 1
                operator_ok += rep.reduced_lower >= rep.operator_estimate - 1e-8
                if rep.estimate > 0:
                    worst_ratio = min(worst_ratio, rep.reduced_lower / rep.estimate)
                t.check(rep.reduced_lower >= rep.estimate - 1e-8,
                        {**info, "erased": lam, "reduced_lower": rep.reduced_lower,
                         "estimate": rep.estimate})
    return t.result("excess-bound", operator_bound_held=operator_ok,
                    operator_bound_checked=operator_checked,
                    worst_ratio=worst_ratio if np.isfinite(worst_ratio) else None)


def suite_bridging(seed: int = 0, count: int = 100, signals: int = 100) -> SuiteResult:
    """Bridge sets exist exactly under the MRC and recover signals exactly."""
    rng = _rng(seed, 7)
    t = _Tally()
    agree_dual = 0
    instances = 0
    worst_err = 0.0
    worst_nil = 0.0
    for idx in range(count):
        F, info = _draw_frame(rng, dmax=5, extra=(1, 4), kind="generic")
        if idx % 2:
            s = int(rng.integers(2**31))
            pair = perturbed_dual(canonical_dual(F), random_dual_perturbation(F, s, float(rng.uniform(0.2, 1.5))))
            info["dual"] = f"perturbed:{s}"
        else:
            pair = canonical_dual(F)
            info["dual"] = "canonical"
        sizes = [int(rng.integers(1, F.count - F.dim + 1)), int(rng.integers(1, F.count))]
        for size in sizes:
            lam = tuple(sorted(int(i) for i in rng.choice(F.count, size, replace=False)))
            mrc = satisfies_mrc(F, lam).satisfied
            agree_dual += mrc == satisfies_mrc(pair.dual, lam).satisfied
            instances += 1
            try:
                plan = find_bridge_set(pair, lam)
            except NoBridge:
                t.check(not mrc, {**info, "erased": lam, "found": False})
                continue
            t.check(mrc, {**info, "erased": lam, "found": True})
            nil = reduced_error_operator(pair, plan).nilpotency_residual
            worst_nil = max(worst_nil, nil)
            t.check(nil <= 1e-8, {**info, "erased": lam, "nilpotency": nil})
            X = (rng.standard_normal((F.dim, signals)) + 1j * rng.standard_normal((F.dim, signals)))
            C = pair.dual.matrix.conj().T @ X
            C[list(lam)] = np.nan
            errs = [np.linalg.norm(recover(pair, plan, C[:, j]) - X[:, j]) / np.linalg.norm(X[:, j])
                    for j in range(signals)]
            worst_err = max(worst_err, max(errs))
            t.check(max(errs) <= 1e-8, {**info, "erased": lam, "rel_error": max(errs)})
    return t.result("bridging", max_rel_error=worst_err, max_nilpotency=worst_nil,
                    dual_mrc_agreement=f"{agree_dual}/{instances}")


def suite_one_erasure(seed: int = 0, count: int = 200, engineered: int = 20) -> SuiteResult:
    """Certificate, 1-erasure robustness and complement witness coincide."""
    rng = _rng(seed, 8)
    t = _Tally()
    present = 0
    frames = [_draw_frame(rng) for _ in range(count)] + [_isolated_frame(rng) for _ in range(engineered)]
    for F, info in frames:
        cert = one_erasure_certificate(F)
        robust = is_m_erasure_robust(F, 1).robust if F.count > 1 else False
        D = naimark_dilate(F)
        wit = complement_witness(D)
        proj = one_erasure_certificate(onb_projection_frame(D))
        present += cert.present
        ok = cert.present == robust == wit.present == proj.present
        if cert.present:
            ok = ok and cert.residual <= F.tol.eq_tol
        t.check(ok, {**info, "certificate": cert.present, "robust": robust, "witness": wit.present})
    return t.result("one-erasure", certificates_present=present)


def suite_dilation_fidelity(seed: int = 0, count: int = 100) -> SuiteResult:
    """Projection images, idempotency and the norm identity."""
    rng = _rng(seed, 9)
    t = _Tally()
    worst = {"image": 0.0, "idempotency": 0.0, "norm_identity": 0.0}
    for _ in range(count):
        F, info = _draw_frame(rng)
        D = naimark_dilate(F)
        r = {"image": D.image_residual(), "idempotency": D.idempotency_residual(),
             "norm_identity": norm_identity_check(F)}
        for k, v in r.items():
            worst[k] = max(worst[k], v)
        t.check(max(r.values()) <= 1e-8, {**info, **r})
    return t.result("dilation-fidelity", **{f"max_{k}": v for k, v in worst.items()})


def suite_round_trip(seed: int = 0, count: int = 100) -> SuiteResult:
    """Frame JSON survives serialization bit for bit."""
    rng = _rng(seed, 10)
    t = _Tally()
    for i in range(count):
        F, info = _draw_frame(rng)
        if i % 2:
            F = F.with_matrix(F.matrix.real)
        back = frame_from_dict(json.loads(canonical_json(frame_to_dict(F))))
        t.check(back == F, info)
    return t.result("round-trip")


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "mrc-duality": suite_mrc_duality,
    "unitary-invariance": suite_unitary_invariance,
    "operator-criteria": suite_operator_criteria,
    "gamma-nullspace": suite_gamma_nullspace,
    "gamma-columns": suite_gamma_columns,
    "excess-robustness": suite_excess_robustness,
    "excess-bound": suite_excess_bound,
    "bridging": suite_bridging,
    "one-erasure": suite_one_erasure,
    "dilation-fidelity": suite_dilation_fidelity,
    "round-trip": suite_round_trip,
}


def run_suite(name: str, seed: int = 0, **kw) -> SuiteResult:
    return SUITES[name](seed=seed, **kw)


def run_all(seed: int = 0, only=None) -> list[SuiteResult]:
    names = only or list(SUITES)
    return [run_suite(n, seed) for n in names]
