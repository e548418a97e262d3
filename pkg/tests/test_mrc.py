import numpy as np
import pytest

from framekit.core import fixture, frame_operator, random_frame
from framekit.duals import (
    DualPair,
    DualPerturbation,
    canonical_dual,
    perturbed_dual,
    random_dual_perturbation,
)
from framekit.errors import HypothesisViolated, IndexOutOfRange, InvalidPerturbation
from framekit.mrc import (
    ErasureSet,
    canonical_mrc_operator,
    invertibility,
    mrc_sweep,
    partial_frame_operator,
    partial_reconstruction,
    partial_reconstruction_operator,
    perturbed_dual_mrc_operator,
    satisfies_mrc,
)


def test_erasure_set_validation():
    lam = ErasureSet((0, 2), 4)
    assert lam.complement == (1, 3)
    assert list(lam) == [0, 2] and len(lam) == 2
    assert ErasureSet.of([2, 0, 2], 4).indices == (0, 2)
    with pytest.raises(IndexOutOfRange):
        ErasureSet((2, 0), 4)
    with pytest.raises(IndexOutOfRange):
        ErasureSet((4,), 4)
    with pytest.raises(IndexOutOfRange):
        ErasureSet((0, 1), 2)


def test_mrc_examples(E2, M3, U3):
    assert not satisfies_mrc(E2, [0]).satisfied
    v = satisfies_mrc(M3, [0])
    assert v.satisfied
    # remaining pair of Mercedes vectors: S = diag(1/2, 3/2)
    assert v.reduced_bounds.lower == pytest.approx(0.5)
    assert v.reduced_bounds.upper == pytest.approx(1.5)
    assert not satisfies_mrc(U3, [0, 1]).satisfied
    assert satisfies_mrc(U3, []).satisfied


def test_mrc_not_marginal(E2, M3):
    assert not satisfies_mrc(E2, [0]).marginal
    assert not satisfies_mrc(M3, [0]).marginal


def test_mrc_sweep_order(U3):
    out = mrc_sweep(U3, 2)
    assert [v.erased for v in out] == [(0, 1), (0, 2), (1, 2)]
    assert [v.satisfied for v in out] == [False, False, False]
    assert all(v.satisfied for v in mrc_sweep(U3, 1))


def test_mrc_sweep_matches_single(rng):
    F = random_frame(3, 6, seed=4)
    for v in mrc_sweep(F, 3):
        w = satisfies_mrc(F, v.erased)
        assert v.satisfied == w.satisfied
        assert v.certificate == pytest.approx(w.certificate, rel=1e-12)


def test_partial_frame_operator(E2, U3):
    np.testing.assert_allclose(partial_frame_operator(E2, []), np.eye(2))
    np.testing.assert_allclose(partial_frame_operator(U3, [2]), np.eye(2))
    np.testing.assert_allclose(partial_frame_operator(E2, [0]), np.diag([0, 1]))


def test_partial_reconstruction_empty(U3_pair):
    f = np.array([0.3, -2j])
    c = U3_pair.dual.matrix.conj().T @ f
    np.testing.assert_allclose(partial_reconstruction(U3_pair, [], c), f, atol=1e-14)


def test_partial_reconstruction_u3(U3_pair):
    a, b = 1.5, -0.5 + 1j
    f = np.array([a, b])
    c = U3_pair.dual.matrix.conj().T @ f
    c[2] = np.nan
    G = U3_pair.dual.matrix
    expected = np.array([np.vdot(G[:, 0], f), np.vdot(G[:, 1], f)])
    np.testing.assert_allclose(partial_reconstruction(U3_pair, [2], c), expected, atol=1e-14)
    R = partial_reconstruction_operator(U3_pair, [2])
    np.testing.assert_allclose(R @ f, expected, atol=1e-14)


def test_partial_reconstruction_coordinate_drop(E2):
    np.testing.assert_allclose(partial_reconstruction(DualPair(E2, E2), [0], [1, 1]), [0, 1])


def test_canonical_operator(E2, M3, U3):
    np.testing.assert_allclose(canonical_mrc_operator(U3, []), np.eye(2))
    T = canonical_mrc_operator(M3, [0])
    np.testing.assert_allclose(T, np.diag([1 / 3, 1]), atol=1e-15)
    assert invertibility(T, 1e-10).invertible
    T = canonical_mrc_operator(E2, [0])
    np.testing.assert_allclose(T, np.diag([0, 1]))
    assert not invertibility(T, 1e-10).invertible


def test_perturbed_operator_zero_h(U3):
    h = DualPerturbation.zero(U3)
    T = perturbed_dual_mrc_operator(U3, h, [2])
    S_inv = np.linalg.inv(frame_operator(U3))
    np.testing.assert_allclose(T, canonical_mrc_operator(U3, [2]) @ S_inv, atol=1e-14)
    Gc = canonical_dual(U3).dual.matrix[:, :2]
    np.testing.assert_allclose(T, Gc @ Gc.T, atol=1e-14)


def test_perturbed_operator_random(U3):
    h = random_dual_perturbation(U3, seed=1)
    G = perturbed_dual(canonical_dual(U3), h).dual
    T = perturbed_dual_mrc_operator(U3, h, [2])
    assert invertibility(T, 1e-10).invertible == satisfies_mrc(G, [2]).satisfied
    Gc = G.matrix[:, :2]
    np.testing.assert_allclose(T, Gc @ Gc.conj().T, atol=1e-12)


def test_perturbed_operator_dependent_duals(U3):
    # with h_i = a_i v, a = (1, 1, -1), choosing v = -g_1 annihilates g_1
    G3 = canonical_dual(U3).dual.matrix
    h = DualPerturbation(np.outer(-G3[:, 0], [1, 1, -1]))
    G = perturbed_dual(canonical_dual(U3), h).dual
    np.testing.assert_allclose(G.matrix[:, 0], 0, atol=1e-15)
    T = perturbed_dual_mrc_operator(U3, h, [2])
    assert not invertibility(T, 1e-10).invertible
    assert not satisfies_mrc(G, [2]).satisfied


def test_perturbed_operator_errors(U3, E2):
    with pytest.raises(InvalidPerturbation):
        perturbed_dual_mrc_operator(U3, DualPerturbation(np.ones((2, 3))), [2])
    with pytest.raises(HypothesisViolated):
        perturbed_dual_mrc_operator(U3, DualPerturbation.zero(U3), [0, 1])
