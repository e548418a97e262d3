import numpy as np
import pytest

from framekit.core import fixture, random_frame, random_unitary
from framekit.duals import (
    DualPair,
    DualPerturbation,
    canonical_dual,
    is_dual_pair,
    pairs_unitarily_equivalent,
    perturbation_basis,
    perturbation_residual,
    perturbed_dual,
    random_dual_perturbation,
    transform_pair,
)
from framekit.errors import InvalidPerturbation, NoFreedom

# exact: S^{-1} U3 for S = [[2, 1], [1, 2]]
G3 = np.array([[2, -1, 1], [-1, 2, 1]]) / 3


def test_canonical_dual_basis(E2):
    assert canonical_dual(E2).dual == E2


def test_canonical_dual_mercedes(M3):
    np.testing.assert_allclose(canonical_dual(M3).dual.matrix, (2 / 3) * M3.matrix, atol=1e-15)


def test_canonical_dual_u3(U3):
    np.testing.assert_allclose(canonical_dual(U3).dual.matrix, G3, atol=1e-15)


def test_is_dual_pair(E2, U3, U3_pair):
    assert is_dual_pair(E2, E2)[0]
    ok, r = is_dual_pair(U3, U3_pair.dual)
    assert ok and r < 1e-14
    ok, r = is_dual_pair(U3, U3)
    assert not ok and r > 1


def test_zero_perturbation(U3_pair):
    p = perturbed_dual(U3_pair, DualPerturbation.zero(U3_pair.primary))
    assert p.dual == U3_pair.dual


def test_nullspace_perturbation(U3, U3_pair):
    a = np.array([1, 1, -1])
    v = np.array([0.3 - 1j, 2.0])
    u = DualPerturbation(np.outer(v, a))
    assert perturbation_residual(U3, u) < 1e-15
    p = perturbed_dual(U3_pair, u)
    assert is_dual_pair(U3, p.dual)[0]
    assert p.dual != U3_pair.dual


def test_basis_admits_no_perturbation(E2):
    pair = DualPair(E2, E2)
    with pytest.raises(InvalidPerturbation):
        perturbed_dual(pair, DualPerturbation(np.array([[0.1, 0], [0, 0]])))


def test_random_perturbation(U3):
    u = random_dual_perturbation(U3, seed=1)
    assert perturbation_residual(U3, u) <= 1e-8
    assert np.linalg.norm(u.matrix) > 0.1
    np.testing.assert_array_equal(u.matrix, random_dual_perturbation(U3, seed=1).matrix)


def test_random_perturbation_basis(E2):
    with pytest.raises(NoFreedom):
        random_dual_perturbation(E2, seed=0)


def test_random_perturbation_real_frame(U3):
    assert not np.any(random_dual_perturbation(U3, seed=5).matrix.imag)


def test_perturbation_basis(U3):
    Z = perturbation_basis(U3)
    assert Z.shape == (3, 1)
    z = Z[:, 0] / Z[0, 0]
    np.testing.assert_allclose(z, [1, 1, -1], atol=1e-14)


def test_perturbation_from_vectors():
    u = DualPerturbation.from_vectors([[1, 0], [0, 1], [1, 1]])
    assert u.matrix.shape == (2, 3)
    np.testing.assert_allclose(u.scaled(2).matrix, 2 * u.matrix)


def test_pairs_equivalent_self(U3_pair):
    assert pairs_unitarily_equivalent(U3_pair, U3_pair)


def test_pairs_equivalent_unitary():
    F = random_frame(3, 5, seed=2)
    p = perturbed_dual(canonical_dual(F), random_dual_perturbation(F, seed=3))
    U = random_unitary(3, seed=9)
    q = transform_pair(p, U)
    assert pairs_unitarily_equivalent(p, q)
    assert is_dual_pair(q.primary, q.dual)[0]


def test_pairs_not_equivalent(U3_pair, M3_pair):
    assert not pairs_unitarily_equivalent(M3_pair, U3_pair)


def test_swapped_pair_is_dual(U3_pair):
    s = U3_pair.swapped()
    assert is_dual_pair(s.primary, s.dual)[0]
    assert s.swapped() == U3_pair
