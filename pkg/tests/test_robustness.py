import numpy as np
import pytest

from framekit.core import Frame, fixture, frame_bounds, random_frame
from framekit.errors import InvalidM, NotAProjection, ShapeMismatch, TailNotABasis, ZeroRange
from framekit.robustness import (
    GammaMatrix,
    build_gamma,
    excess,
    expansion_coefficients,
    gamma_columns_independent,
    is_m_erasure_robust,
    project_frame,
    random_projection,
    reduced_bound_check,
    reorder_tail_basis,
    robustness_degree,
    spark,
    verify_range_equals_nullspace,
)

E1E1E2E3 = Frame.from_matrix(np.array([[1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]))


def test_robust_examples(E2, M3, U3):
    r = is_m_erasure_robust(E2, 1)
    assert not r.robust and r.failing_subset == (0,)
    r = is_m_erasure_robust(M3, 1)
    assert r.robust and r.checked_subsets == 3 and r.failing_subset is None
    assert is_m_erasure_robust(U3, 1).robust
    r = is_m_erasure_robust(U3, 2)
    assert not r.robust and r.failing_subset == (0, 1)


def test_robust_exhaustive_count():
    F = random_frame(3, 7, seed=1)
    r = is_m_erasure_robust(F, 3)
    assert r.strategy == "exhaustive" and r.checked_subsets == 35 and not r.probabilistic


def test_robust_sampled():
    F = random_frame(4, 20, seed=2)
    r = is_m_erasure_robust(F, 8, budget=1000, trials=300, seed=5)
    assert r.strategy == "sampled" and r.probabilistic
    assert r.robust and r.seed == 5 and r.checked_subsets <= 300
    assert is_m_erasure_robust(F, 8, budget=1000, trials=300, seed=5) == r


def test_robust_invalid_m(U3):
    with pytest.raises(InvalidM):
        is_m_erasure_robust(U3, 3)
    with pytest.raises(InvalidM):
        is_m_erasure_robust(U3, -1)


def test_spark():
    assert spark(fixture("E2")) == 3
    assert spark(fixture("M3")) == 3
    assert spark(Frame.from_matrix(np.array([[1, 1, 0], [0, 0, 1]]))) == 2
    assert spark(random_frame(3, 6, seed=0)) == 4


def test_excess():
    for name, sup, uni in [("E2", 0, 0), ("M3", 1, 1)]:
        ex = excess(fixture(name))
        assert (ex.sup_excess, ex.uniform_excess) == (sup, uni)
    ex = excess(E1E1E2E3)
    assert (ex.sup_excess, ex.uniform_excess) == (1, 0)
    assert robustness_degree(random_frame(2, 5, seed=3)) == 3


def test_expansion_coefficients(U3, M3, E2):
    np.testing.assert_allclose(expansion_coefficients(U3, 1), [[-1, 1]], atol=1e-14)
    np.testing.assert_allclose(expansion_coefficients(M3, 1), [[-1, -1]], atol=1e-14)
    with pytest.raises(TailNotABasis):
        expansion_coefficients(E2, 1)


def test_expansion_complex_residual():
    F = random_frame(3, 5, seed=6)
    D = expansion_coefficients(F, 2)
    np.testing.assert_allclose(F.matrix[:, :2], F.matrix[:, 2:] @ D.T, atol=1e-12)


def test_build_gamma(U3, M3):
    np.testing.assert_allclose(build_gamma(U3, 1).entries, [[1, 1, -1]], atol=1e-14)
    np.testing.assert_allclose(build_gamma(M3, 1).entries, [[1, 1, 1]], atol=1e-14)
    g = build_gamma(M3, 0)
    assert g.shape == (0, 3)


def test_gamma_conjugation():
    F = random_frame(2, 3, seed=8)
    g = build_gamma(F, 1)
    # Γ annihilates every analysis vector (<f, f_i>)_i
    f = np.array([0.4 - 1j, 2 + 0.5j])
    np.testing.assert_allclose(g.entries @ (F.matrix.conj().T @ f), 0, atol=1e-12)


def test_range_null(U3, M3):
    assert verify_range_equals_nullspace(U3, build_gamma(U3, 1)).equal
    assert verify_range_equals_nullspace(M3, build_gamma(M3, 1)).equal
    rep = verify_range_equals_nullspace(U3, build_gamma(M3, 1))
    assert not rep.equal and rep.range_dim == rep.null_dim == 2
    with pytest.raises(ShapeMismatch):
        verify_range_equals_nullspace(U3, GammaMatrix(1, np.ones((1, 4))))


def test_gamma_columns(U3, M3):
    assert gamma_columns_independent(build_gamma(U3, 1), 1).independent
    assert gamma_columns_independent(build_gamma(M3, 1), 1).independent
    rep = gamma_columns_independent(GammaMatrix(1, np.array([[1, 0, -1]])), 1)
    assert not rep.independent and rep.witness == (1,)
    with pytest.raises(InvalidM):
        gamma_columns_independent(build_gamma(U3, 1), 2)


def test_reorder_tail_basis():
    F = Frame.from_matrix(np.array([[1, 0, 1, 2], [0, 1, 0, 0]]))
    G, perm = reorder_tail_basis(F, 2)
    assert sorted(perm) == [0, 1, 2, 3]
    assert np.linalg.matrix_rank(G.matrix[:, 2:]) == 2
    build_gamma(G, 2)


def test_project_frame_identity(M3):
    P = project_frame(M3, np.eye(2))
    np.testing.assert_allclose(P.matrix.conj().T @ P.matrix, M3.matrix.T @ M3.matrix, atol=1e-14)


def test_project_frame_line(M3):
    P = project_frame(M3, np.diag([1.0, 0.0]))
    assert P.dim == 1
    np.testing.assert_allclose(np.abs(P.matrix[0]), [1, 0.5, 0.5], atol=1e-14)
    assert is_m_erasure_robust(P, 1).robust


def test_project_frame_errors(M3):
    with pytest.raises(NotAProjection):
        project_frame(M3, np.array([[1, 1], [0, 1]]))
    with pytest.raises(ZeroRange):
        project_frame(M3, np.zeros((2, 2)))


def test_projection_keeps_robustness():
    for seed in range(10):
        F = random_frame(4, 7, seed=seed)
        P = random_projection(4, 2, seed=seed)
        assert robustness_degree(project_frame(F, P)) >= robustness_degree(F)


def test_reduced_bound_counterexample():
    # three copies of 1 in C^1: erasing one leaves lower bound 2, below 3 / (1/4 + 1)
    F = Frame.from_matrix(np.ones((1, 3)))
    rep = reduced_bound_check(F, [0])
    assert rep.full_lower == pytest.approx(3)
    assert rep.max_coefficient_sq == pytest.approx(0.25)
    assert rep.reduced_lower == pytest.approx(2)
    assert rep.estimate == pytest.approx(2.4)
    assert rep.reduced_lower < rep.estimate
    assert rep.reduced_lower >= rep.operator_estimate - 1e-12


def test_operator_bound_holds():
    for seed in range(20):
        F = random_frame(3, 6, seed=seed)
        for lam in ([0], [1, 4], [0, 2, 5]):
            rep = reduced_bound_check(F, lam)
            assert rep.reduced_lower >= rep.operator_estimate - 1e-10
            assert rep.full_lower == pytest.approx(frame_bounds(F).lower)
