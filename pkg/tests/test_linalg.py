"""
Tests for linalg module
"""
import numpy as np
import pytest

from errors import DimensionError, NumericalWarning, PolicyError, SingularRegressorError
from linalg import (
    TruncationPolicy,
    khatri_rao_self,
    kron,
    normalized_singular_values,
    numerical_rank,
    pinv_apply,
    truncated_svd,
)


def test_truncated_svd_identity():
    """Identity keeps all three unit singular values"""
    factors = truncated_svd(np.eye(3), TruncationPolicy.relative_tolerance(1e-12))
    assert factors.truncation_rank == 3
    np.testing.assert_allclose(factors.singular_values, [1.0, 1.0, 1.0])


def test_truncated_svd_tolerance_cut():
    """diag(3, 2, 3e-13) loses its smallest value at tau = 1e-10"""
    factors = truncated_svd(np.diag([3.0, 2.0, 3e-13]), TruncationPolicy.relative_tolerance(1e-10))
    assert factors.truncation_rank == 2
    np.testing.assert_allclose(factors.singular_values, [3.0, 2.0])


def test_truncated_svd_planted_rank(rng):
    """Sum of three rank-1 outer products has rank 3"""
    M = sum(np.outer(rng.standard_normal(5), rng.standard_normal(8)) for _ in range(3))
    factors = truncated_svd(M, TruncationPolicy.relative_tolerance(1e-10))
    assert factors.truncation_rank == 3
    np.testing.assert_allclose(factors.reconstruct(), M, atol=1e-12)


def test_truncated_svd_factor_invariants(rng):
    """Orthonormal factors, non-increasing values, reconstruction bounded by the next value"""
    M = rng.standard_normal((6, 9))
    factors = truncated_svd(M, TruncationPolicy.fixed_rank(4))
    k = factors.truncation_rank
    assert k == 4
    np.testing.assert_allclose(factors.left_vectors.T @ factors.left_vectors, np.eye(k), atol=1e-10)
    np.testing.assert_allclose(factors.right_vectors.T @ factors.right_vectors, np.eye(k), atol=1e-10)
    assert np.all(np.diff(factors.singular_values) <= 0)
    assert np.linalg.norm(M - factors.reconstruct(), 2) <= factors.spectrum[k] * (1 + 1e-10)


def test_truncated_svd_sign_convention(rng):
    """First significant entry of every left vector is non-negative and repeated calls agree"""
    M = rng.standard_normal((5, 7))
    first = truncated_svd(M)
    second = truncated_svd(M.copy())
    for j in range(first.truncation_rank):
        col = first.left_vectors[:, j]
        assert col[np.argmax(np.abs(col) > 1e-12 * np.max(np.abs(col)))] >= 0
    np.testing.assert_array_equal(first.left_vectors, second.left_vectors)


def test_truncated_svd_empty_matrix():
    with pytest.raises(DimensionError):
        truncated_svd(np.zeros((0, 3)))


def test_truncated_svd_zero_matrix():
    with pytest.raises(SingularRegressorError):
        truncated_svd(np.zeros((3, 4)))


@pytest.mark.parametrize("tau", [0.0, 1.0, -0.5, 2.0])
def test_policy_rejects_tolerance_outside_unit_interval(tau):
    with pytest.raises(PolicyError):
        TruncationPolicy.relative_tolerance(tau)


def test_policy_rejects_non_positive_rank():
    with pytest.raises(PolicyError):
        TruncationPolicy.fixed_rank(0)


def test_fixed_rank_above_min_dimension_warns(rng):
    M = rng.standard_normal((3, 10))
    with pytest.warns(NumericalWarning, match="clipped"):
        factors = truncated_svd(M, TruncationPolicy.fixed_rank(7))
    assert factors.truncation_rank == 3


def test_fixed_rank_respects_numerical_rank(rng):
    """Rank-2 matrix keeps two values even when four are requested"""
    M = np.outer(rng.standard_normal(6), rng.standard_normal(8)) + np.outer(rng.standard_normal(6), rng.standard_normal(8))
    assert truncated_svd(M, TruncationPolicy.fixed_rank(4)).truncation_rank == 2


def test_truncation_monotone_in_tolerance(rng):
    M = rng.standard_normal((8, 8)) @ np.diag(10.0 ** -np.arange(8)) @ rng.standard_normal((8, 12))
    ranks = [truncated_svd(M, TruncationPolicy.relative_tolerance(tau)).truncation_rank
             for tau in (1e-9, 1e-6, 1e-3, 1e-1)]
    assert ranks == sorted(ranks, reverse=True)


def test_singular_values_transpose_invariant(rng):
    M = rng.standard_normal((5, 9))
    np.testing.assert_allclose(truncated_svd(M).singular_values, truncated_svd(M.T).singular_values, atol=1e-12)


def test_pinv_apply_identity():
    np.testing.assert_allclose(pinv_apply(truncated_svd(np.eye(3)), np.eye(3)), np.eye(3), atol=1e-15)


def test_pinv_apply_diagonal():
    result = pinv_apply(truncated_svd(np.diag([2.0, 4.0])), np.eye(2))
    np.testing.assert_allclose(result, np.diag([0.5, 0.25]), atol=1e-15)


def test_pinv_apply_recovers_planted_coefficients(rng):
    omega = rng.standard_normal((3, 10))
    G0 = rng.standard_normal((2, 3))
    G = pinv_apply(truncated_svd(omega), G0 @ omega)
    assert np.linalg.norm(G - G0) < 1e-10


def test_pinv_apply_moore_penrose_identity(rng):
    M = rng.standard_normal((4, 7))
    factors = truncated_svd(M)
    # M pinv(M) M = M with pinv applied to the identity
    pinv = pinv_apply(factors, np.eye(7))
    assert np.linalg.norm(M @ pinv @ M - M) / np.linalg.norm(M) < 1e-9


def test_pinv_apply_dimension_mismatch(rng):
    factors = truncated_svd(rng.standard_normal((3, 10)))
    with pytest.raises(DimensionError):
        pinv_apply(factors, np.ones((2, 9)))


def test_kron_examples():
    M = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(kron([[1.0]], M), M)
    np.testing.assert_array_equal(kron(np.eye(2), M), np.block([[M, np.zeros((2, 2))], [np.zeros((2, 2)), M]]))
    np.testing.assert_array_equal(kron([[1.0], [2.0]], [[3.0], [4.0]]), [[3.0], [4.0], [6.0], [8.0]])


def test_khatri_rao_examples():
    T = khatri_rao_self(np.array([[1.0, 2.0], [3.0, 4.0]]))
    np.testing.assert_array_equal(T[:, 0], [1.0, 3.0, 3.0, 9.0])
    np.testing.assert_array_equal(T[:, 1], [4.0, 8.0, 8.0, 16.0])


def test_khatri_rao_zero_column(rng):
    X = rng.standard_normal((3, 4))
    X[:, 2] = 0.0
    assert not np.any(khatri_rao_self(X)[:, 2])


def test_khatri_rao_columns_equal_kron(rng):
    X = rng.standard_normal((4, 5))
    T = khatri_rao_self(X)
    for k in range(5):
        np.testing.assert_array_equal(T[:, k], np.kron(X[:, k], X[:, k]))


def test_normalized_singular_values(rng):
    sigma = normalized_singular_values(rng.standard_normal((4, 6)))
    assert sigma[0] == 1.0
    assert np.all(sigma <= 1.0)


def test_numerical_rank_guard():
    assert numerical_rank(np.array([1.0, 1e-3, 1e-17]), (3, 10)) == 2
    assert numerical_rank(np.array([0.0, 0.0]), (2, 2)) == 0
