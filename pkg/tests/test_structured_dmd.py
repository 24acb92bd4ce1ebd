"""
Tests for structured_dmd module
"""
import numpy as np
import pytest

from errors import DimensionError, NumericalWarning, SingularRegressorError, StructureMismatchError
from linalg import TruncationPolicy
from snapshots import SnapshotSet, from_trajectory
from structured_dmd import (
    ModelStructure,
    StructureKind,
    assemble_gamma,
    assemble_omega,
    compute_dmd_modes,
    dmd_amplitudes,
    fit_full,
    fit_structured,
    reduce,
    symmetrize_quadratic,
)


def structure(kind, **kwargs):
    return ModelStructure(StructureKind(kind), **kwargs)


def _snap(X, Xs, U, Y=None):
    return SnapshotSet(X=np.asarray(X, float), Xs=np.asarray(Xs, float), U=np.asarray(U, float), dt=0.1, Y=Y)


def test_linear_omega_is_x(rng):
    snap = from_trajectory(rng.standard_normal((3, 6)), rng.standard_normal(5), dt=0.1)
    bundle = assemble_omega(snap, structure("linear"))
    np.testing.assert_array_equal(bundle.omega, snap.X)
    assert bundle.row_layout == (("state", 0, 3),)


def test_bilinear_omega_hand_example():
    X = [[1.0, 2.0], [0.0, 1.0]]
    snap = _snap(X, X, [3.0, 4.0])
    bundle = assemble_omega(snap, structure("bilinear"))
    np.testing.assert_array_equal(bundle.omega, [[1, 2], [0, 1], [3, 4], [3, 8], [0, 4]])
    assert [label for label, _, _ in bundle.row_layout] == ["state", "input", "bilinear"]


def test_quadratic_omega_row_count(rng):
    snap = _snap(rng.standard_normal((2, 2)), rng.standard_normal((2, 2)), [1.0, 2.0])
    assert assemble_omega(snap, structure("quadratic_bilinear")).omega.shape == (9, 2)


@pytest.mark.parametrize("kind, rows", [
    ("linear", 4), ("linear_control", 5), ("linear_io", 5), ("bilinear", 9),
    ("bilinear_io", 9), ("quadratic_bilinear", 25), ("quadratic_bilinear_io", 25),
])
def test_regressor_rows_formula(rng, kind, rows):
    snap = from_trajectory(rng.standard_normal((4, 7)), rng.standard_normal(6),
                           outputs=rng.standard_normal(6), dt=0.1)
    s = structure(kind)
    assert assemble_omega(snap, s).omega.shape[0] == rows == s.regressor_rows(4)


def test_gamma_stacks_output_for_io(rng):
    snap = from_trajectory(rng.standard_normal((3, 6)), rng.standard_normal(5),
                           outputs=rng.standard_normal(5), dt=0.1)
    np.testing.assert_array_equal(assemble_gamma(snap, structure("bilinear")), snap.Xs)
    gamma = assemble_gamma(snap, structure("linear_io"))
    assert gamma.shape == (4, 5)
    np.testing.assert_array_equal(gamma[-1], snap.Y[0])


def test_io_structure_requires_output(rng):
    snap = from_trajectory(rng.standard_normal((3, 6)), rng.standard_normal(5), dt=0.1)
    with pytest.raises(StructureMismatchError):
        assemble_omega(snap, structure("bilinear_io"))


def test_zero_input_warns(rng):
    snap = from_trajectory(rng.standard_normal((2, 6)), np.zeros(5), dt=0.1)
    with pytest.warns(NumericalWarning, match="zero"):
        assemble_omega(snap, structure("bilinear"))


def test_fit_recovers_linear_system(planted_linear):
    snap = planted_linear["snap"]
    full = fit_full(assemble_omega(snap, structure("linear_control")))
    assert np.linalg.norm(full.A - planted_linear["A"]) < 1e-9
    assert np.linalg.norm(full.B - planted_linear["B"]) < 1e-9
    assert full.residual < 1e-10


def test_fit_recovers_bilinear_io_blocks(planted_bilinear):
    p = planted_bilinear
    full = fit_full(assemble_omega(p["snap"], structure("bilinear_io")))
    G_true = np.hstack([p["A"], p["B"], p["N"]])
    assert np.linalg.norm(full.state_matrix() - G_true) / np.linalg.norm(G_true) < 1e-8
    np.testing.assert_allclose(full.C, p["C"], atol=1e-8)
    np.testing.assert_allclose(full.D, p["D"], atol=1e-8)
    assert np.linalg.norm(full.F) < 1e-8


def test_fit_quadratic_up_to_symmetrization(planted_quadratic, rng):
    p = planted_quadratic
    full = fit_full(assemble_omega(p["snap"], structure("quadratic_bilinear")))
    np.testing.assert_allclose(symmetrize_quadratic(full.Q), symmetrize_quadratic(p["Q"]), atol=1e-6)
    for _ in range(100):
        x = rng.standard_normal(3)
        np.testing.assert_allclose(full.Q @ np.kron(x, x), p["Q"] @ np.kron(x, x), atol=1e-8)


def test_layout_concatenation_reproduces_prediction(planted_bilinear):
    bundle = assemble_omega(planted_bilinear["snap"], structure("bilinear_io"))
    full = fit_full(bundle)
    state = np.hstack([full.A, full.B, full.N])
    output = np.hstack([full.C, full.D, full.F])
    G = np.vstack([state, output])
    np.testing.assert_allclose(np.linalg.norm(bundle.gamma - G @ bundle.omega), full.residual, atol=1e-12)


def test_least_squares_optimality(rng):
    X = rng.standard_normal((3, 41))
    snap = from_trajectory(X, rng.standard_normal(40), dt=0.1)
    bundle = assemble_omega(snap, structure("bilinear"))
    full = fit_full(bundle)
    G = full.state_matrix()
    base = np.linalg.norm(bundle.gamma - G @ bundle.omega)
    for _ in range(100):
        E = rng.standard_normal(G.shape)
        E *= 1e-3 / np.linalg.norm(E)
        assert base <= np.linalg.norm(bundle.gamma - (G + E) @ bundle.omega) + 1e-12


def test_fit_zero_regressor_raises():
    snap = _snap(np.zeros((2, 4)), np.zeros((2, 4)), np.zeros(4))
    with pytest.raises(SingularRegressorError):
        fit_full(assemble_omega(snap, structure("linear")))


def test_qb_io_without_quadratic_output(rng):
    states = 0.3 * rng.standard_normal((2, 31))
    snap = from_trajectory(states, rng.standard_normal(30), outputs=rng.standard_normal(30), dt=0.1)
    full = fit_full(assemble_omega(snap, structure("quadratic_bilinear_io", include_quadratic_output=False)))
    assert full.K is None
    assert full.C.shape == (1, 2) and full.F.shape == (1, 2)
    assert full.Q.shape == (2, 4)


def test_reduce_identity_basis_is_exact(planted_quadratic):
    snap = planted_quadratic["snap"]
    full = fit_full(assemble_omega(snap, structure("quadratic_bilinear")))
    model = reduce(full, snap.Xs, basis=np.eye(3))
    for name in ("A", "B", "N", "Q"):
        np.testing.assert_array_equal(getattr(model, name), getattr(full, name))


def test_reduce_projects_blocks(planted_bilinear):
    snap = planted_bilinear["snap"]
    full = fit_full(assemble_omega(snap, structure("bilinear_io")))
    model = reduce(full, snap.Xs, TruncationPolicy.fixed_rank(2))
    V = model.basis
    assert V.shape == (4, 2)
    np.testing.assert_allclose(model.A, V.T @ full.A @ V)
    np.testing.assert_allclose(model.C, full.C @ V)
    np.testing.assert_allclose(model.F, full.F @ V)
    np.testing.assert_array_equal(model.D, full.D)


def test_reduce_quadratic_matches_explicit_kron(planted_quadratic):
    snap = planted_quadratic["snap"]
    full = fit_full(assemble_omega(snap, structure("quadratic_bilinear")))
    model = reduce(full, snap.Xs, TruncationPolicy.fixed_rank(2))
    V = model.basis
    np.testing.assert_allclose(model.Q, V.T @ full.Q @ np.kron(V, V), atol=1e-13)


def test_reduce_rank_above_order_raises(planted_bilinear):
    snap = planted_bilinear["snap"]
    full = fit_full(assemble_omega(snap, structure("bilinear")))
    with pytest.raises(DimensionError):
        reduce(full, snap.Xs, TruncationPolicy.fixed_rank(5))


def test_reduce_warns_when_r_exceeds_p(planted_bilinear):
    snap = planted_bilinear["snap"]
    full = fit_full(assemble_omega(snap, structure("bilinear")), TruncationPolicy.fixed_rank(2))
    with pytest.warns(NumericalWarning, match="exceeds regression rank"):
        reduce(full, snap.Xs, TruncationPolicy.fixed_rank(4))


def test_fit_structured_composes(planted_bilinear):
    full, model = fit_structured(planted_bilinear["snap"], structure("bilinear"),
                                 policy_r=TruncationPolicy.fixed_rank(3))
    assert model.order == 3
    assert full.n == 4


def test_dmd_modes_diagonal():
    eigvals, eigvecs = compute_dmd_modes(np.diag([0.5, 0.9]))
    np.testing.assert_allclose(eigvals, [0.9, 0.5])
    np.testing.assert_allclose(np.abs(eigvecs), np.eye(2)[:, ::-1])


def test_dmd_modes_identity():
    eigvals, _ = compute_dmd_modes(np.eye(3))
    np.testing.assert_allclose(eigvals, [1.0, 1.0, 1.0])


def test_dmd_modes_rotation():
    theta = 0.3
    R = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    eigvals, eigvecs = compute_dmd_modes(R)
    np.testing.assert_allclose(eigvals, [np.exp(1j * theta), np.exp(-1j * theta)], atol=1e-12)
    for k in range(2):
        assert np.linalg.norm(R @ eigvecs[:, k] - eigvals[k] * eigvecs[:, k]) < 1e-9


def test_dmd_modes_non_square():
    with pytest.raises(DimensionError):
        compute_dmd_modes(np.ones((2, 3)))


def test_dmd_amplitudes_reconstruct_state(rng):
    A = rng.standard_normal((3, 3))
    _, modes = compute_dmd_modes(A)
    x0 = rng.standard_normal(3)
    b = dmd_amplitudes(modes, x0)
    np.testing.assert_allclose((modes @ b).real, x0, atol=1e-10)


def test_symmetrize_quadratic():
    Q = np.array([[0.0, 2.0, 0.0, 1.0]])
    np.testing.assert_array_equal(symmetrize_quadratic(Q), [[0.0, 1.0, 1.0, 1.0]])
