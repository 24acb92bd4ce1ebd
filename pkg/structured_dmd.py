"""
Structured DMD module - regressor assembly, truncated-SVD least squares, block splitting, projection

The fit solves   min_G || Gamma - G Omega ||_F   with
    Omega = [X; U; X U_D; (X (x) X) H]   (blocks present per structure)
    Gamma = Xs  or  [Xs; Y]
so that G = [A B N Q] (and [C D F K] for the output row).
"""
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from errors import DimensionError, NumericalWarning, StructureMismatchError
from linalg import TruncationMode, khatri_rao_self, pinv_apply, truncated_svd
from models import DiscreteModel
from structure import BILINEAR, INPUT, QUADRATIC, STATE, ModelStructure, StructureKind

__all__ = [
    "ModelStructure",
    "StructureKind",
    "RegressorBundle",
    "FullOrderBlocks",
    "assemble_omega",
    "assemble_gamma",
    "fit_full",
    "reduce",
    "fit_structured",
    "compute_dmd_modes",
    "dmd_amplitudes",
    "symmetrize_quadratic",
]

# G column block -> system matrix name, for the state rows and the output row
_STATE_NAMES = {STATE: "A", INPUT: "B", BILINEAR: "N", QUADRATIC: "Q"}
_OUTPUT_NAMES = {STATE: "C", INPUT: "D", BILINEAR: "F", QUADRATIC: "K"}


@dataclass(eq=False)
class RegressorBundle:
    """Target/regressor pair with the row ranges of each Omega block"""
    gamma: np.ndarray
    omega: np.ndarray
    row_layout: tuple  # ((label, start, stop), ...)
    structure: ModelStructure
    n: int
    dt: float

    def block_rows(self, label):
        for name, start, stop in self.row_layout:
            if name == label:
                return start, stop
        raise KeyError(label)


@dataclass(eq=False)
class FullOrderBlocks:
    """Full-order system matrices recovered from G, plus fit diagnostics"""
    structure: ModelStructure
    dt: float
    n: int
    rank: int
    residual: float
    blocks: dict = field(default_factory=dict)
    omega_spectrum: Optional[np.ndarray] = None

    def __getattr__(self, name):
        if name in ("A", "B", "N", "Q", "C", "D", "F", "K"):
            return self.__dict__.get("blocks", {}).get(name)
        raise AttributeError(name)

    def state_matrix(self):
        """[A B N Q] restricted to the present blocks"""
        return np.hstack([self.blocks[name] for name in ("A", "B", "N", "Q") if name in self.blocks])

    def to_model(self):
        return DiscreteModel(structure=self.structure, dt=self.dt, **self.blocks)


def _check_structure(snap, structure):
    if snap.m < 1:
        raise DimensionError("Need at least one snapshot pair")
    if structure.is_io and snap.Y is None:
        raise StructureMismatchError(f"Structure {structure.name} needs output data Y")


def assemble_omega(snap, structure):
    """
    Stack the regressor blocks [X; U; X U_D; T] required by the structure.

    X U_D scales column k of X by u_k and T = khatri_rao_self(X); neither U_D
    nor X (x) X is formed.
    """
    _check_structure(snap, structure)
    X, U = snap.X, snap.U
    pieces = {STATE: X}
    if structure.has_input:
        if not np.any(U):
            warnings.warn("Input is identically zero; input and bilinear regressor rows vanish",
                          NumericalWarning, stacklevel=2)
        pieces[INPUT] = U
    if structure.has_bilinear:
        pieces[BILINEAR] = X * U
    if structure.has_quadratic:
        pieces[QUADRATIC] = khatri_rao_self(X)

    layout = []
    start = 0
    for label in structure.blocks():
        stop = start + pieces[label].shape[0]
        layout.append((label, start, stop))
        start = stop
    omega = np.vstack([pieces[label] for label in structure.blocks()])
    return RegressorBundle(
        gamma=assemble_gamma(snap, structure),
        omega=omega,
        row_layout=tuple(layout),
        structure=structure,
        n=snap.n,
        dt=snap.dt,
    )


def assemble_gamma(snap, structure):
    """Xs, stacked with Y for IO structures"""
    _check_structure(snap, structure)
    if structure.is_io:
        return np.vstack([snap.Xs, snap.Y])
    return snap.Xs.copy()


def _split_row(G_rows, layout, names):
    return {names[label]: G_rows[:, start:stop] for label, start, stop in layout}


def fit_full(bundle, policy_p=None):
    """
    Solve G = Gamma Omega^+ through the truncated SVD of Omega and split G into blocks.

    Args:
        bundle (RegressorBundle): assembled data
        policy_p (TruncationPolicy): truncation of Omega's SVD; None keeps the numerical rank

    Returns:
        FullOrderBlocks
    """
    factors = truncated_svd(bundle.omega, policy_p)
    G = pinv_apply(factors, bundle.gamma)
    n = bundle.n
    structure = bundle.structure

    blocks = _split_row(G[:n], bundle.row_layout, _STATE_NAMES)
    if structure.is_io:
        layout = bundle.row_layout
        output_row = G[n:]
        if structure.has_quadratic and not structure.fits_quadratic_output:
            # refit the output row on Omega without its quadratic rows
            q_start, _ = bundle.block_rows(QUADRATIC)
            sub_policy = policy_p
            if policy_p is not None and policy_p.mode is TruncationMode.FIXED_RANK:
                sub_policy = type(policy_p).fixed_rank(min(int(policy_p.value), q_start))
            sub_factors = truncated_svd(bundle.omega[:q_start], sub_policy)
            output_row = pinv_apply(sub_factors, bundle.gamma[n:])
            layout = tuple(entry for entry in layout if entry[0] != QUADRATIC)
            G = np.vstack([G[:n], np.hstack([output_row, np.zeros((1, bundle.omega.shape[0] - q_start))])])
        blocks.update(_split_row(output_row, layout, _OUTPUT_NAMES))

    residual = float(np.linalg.norm(bundle.gamma - G @ bundle.omega, "fro"))
    return FullOrderBlocks(
        structure=structure,
        dt=bundle.dt,
        n=n,
        rank=factors.truncation_rank,
        residual=residual,
        blocks=blocks,
        omega_spectrum=factors.spectrum,
    )


def _project_quadratic(Q, V):
    """Q (V (x) V) computed as a two-sided tensor contraction"""
    rows, n, r = Q.shape[0], V.shape[0], V.shape[1]
    Q3 = np.asarray(Q, dtype=float).reshape(rows, n, n)
    Q3 = np.tensordot(Q3, V, axes=([2], [0]))           # rows x n x r
    Q3 = np.einsum("ajc,jb->abc", Q3, V)                 # rows x r x r
    return Q3.reshape(rows, r * r)


def reduce(blocks, Xs, policy_r=None, basis=None):
    """
    Project full-order blocks onto the leading left singular vectors V of Xs.

    A~ = V^T A V, B~ = V^T B, N~ = V^T N V, Q~ = V^T Q (V (x) V),
    C~ = C V, D~ = D, F~ = F V, K~ = K (V (x) V).

    Args:
        blocks (FullOrderBlocks): output of fit_full
        Xs (array_like): shifted snapshot matrix used to build V
        policy_r (TruncationPolicy): truncation of the SVD of Xs
        basis (array_like): explicit projection basis; skips the SVD when given

    Returns:
        DiscreteModel: order-r model with the basis retained
    """
    n = blocks.n
    if basis is None:
        Xs = np.atleast_2d(np.asarray(Xs, dtype=float))
        if Xs.shape[0] != n:
            raise DimensionError(f"Xs has {Xs.shape[0]} rows, model order is {n}")
        if policy_r is not None and policy_r.mode is TruncationMode.FIXED_RANK and policy_r.value > n:
            raise DimensionError(f"Reduced order {int(policy_r.value)} exceeds full order {n}")
        factors = truncated_svd(Xs, policy_r)
        V = factors.left_vectors
        if policy_r is not None and policy_r.mode is TruncationMode.FIXED_RANK and V.shape[1] < policy_r.value:
            warnings.warn(f"Xs has numerical rank {V.shape[1]}; reduced order lowered from "
                          f"{int(policy_r.value)}", NumericalWarning, stacklevel=2)
    else:
        V = np.asarray(basis, dtype=float)
        if V.ndim != 2 or V.shape[0] != n:
            raise DimensionError(f"Basis has shape {V.shape}, expected ({n}, r)")
    r = V.shape[1]
    if r > blocks.rank:
        warnings.warn(f"Reduced order r={r} exceeds regression rank p={blocks.rank}",
                      NumericalWarning, stacklevel=2)

    def project(name, M):
        if name in ("A", "N"):
            return V.T @ M @ V
        if name == "B":
            return V.T @ M
        if name == "Q":
            return V.T @ _project_quadratic(M, V)
        if name in ("C", "F"):
            return M @ V
        if name == "K":
            return _project_quadratic(M, V)
        return M.copy()

    reduced = {name: project(name, M) for name, M in blocks.blocks.items()}
    return DiscreteModel(structure=blocks.structure, dt=blocks.dt, basis=V, **reduced)


def fit_structured(snap, structure, policy_p=None, policy_r=None, reduce_order=True):
    """assemble_omega -> fit_full -> reduce in one call"""
    bundle = assemble_omega(snap, structure)
    full = fit_full(bundle, policy_p)
    if not reduce_order:
        return full, full.to_model()
    return full, reduce(full, snap.Xs, policy_r)


def compute_dmd_modes(A):
    """
    Eigenpairs of A (the DMD modes), ordered by decreasing magnitude.

    Conjugate pairs are adjacent with the positive imaginary part first.
    Real spectra are returned as real arrays.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.size == 0:
        raise DimensionError(f"DMD modes need a square matrix, got shape {A.shape}")
    eigvals, eigvecs = np.linalg.eig(A)
    order = np.lexsort((-eigvals.imag, -np.round(np.abs(eigvals), 12)))
    eigvals, eigvecs = eigvals[order], eigvecs[:, order]
    if np.all(eigvals.imag == 0):
        return eigvals.real, eigvecs.real
    return eigvals, eigvecs


def dmd_amplitudes(modes, x0):
    """Least-squares amplitudes b with modes @ b ~ x0"""
    modes = np.asarray(modes)
    x0 = np.asarray(x0).reshape(-1)
    if modes.shape[0] != x0.size:
        raise DimensionError(f"Modes have {modes.shape[0]} rows, state has length {x0.size}")
    return np.linalg.lstsq(modes, x0, rcond=None)[0]


def symmetrize_quadratic(Q):
    """Average the (i, j) and (j, i) Kronecker slots of a rows x n^2 block"""
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    n = int(round(np.sqrt(Q.shape[1])))
    if n * n != Q.shape[1]:
        raise DimensionError(f"Quadratic block has {Q.shape[1]} columns, not a perfect square")
    Q3 = Q.reshape(Q.shape[0], n, n)
    return (0.5 * (Q3 + Q3.transpose(0, 2, 1))).reshape(Q.shape[0], n * n)
