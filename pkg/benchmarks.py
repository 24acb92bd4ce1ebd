"""
Benchmark systems - semi-discretized viscous Burgers' equation, its Carleman lift,
and the coupled van der Pol oscillators
"""
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from config import (
    BURGERS_LENGTH,
    BURGERS_NU,
    MAX_DENSE_ENTRIES,
    VDP_A,
    VDP_B,
    VDP_MU,
)
from errors import ConfigError, DimensionError, DivergenceError, NumericalWarning
from models import ContinuousModel, dense
from structure import ModelStructure, StructureKind


@dataclass(frozen=True)
class BurgersConfig:
    """
    Finite-difference Burgers' setup on (0, L) with n0 interior nodes.

    v(0, t) = u(t) enters through the first node; output_index is 1-based and
    defaults to the midpoint node ceil(n0 / 2).
    """
    n0: int = 10
    nu: float = BURGERS_NU
    length: float = BURGERS_LENGTH
    output_index: Optional[int] = None

    def __post_init__(self):
        if int(self.n0) != self.n0 or self.n0 < 2:
            raise ConfigError(f"Burgers needs n0 >= 2 interior nodes, got {self.n0}")
        if not self.nu > 0:
            raise ConfigError(f"Viscosity must be positive, got {self.nu}")
        if not self.length > 0:
            raise ConfigError(f"Domain length must be positive, got {self.length}")
        if self.output_index is None:
            object.__setattr__(self, "output_index", math.ceil(self.n0 / 2))
        if not 1 <= self.output_index <= self.n0:
            raise ConfigError(f"output_index must lie in [1, {self.n0}], got {self.output_index}")

    @property
    def h(self):
        return self.length / (self.n0 + 1)

    @property
    def lifted_order(self):
        return self.n0 * self.n0 + self.n0


@dataclass(frozen=True)
class VdpConfig:
    mu: float = VDP_MU
    a: float = VDP_A
    b: float = VDP_B

    def __post_init__(self):
        if not all(np.isfinite([self.mu, self.a, self.b])):
            raise ConfigError(f"van der Pol parameters must be finite, got {self}")


VDP_ORDER = 6
VDP_C = np.array([[0.0, 0.0, 1.0, 0.0, 0.0, 0.0]])


def build_burgers_quadratic(cfg):
    """
    Quadratic-bilinear semi-discretization of Burgers' equation.

    Row k of v' (1-based):
        k = 1:      -v1 v2/(2h) + nu/h^2 (v2 - 2 v1) + (v1/(2h) + nu/h^2) u
        1 < k < n0: -v_k (v_{k+1} - v_{k-1})/(2h) + nu/h^2 (v_{k+1} - 2 v_k + v_{k-1})
        k = n0:     -v_n v_{n-1}/(2h) + nu/h^2 (2 v_{n-1} - 2 v_n)
    A product c v_i v_j with i != j puts c/2 in both Kronecker slots (i, j) and (j, i).
    """
    n = cfg.n0
    h = cfg.h
    diff = cfg.nu / h ** 2
    conv = 1.0 / (2.0 * h)

    a_rows, a_cols, a_vals = [], [], []
    q_rows, q_cols, q_vals = [], [], []

    def add_a(i, j, v):
        a_rows.append(i)
        a_cols.append(j)
        a_vals.append(v)

    def add_q(i, j, k, c):
        # c * v_j v_k in row i, split symmetrically
        q_rows.extend([i, i])
        q_cols.extend([j * n + k, k * n + j])
        q_vals.extend([c / 2.0, c / 2.0])

    for k in range(n):
        if k == 0:
            add_a(0, 0, -2.0 * diff)
            add_a(0, 1, diff)
            add_q(0, 0, 1, -conv)
        elif k == n - 1:
            add_a(k, k, -2.0 * diff)
            add_a(k, k - 1, 2.0 * diff)
            add_q(k, k, k - 1, -conv)
        else:
            add_a(k, k - 1, diff)
            add_a(k, k, -2.0 * diff)
            add_a(k, k + 1, diff)
            add_q(k, k, k + 1, -conv)
            add_q(k, k, k - 1, conv)

    A = sp.coo_matrix((a_vals, (a_rows, a_cols)), shape=(n, n)).tocsr()
    Q = sp.coo_matrix((q_vals, (q_rows, q_cols)), shape=(n, n * n)).tocsr()
    N = sp.coo_matrix(([conv], ([0], [0])), shape=(n, n)).tocsr()
    B = np.zeros((n, 1))
    B[0, 0] = diff
    C = np.zeros((1, n))
    C[0, cfg.output_index - 1] = 1.0
    return ContinuousModel(
        structure=ModelStructure(StructureKind.QUADRATIC_BILINEAR_IO),
        A=A, B=B, N=N, Q=Q, C=C,
    )


def _sparse(M, shape):
    if M is None:
        return sp.csr_matrix(shape)
    return sp.csr_matrix(M) if not sp.issparse(M) else M.tocsr()


def carleman_bilinearize(qb, dense_blocks=False):
    """
    Second-order Carleman lift of a quadratic-bilinear system to x = [v; v (x) v].

    A = [[A1, Q1], [0, A1 (x) I + I (x) A1]]
    N = [[N1, 0], [B1 (x) I + I (x) B1, N1 (x) I + I (x) N1]]
    B = [B1; 0],  C = [C1, 0]
    Terms cubic in v are dropped.

    Args:
        qb (ContinuousModel): quadratic-bilinear system of order n0
        dense_blocks (bool): return dense A and N when they fit under MAX_DENSE_ENTRIES

    Returns:
        ContinuousModel: bilinear(-IO) system of order n0^2 + n0
    """
    n0 = qb.order
    n = n0 * n0 + n0
    eye = sp.identity(n0, format="csr")
    A1 = _sparse(qb.A, (n0, n0))
    Q1 = _sparse(qb.Q, (n0, n0 * n0))
    N1 = _sparse(qb.N, (n0, n0))
    B1 = _sparse(qb.B, (n0, 1))

    A = sp.bmat([[A1, Q1], [None, sp.kron(A1, eye) + sp.kron(eye, A1)]], format="csr")
    N = sp.bmat([[N1, None],
                 [sp.kron(B1, eye) + sp.kron(eye, B1), sp.kron(N1, eye) + sp.kron(eye, N1)]],
                format="csr")
    B = np.vstack([dense(qb.B) if qb.B is not None else np.zeros((n0, 1)), np.zeros((n0 * n0, 1))])

    if dense_blocks:
        if n * n > MAX_DENSE_ENTRIES:
            warnings.warn(f"Lifted order {n} too large for dense blocks; keeping sparse storage",
                          NumericalWarning, stacklevel=2)
        else:
            A, N = A.toarray(), N.toarray()

    kwargs = {}
    if qb.structure.is_io and qb.C is not None:
        kwargs["C"] = np.hstack([dense(qb.C), np.zeros((1, n0 * n0))])
        if qb.D is not None:
            kwargs["D"] = dense(qb.D)
        structure = ModelStructure(StructureKind.BILINEAR_IO)
    else:
        structure = ModelStructure(StructureKind.BILINEAR)
    return ContinuousModel(structure=structure, A=A, B=B, N=N, **kwargs)


def burgers_training_system(cfg):
    """Carleman-lifted Burgers' system used to generate training data"""
    return carleman_bilinearize(build_burgers_quadratic(cfg))


def vdp_step(cfg, x, u):
    """Right-hand side of the coupled van der Pol system; u drives the middle oscillator"""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != VDP_ORDER:
        raise DimensionError(f"van der Pol state has length {VDP_ORDER}, got {x.size}")
    mu, a, b = cfg.mu, cfg.a, cfg.b
    x1, x2, x3, x4, x5, x6 = x
    return np.array([
        x2,
        -x1 - mu * (x1 ** 2 - 1.0) * x2 + a * (x3 - x1) + b * (x4 - x2),
        x4,
        -x3 - mu * (x3 ** 2 - 1.0) * x4 + a * (x1 - x3) + b * (x2 - x4)
        + a * (x5 - x3) + b * (x6 - x4) + u,
        x6,
        -x5 - mu * (x5 ** 2 - 1.0) * x6 + a * (x3 - x5) + b * (x4 - x6),
    ])


def simulate_vdp(cfg, u, dt, x0=None):
    """
    Explicit Euler trajectory of the cubic van der Pol system.

    Returns:
        np.ndarray: states 6 x (m+1)
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    if not dt > 0:
        raise ConfigError(f"Time step must be positive, got {dt}")
    x = np.zeros(VDP_ORDER) if x0 is None else np.asarray(x0, dtype=float).reshape(-1)
    if x.size != VDP_ORDER:
        raise DimensionError(f"van der Pol state has length {VDP_ORDER}, got {x.size}")
    states = np.empty((VDP_ORDER, u.size + 1))
    states[:, 0] = x
    with np.errstate(over="ignore", invalid="ignore"):
        for k, uk in enumerate(u):
            x = x + dt * vdp_step(cfg, x, uk)
            if not np.all(np.isfinite(x)):
                raise DivergenceError(k + 1)
            states[:, k + 1] = x
    return states


def vdp_output(states):
    """y = x3"""
    return (VDP_C @ np.atleast_2d(states)).reshape(-1)
