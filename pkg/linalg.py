"""
Linear algebra kernels - truncated SVD, pseudoinverse application, Kronecker products
"""
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from errors import DimensionError, NumericalWarning, PolicyError, SingularRegressorError


class TruncationMode(Enum):
    FIXED_RANK = "rank"
    RELATIVE_TOLERANCE = "tolerance"


@dataclass(frozen=True)
class TruncationPolicy:
    """Rule deciding how many singular values an SVD keeps"""
    mode: TruncationMode
    value: float

    def __post_init__(self):
        if self.mode is TruncationMode.FIXED_RANK:
            if isinstance(self.value, bool) or int(self.value) != self.value or self.value < 1:
                raise PolicyError(f"Fixed rank must be a positive integer, got {self.value!r}")
        elif self.mode is TruncationMode.RELATIVE_TOLERANCE:
            if not 0.0 < float(self.value) < 1.0:
                raise PolicyError(f"Relative tolerance must lie in (0, 1), got {self.value!r}")
        else:
            raise PolicyError(f"Unknown truncation mode: {self.mode!r}")

    @classmethod
    def fixed_rank(cls, r):
        return cls(TruncationMode.FIXED_RANK, r)

    @classmethod
    def relative_tolerance(cls, tau):
        return cls(TruncationMode.RELATIVE_TOLERANCE, tau)

    @classmethod
    def numerical(cls, shape):
        """Keep everything above the machine-precision guard"""
        return cls.fixed_rank(max(1, min(shape)))

    def describe(self):
        if self.mode is TruncationMode.FIXED_RANK:
            return f"rank {int(self.value)}"
        return f"tau {self.value:g}"


@dataclass(frozen=True)
class SvdFactors:
    """
    Thin SVD truncated to k terms, M ~ left @ diag(singular_values) @ right.T

    `spectrum` holds every singular value of the source matrix, retained or not.
    """
    left_vectors: np.ndarray
    singular_values: np.ndarray
    right_vectors: np.ndarray
    spectrum: np.ndarray
    source_shape: tuple

    @property
    def truncation_rank(self):
        return self.singular_values.shape[0]

    def reconstruct(self):
        return (self.left_vectors * self.singular_values) @ self.right_vectors.T


def numerical_rank(sigma, shape):
    """Number of singular values above sigma_1 * max(shape) * eps"""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    guard = sigma[0] * max(shape) * np.finfo(float).eps
    return int(np.count_nonzero(sigma > guard))


def normalized_singular_values(M):
    """Full singular spectrum of M divided by its largest singular value"""
    M = _as_matrix(M)
    sigma = np.linalg.svd(M, compute_uv=False)
    if sigma[0] == 0.0:
        return np.zeros_like(sigma)
    return sigma / sigma[0]


def _as_matrix(M):
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M.reshape(1, -1)
    if M.ndim != 2 or M.size == 0:
        raise DimensionError(f"Expected a non-empty 2-D matrix, got shape {M.shape}")
    return M


def _fix_signs(U, Vt):
    # first significant entry of each left vector made non-negative
    for j in range(U.shape[1]):
        col = U[:, j]
        scale = np.max(np.abs(col))
        if scale == 0.0:
            continue
        first = np.argmax(np.abs(col) > 1e-12 * scale)
        if col[first] < 0:
            U[:, j] = -col
            Vt[j, :] = -Vt[j, :]
    return U, Vt


def truncated_svd(M, policy=None):
    """
    Compute the thin SVD of M and truncate it according to a policy.

    Args:
        M (array_like): Matrix to factor (rows x cols)
        policy (TruncationPolicy): Truncation rule; None keeps every numerically
            nonzero singular value

    Returns:
        SvdFactors: left (rows x k), sigma (k,), right (cols x k)
    """
    M = _as_matrix(M)
    if policy is None:
        policy = TruncationPolicy.numerical(M.shape)
    if not isinstance(policy, TruncationPolicy):
        raise PolicyError(f"Expected a TruncationPolicy, got {type(policy).__name__}")

    U, sigma, Vt = np.linalg.svd(M, full_matrices=False)
    if sigma[0] == 0.0:
        raise SingularRegressorError(f"Matrix of shape {M.shape} is identically zero")

    if policy.mode is TruncationMode.RELATIVE_TOLERANCE:
        k = int(np.count_nonzero(sigma / sigma[0] > policy.value))
    else:
        requested = int(policy.value)
        if requested > min(M.shape):
            warnings.warn(
                f"Requested rank {requested} exceeds min dimension {min(M.shape)}; clipped",
                NumericalWarning,
                stacklevel=2,
            )
        k = min(requested, numerical_rank(sigma, M.shape))
    if k < 1:
        raise SingularRegressorError(f"No singular value retained under {policy.describe()}")

    U, Vt = _fix_signs(U[:, :k].copy(), Vt[:k, :].copy())
    return SvdFactors(
        left_vectors=U,
        singular_values=sigma[:k].copy(),
        right_vectors=Vt.T.copy(),
        spectrum=sigma,
        source_shape=M.shape,
    )


def pinv_apply(factors, target):
    """
    Form target @ pinv(M) from the factors of M without building pinv(M).

    Args:
        factors (SvdFactors): Truncated SVD of M (rows x cols)
        target (array_like): Matrix with `cols` columns

    Returns:
        np.ndarray: target @ right @ diag(1/sigma) @ left.T, shape (target rows x rows)
    """
    target = _as_matrix(target)
    if target.shape[1] != factors.right_vectors.shape[0]:
        raise DimensionError(
            f"Target has {target.shape[1]} columns but the factored matrix has "
            f"{factors.right_vectors.shape[0]}"
        )
    projected = (target @ factors.right_vectors) / factors.singular_values
    return projected @ factors.left_vectors.T


def kron(A, B):
    """Kronecker product of two non-empty matrices"""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.size == 0 or B.size == 0:
        raise DimensionError("Kronecker product of an empty matrix")
    return np.kron(A, B)


def khatri_rao_self(X):
    """
    Column-wise Kronecker product of X with itself.

    Column k of the result is x_k (x) x_k, i.e. (X (x) X) H without forming X (x) X.
    """
    X = _as_matrix(X)
    n, m = X.shape
    return (X[:, None, :] * X[None, :, :]).reshape(n * n, m)
