"""
Model module - discrete/continuous structured systems, simulation, conversion, persistence

Block shapes for a model of order n with scalar input and output:
    A (n, n)   B (n, 1)   N (n, n)   Q (n, n^2)
    C (1, n)   D (1, 1)   F (1, n)   K (1, n^2)
Absent blocks are None and act as zero. A, N and Q may be scipy sparse matrices.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import scipy.sparse as sp

from config import CSV_PRECISION
from errors import (
    ConfigError,
    DimensionError,
    DivergenceError,
    NumericalError,
    StructDmdError,
    StructureMismatchError,
)
from structure import ModelStructure

BLOCK_NAMES = ("A", "B", "N", "Q", "C", "D", "F", "K")
STATE_BLOCKS = ("A", "B", "N", "Q")
OUTPUT_BLOCKS = ("C", "D", "F", "K")


def dense(M):
    """ndarray view of a dense or sparse block"""
    if M is None:
        return None
    if sp.issparse(M):
        return M.toarray()
    return np.asarray(M, dtype=float)


def _as_block(M, shape, name):
    if M is None:
        return None
    if sp.issparse(M):
        M = M.tocsr().astype(float)
    else:
        M = np.asarray(M, dtype=float)
        if M.size == int(np.prod(shape)):
            M = M.reshape(shape)
    if M.shape != shape:
        raise DimensionError(f"Block {name} has shape {M.shape}, expected {shape}")
    return M


@dataclass(kw_only=True, eq=False)
class _StructuredModel:
    A: object
    structure: ModelStructure
    B: Optional[object] = None
    N: Optional[object] = None
    Q: Optional[object] = None
    C: Optional[object] = None
    D: Optional[object] = None
    F: Optional[object] = None
    K: Optional[object] = None
    basis: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.A is None:
            raise DimensionError("Block A is required")
        A = self.A.tocsr().astype(float) if sp.issparse(self.A) else np.atleast_2d(np.asarray(self.A, dtype=float))
        n = A.shape[0]
        if A.shape != (n, n):
            raise DimensionError(f"Block A must be square, got {A.shape}")
        self.A = A
        shapes = {"B": (n, 1), "N": (n, n), "Q": (n, n * n),
                  "C": (1, n), "D": (1, 1), "F": (1, n), "K": (1, n * n)}
        for name, shape in shapes.items():
            setattr(self, name, _as_block(getattr(self, name), shape, name))

        s = self.structure
        allowed = {"B": s.has_input, "N": s.has_bilinear, "Q": s.has_quadratic,
                   "C": s.is_io, "D": s.is_io, "F": s.is_io and s.has_bilinear,
                   "K": s.is_io and s.has_quadratic}
        for name, ok in allowed.items():
            if getattr(self, name) is not None and not ok:
                raise StructureMismatchError(f"Block {name} is not part of structure {s.name}")

        if self.basis is not None:
            basis = np.asarray(self.basis, dtype=float)
            if basis.ndim != 2 or basis.shape[1] != n:
                raise DimensionError(f"Basis has shape {basis.shape}, expected (n_full, {n})")
            self.basis = basis

    @property
    def order(self):
        return self.A.shape[0]

    @property
    def has_output(self):
        return any(getattr(self, name) is not None for name in OUTPUT_BLOCKS)

    def blocks(self):
        """Present blocks by name"""
        return {name: getattr(self, name) for name in BLOCK_NAMES if getattr(self, name) is not None}

    def _map_blocks(self, transform):
        return {name: transform(name, getattr(self, name)) if getattr(self, name) is not None else None
                for name in BLOCK_NAMES}


@dataclass(kw_only=True, eq=False)
class ContinuousModel(_StructuredModel):
    """x' = A x + Q (x (x) x) + N x u + B u,  y = C x + K (x (x) x) + F x u + D u"""


@dataclass(kw_only=True, eq=False)
class DiscreteModel(_StructuredModel):
    """x_{k+1} = A x_k + Q (x_k (x) x_k) + N x_k u_k + B u_k, same output map as ContinuousModel"""
    dt: float

    def __post_init__(self):
        super().__post_init__()
        if not self.dt > 0:
            raise ConfigError(f"Time step must be positive, got {self.dt}")


def _identity_like(A):
    n = A.shape[0]
    return sp.identity(n, format="csr") if sp.issparse(A) else np.eye(n)


def discrete_to_continuous(model):
    """
    Invert the explicit Euler map: A' = (A - I)/dt, B' = B/dt, N' = N/dt, Q' = Q/dt.

    Feed-through blocks C, D, F, K are copied unchanged.
    """
    dt = model.dt
    if not dt > 0:
        raise ConfigError(f"Time step must be positive, got {dt}")

    def convert(name, block):
        if name == "A":
            return (block - _identity_like(block)) / dt
        if name in STATE_BLOCKS:
            return block / dt
        return block.copy()

    return ContinuousModel(structure=model.structure, basis=model.basis, **model._map_blocks(convert))


def continuous_to_discrete(model, dt):
    """Explicit Euler discretization: A~ = I + dt A, B~ = dt B, N~ = dt N, Q~ = dt Q"""
    if not dt > 0:
        raise ConfigError(f"Time step must be positive, got {dt}")

    def convert(name, block):
        if name == "A":
            return _identity_like(block) + dt * block
        if name in STATE_BLOCKS:
            return dt * block
        return block.copy()

    return DiscreteModel(structure=model.structure, basis=model.basis, dt=dt, **model._map_blocks(convert))


def _vector(block):
    return None if block is None else dense(block).reshape(-1)


def simulate_discrete(model, u, x0):
    """
    Run the discrete recursion from x0 under inputs u_0..u_{m-1}.

    Returns:
        tuple: (states n x (m+1), outputs of length m or None)
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    x = np.asarray(x0, dtype=float).reshape(-1)
    n = model.order
    if x.size != n:
        raise DimensionError(f"Initial state has length {x.size}, model order is {n}")
    m = u.size

    A, N, Q = model.A, model.N, model.Q
    b = _vector(model.B)
    c, f = _vector(model.C), _vector(model.F)
    K = model.K
    d = float(dense(model.D)[0, 0]) if model.D is not None else None
    with_output = model.has_output

    states = np.empty((n, m + 1))
    states[:, 0] = x
    outputs = np.zeros(m) if with_output else None

    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(m):
            uk = u[k]
            xx = np.outer(x, x).reshape(-1) if (Q is not None or K is not None) else None
            if with_output:
                y = 0.0
                if c is not None:
                    y += c @ x
                if K is not None:
                    y += (K @ xx)[0]
                if f is not None:
                    y += (f @ x) * uk
                if d is not None:
                    y += d * uk
                outputs[k] = y

            x_next = A @ x
            if Q is not None:
                x_next = x_next + Q @ xx
            if N is not None:
                x_next = x_next + (N @ x) * uk
            if b is not None:
                x_next = x_next + b * uk
            if not np.all(np.isfinite(x_next)):
                raise DivergenceError(k + 1)
            states[:, k + 1] = x_next
            x = x_next

    return states, outputs


def simulate_continuous(model, u, x0, dt):
    """Explicit Euler simulation of a continuous model"""
    return simulate_discrete(continuous_to_discrete(model, dt), u, x0)


def project_state(model, x0):
    """Reduced initial state V^T x0 (x0 itself for a full-order model)"""
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if model.basis is None:
        return x0
    if x0.size != model.basis.shape[0]:
        raise DimensionError(f"State has length {x0.size}, basis expects {model.basis.shape[0]}")
    return model.basis.T @ x0


def lift_states(model, reduced_states):
    """Map reduced states back to full coordinates, x = V x~"""
    if model.basis is None:
        return np.asarray(reduced_states, dtype=float)
    return model.basis @ np.asarray(reduced_states, dtype=float)


def absolute_error_series(y_ref, y_test):
    y_ref = np.asarray(y_ref, dtype=float).reshape(-1)
    y_test = np.asarray(y_test, dtype=float).reshape(-1)
    if y_ref.shape != y_test.shape:
        raise DimensionError(f"Output lengths differ: {y_ref.size} vs {y_test.size}")
    return np.abs(y_ref - y_test)


def relative_output_error(y_ref, y_test):
    """||y_ref - y_test||_2 / ||y_ref||_2"""
    y_ref = np.asarray(y_ref, dtype=float).reshape(-1)
    error = absolute_error_series(y_ref, y_test)
    ref_norm = np.linalg.norm(y_ref)
    if ref_norm == 0.0:
        raise NumericalError("Reference output has zero norm")
    return float(np.linalg.norm(error) / ref_norm)


# Persistence ---------------------------------------------------------------

MODEL_FORMAT_HEADER = "# structdmd model v1"


def _format_row(row):
    return " ".join(f"{v:.{CSV_PRECISION}g}" for v in row)


def save_model(model, path):
    """
    Write a model as plain text.

    Header lines `key = value` (kind, structure, include_quadratic_output, n, dt),
    then one `[NAME] rows cols` section per present block followed by its rows
    in row-major decimal with 17 significant digits.
    """
    path = Path(path)
    kind = "discrete" if isinstance(model, DiscreteModel) else "continuous"
    lines = [
        MODEL_FORMAT_HEADER,
        f"kind = {kind}",
        f"structure = {model.structure.name}",
        f"include_quadratic_output = {str(model.structure.include_quadratic_output).lower()}",
        f"n = {model.order}",
    ]
    if kind == "discrete":
        lines.append(f"dt = {float(model.dt)!r}")
    sections = dict(model.blocks())
    if model.basis is not None:
        sections["basis"] = model.basis
    for name, block in sections.items():
        block = dense(block)
        lines.append(f"[{name}] {block.shape[0]} {block.shape[1]}")
        lines.extend(_format_row(row) for row in block)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


def load_model(path):
    """Read a model written by save_model"""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Model file not found: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != MODEL_FORMAT_HEADER:
        raise ConfigError(f"{path} is not a model file")

    try:
        header, blocks = _parse_model_lines(lines)
        structure = ModelStructure.from_name(header["structure"],
                                             header.get("include_quadratic_output", "true") == "true")
        basis = blocks.pop("basis", None)
        if header.get("kind") == "discrete":
            return DiscreteModel(structure=structure, dt=float(header["dt"]), basis=basis, **blocks)
        return ContinuousModel(structure=structure, basis=basis, **blocks)
    except KeyError as e:
        raise ConfigError(f"{path}: malformed model file, missing {e.args[0]!r}") from e
    except (IndexError, ValueError) as e:
        if isinstance(e, StructDmdError):
            raise
        raise ConfigError(f"{path}: malformed model file ({e})") from e


def _parse_model_lines(lines):
    header = {}
    blocks = {}
    i = 1
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            name, rows, cols = line[1:].replace("]", " ").split()
            rows, cols = int(rows), int(cols)
            if i + rows > len(lines):
                raise IndexError(f"block [{name}] needs {rows} rows, file ends after {len(lines) - i}")
            data = np.array([[float(v) for v in lines[i + r].split()] for r in range(rows)])
            blocks[name] = data.reshape(rows, cols)
            i += rows
        else:
            key, _, value = line.partition("=")
            header[key.strip()] = value.strip()
    return header, blocks
