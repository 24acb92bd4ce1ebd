"""
Snapshot module - paired state/input/output matrices and their CSV form
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from config import CSV_PRECISION
from errors import DimensionError, ConfigError


@dataclass(frozen=True, eq=False)
class SnapshotSet:
    """
    Uniformly sampled trajectory data.

    X holds x_0..x_{m-1} column-wise, Xs holds x_1..x_m, U (1 x m) and the
    optional Y (1 x m) are aligned with the columns of X.
    """
    X: np.ndarray
    Xs: np.ndarray
    U: np.ndarray
    dt: float
    Y: Optional[np.ndarray] = None

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        Xs = np.atleast_2d(np.asarray(self.Xs, dtype=float))
        U = np.asarray(self.U, dtype=float).reshape(1, -1)
        if X.size == 0:
            raise DimensionError("Snapshot matrix X is empty")
        if X.shape != Xs.shape:
            raise DimensionError(f"X {X.shape} and Xs {Xs.shape} must share a shape")
        if U.shape[1] != X.shape[1]:
            raise DimensionError(f"U has {U.shape[1]} entries, expected {X.shape[1]}")
        if not self.dt > 0:
            raise ConfigError(f"Time step must be positive, got {self.dt}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Xs", Xs)
        object.__setattr__(self, "U", U)
        if self.Y is not None:
            Y = np.asarray(self.Y, dtype=float).reshape(1, -1)
            if Y.shape[1] != X.shape[1]:
                raise DimensionError(f"Y has {Y.shape[1]} entries, expected {X.shape[1]}")
            object.__setattr__(self, "Y", Y)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def m(self):
        return self.X.shape[1]

    @property
    def has_output(self):
        return self.Y is not None

    def states(self):
        """Full record x_0..x_m (n x (m+1))"""
        return np.hstack([self.X, self.Xs[:, -1:]])

    def times(self):
        return np.arange(self.m + 1) * self.dt


def from_trajectory(states, inputs, outputs=None, dt=1.0):
    """
    Split a simulated record into snapshot pairs.

    Args:
        states (array_like): n x (m+1) states x_0..x_m
        inputs (array_like): m inputs u_0..u_{m-1}
        outputs (array_like): optional m outputs y_0..y_{m-1}
        dt (float): sampling step in seconds

    Returns:
        SnapshotSet
    """
    states = np.atleast_2d(np.asarray(states, dtype=float))
    inputs = np.asarray(inputs, dtype=float).reshape(-1)
    if states.shape[1] < 2:
        raise DimensionError("A trajectory needs at least two states")
    m = states.shape[1] - 1
    if inputs.size != m:
        raise DimensionError(f"Trajectory has {m + 1} states but {inputs.size} inputs; expected {m}")
    if outputs is not None:
        outputs = np.asarray(outputs, dtype=float).reshape(-1)
        if outputs.size != m:
            raise DimensionError(f"Expected {m} outputs, got {outputs.size}")
    return SnapshotSet(X=states[:, :m], Xs=states[:, 1:], U=inputs, dt=dt, Y=outputs)


def save_snapshots_csv(snap, path):
    """
    Write `t,u,y,x1..xn`, one line per sample k = 0..m.

    The last line carries x_m only; missing u/y entries are written as nan.
    """
    path = Path(path)
    rows = snap.m + 1
    u = np.full(rows, np.nan)
    u[:-1] = snap.U[0]
    y = np.full(rows, np.nan)
    if snap.Y is not None:
        y[:-1] = snap.Y[0]
    table = np.column_stack([snap.times(), u, y, snap.states().T])
    header = ",".join(["t", "u", "y"] + [f"x{i + 1}" for i in range(snap.n)])
    np.savetxt(path, table, fmt=f"%.{CSV_PRECISION}g", delimiter=",", header=header, comments="")
    return str(path)


def load_snapshots_csv(path):
    """Read a snapshot CSV written by save_snapshots_csv"""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Snapshot file not found: {path}")
    with open(path, encoding="utf-8") as f:
        header = f.readline().strip().split(",")
    if header[:3] != ["t", "u", "y"] or len(header) < 4:
        raise ConfigError(f"Unexpected snapshot header in {path}: {header[:4]}")
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if table.shape[0] < 2:
        raise DimensionError("Snapshot file must hold at least two samples")
    t = table[:, 0]
    u = table[:-1, 1]
    y = table[:-1, 2]
    states = table[:, 3:].T
    outputs = None if np.all(np.isnan(y)) else y
    return from_trajectory(states, u, outputs, dt=float(t[1] - t[0]))
