"""
Shared pytest fixtures for the identification toolkit tests
"""
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

# Load environment variables from .env file if it exists
try:
    from dotenv import load_dotenv
    env_path = Path(__file__).parent.parent / ".env"
    if env_path.exists():
        load_dotenv(env_path)
except ImportError:
    # python-dotenv not installed, skip .env loading
    pass

# Add repository root to path (modules are in root)
sys.path.insert(0, str(Path(__file__).parent.parent))

from config import EXPERIMENTS_DIR  # noqa: E402
from snapshots import from_trajectory  # noqa: E402

EXPERIMENTS = EXPERIMENTS_DIR


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test outputs"""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def scaled_to_radius(M, radius):
    return M * (radius / np.max(np.abs(np.linalg.eigvals(M))))


def simulate_planted(A, B, u, x0, N=None, Q=None, C=None, D=None):
    """Reference recursion written out independently of models.simulate_discrete"""
    n = A.shape[0]
    states = np.zeros((n, u.size + 1))
    states[:, 0] = x0
    outputs = np.zeros(u.size)
    for k in range(u.size):
        x = states[:, k]
        nxt = A @ x + B[:, 0] * u[k]
        if N is not None:
            nxt += N @ x * u[k]
        if Q is not None:
            nxt += Q @ np.kron(x, x)
        states[:, k + 1] = nxt
        if C is not None:
            outputs[k] = C[0] @ x + (D[0, 0] * u[k] if D is not None else 0.0)
    return states, outputs


def symmetric_quadratic(rng, n, scale):
    Q = rng.standard_normal((n, n, n)) * scale
    Q = 0.5 * (Q + Q.transpose(0, 2, 1))
    return Q.reshape(n, n * n)


@pytest.fixture
def planted_linear(rng):
    """Discrete linear system with input, n = 3, m = 50"""
    n, m = 3, 50
    A = scaled_to_radius(rng.standard_normal((n, n)), 0.8)
    B = rng.standard_normal((n, 1))
    u = rng.standard_normal(m)
    states, _ = simulate_planted(A, B, u, rng.standard_normal(n))
    return {"A": A, "B": B, "snap": from_trajectory(states, u, dt=0.1)}


@pytest.fixture
def planted_bilinear(rng):
    """Stable discrete bilinear system, n = 4, m = 200, white-noise input"""
    n, m = 4, 200
    A = scaled_to_radius(rng.standard_normal((n, n)), 0.9)
    N = rng.standard_normal((n, n))
    N *= 0.1 / np.linalg.norm(N, 2)
    B = rng.standard_normal((n, 1))
    C = rng.standard_normal((1, n))
    D = np.array([[0.3]])
    u = rng.standard_normal(m)
    states, y = simulate_planted(A, B, u, rng.standard_normal(n), N=N, C=C, D=D)
    return {"A": A, "B": B, "N": N, "C": C, "D": D,
            "snap": from_trajectory(states, u, outputs=y, dt=0.01)}


@pytest.fixture
def planted_quadratic(rng):
    """Quadratic-bilinear system with symmetric-slot Q, n = 3"""
    n, m = 3, 200
    A = scaled_to_radius(rng.standard_normal((n, n)), 0.6)
    N = 0.05 * rng.standard_normal((n, n))
    Q = symmetric_quadratic(rng, n, 0.1)
    B = 0.2 * rng.standard_normal((n, 1))
    u = rng.standard_normal(m)
    states, _ = simulate_planted(A, B, u, 0.3 * rng.standard_normal(n), N=N, Q=Q)
    return {"A": A, "B": B, "N": N, "Q": Q, "snap": from_trajectory(states, u, dt=0.01)}


@pytest.fixture
def vdp_config_path():
    return EXPERIMENTS / "vdp.cfg"


@pytest.fixture
def burgers_config_path():
    return EXPERIMENTS / "burgers.cfg"


@pytest.fixture
def small_burgers_overrides():
    """Short Burgers run for pipeline plumbing tests"""
    return ["n0=3", "horizon=0.5", "test_horizon=0.6", "tau_r=1e-6"]
