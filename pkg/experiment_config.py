"""
Experiment configuration - flat `key = value` files with command-line overrides
"""
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from config import (
    BURGERS_DEFAULT_N0,
    BURGERS_FULL_SCALE_N0,
    BURGERS_LENGTH,
    BURGERS_NU,
    DEFAULT_TAU_P,
    VDP_A,
    VDP_B,
    VDP_MU,
)
from benchmarks import BurgersConfig, VdpConfig
from errors import ConfigError
from linalg import TruncationPolicy
from signals import ZeroInput, parse_signal
from structure import ModelStructure

SYSTEMS = ("burgers", "vdp", "file")


def _parse_bool(value):
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"Expected a boolean, got {value!r}")


def _parse_optional_float(value):
    text = str(value).strip().lower()
    return None if text in ("", "none") else float(text)


def _parse_optional_int(value):
    text = str(value).strip().lower()
    return None if text in ("", "none") else int(text)


def _parse_vector(value):
    text = str(value).strip().lower()
    if text in ("", "none", "zero"):
        return None
    return tuple(float(v) for v in text.split(","))


# key -> parser; signals stay as text until the grid is known
_PARSERS = {
    "name": str,
    "system": lambda v: str(v).strip().lower(),
    "structure": lambda v: str(v).strip().lower(),
    "include_quadratic_output": _parse_bool,
    "dt": float,
    "horizon": float,
    "train_input": str,
    "test_input": str,
    "test_horizon": _parse_optional_float,
    "tau_p": _parse_optional_float,
    "rank_p": _parse_optional_int,
    "tau_r": _parse_optional_float,
    "rank_r": _parse_optional_int,
    "n0": int,
    "nu": float,
    "length": float,
    "output_index": _parse_optional_int,
    "mu": float,
    "a": float,
    "b": float,
    "x0": _parse_vector,
    "data_path": str,
    "output_dir": str,
    "save_full_model": _parse_bool,
    "save_snapshots": _parse_bool,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One identification experiment: data source, structure, grid, inputs, truncation"""
    name: str = "experiment"
    system: str = "burgers"
    structure: str = "bilinear_io"
    include_quadratic_output: bool = True
    dt: float = 1e-3
    horizon: float = 10.0
    train_input: str = "cosine_decay:0.5,10,0.3"
    test_input: str = ""
    test_horizon: Optional[float] = None
    tau_p: Optional[float] = DEFAULT_TAU_P
    rank_p: Optional[int] = None
    tau_r: Optional[float] = None
    rank_r: Optional[int] = None
    n0: int = BURGERS_DEFAULT_N0
    nu: float = BURGERS_NU
    length: float = BURGERS_LENGTH
    output_index: Optional[int] = None
    mu: float = VDP_MU
    a: float = VDP_A
    b: float = VDP_B
    x0: Optional[tuple] = None
    data_path: str = ""
    output_dir: str = ""
    save_full_model: bool = True
    save_snapshots: bool = False
    source: str = field(default="", compare=False)

    def __post_init__(self):
        if self.system not in SYSTEMS:
            raise ConfigError(f"Unknown system {self.system!r}. Available: {list(SYSTEMS)}")
        if self.system == "file" and not self.data_path:
            raise ConfigError("system = file needs data_path")
        self.model_structure()
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.system != "file":
            self.snapshot_count(self.horizon)
        if self.test_horizon is not None:
            self.snapshot_count(self.test_horizon)
        for key in ("tau_p", "tau_r"):
            value = getattr(self, key)
            if value is not None and not 0.0 < value < 1.0:
                raise ConfigError(f"{key} must lie in (0, 1), got {value}")
        if self.tau_p is not None and self.rank_p is not None:
            raise ConfigError("Set at most one of tau_p and rank_p")
        if self.tau_r is not None and self.rank_r is not None:
            raise ConfigError("Set at most one of tau_r and rank_r")
        for key in ("rank_p", "rank_r"):
            value = getattr(self, key)
            if value is not None and value < 1:
                raise ConfigError(f"{key} must be positive, got {value}")
        if self.system == "vdp" and self.x0 is not None and len(self.x0) != 6:
            raise ConfigError(f"van der Pol x0 needs 6 entries, got {len(self.x0)}")
        if self.system == "burgers":
            self.burgers_config()
        # fail early on malformed signals
        self.train_signal()
        if self.test_input:
            self.test_signal()

    # Derived objects ---------------------------------------------------------
    def model_structure(self):
        return ModelStructure.from_name(self.structure, self.include_quadratic_output)

    def snapshot_count(self, horizon):
        """Number of steps horizon/dt, which must be an integer within rounding"""
        steps = horizon / self.dt
        count = int(round(steps))
        if count < 1 or abs(steps - count) > 1e-9 * max(1.0, steps):
            raise ConfigError(f"horizon {horizon} is not an integer multiple of dt {self.dt}")
        return count

    def train_steps(self):
        return self.snapshot_count(self.horizon)

    def test_steps(self):
        return self.snapshot_count(self.test_horizon if self.test_horizon is not None else self.horizon)

    def train_signal(self):
        if not self.train_input:
            return ZeroInput()
        return parse_signal(self.train_input, self.dt, self.train_steps() if self.system != "file" else 1)

    def test_signal(self):
        if not self.test_input:
            return self.train_signal()
        return parse_signal(self.test_input, self.dt, self.test_steps())

    def policy_p(self):
        if self.rank_p is not None:
            return TruncationPolicy.fixed_rank(self.rank_p)
        if self.tau_p is not None:
            return TruncationPolicy.relative_tolerance(self.tau_p)
        return None

    def policy_r(self):
        """None means no reduction"""
        if self.rank_r is not None:
            return TruncationPolicy.fixed_rank(self.rank_r)
        if self.tau_r is not None:
            return TruncationPolicy.relative_tolerance(self.tau_r)
        return None

    def burgers_config(self):
        return BurgersConfig(n0=self.n0, nu=self.nu, length=self.length, output_index=self.output_index)

    def vdp_config(self):
        return VdpConfig(mu=self.mu, a=self.a, b=self.b)

    def with_overrides(self, **overrides):
        return replace(self, **overrides)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "source"}


def parse_assignments(lines, origin="<overrides>"):
    """Parse `key = value` lines into typed values"""
    values = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep:
            raise ConfigError(f"{origin}:{lineno}: expected key = value, got {raw.strip()!r}")
        if key not in _PARSERS:
            raise ConfigError(f"{origin}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _PARSERS[key](value.strip())
        except ValueError as e:
            raise ConfigError(f"{origin}:{lineno}: bad value for {key}: {e}")
    return values


def load_experiment_config(path=None, overrides=None, full_scale=False):
    """
    Build an ExperimentConfig from a file plus `key=value` overrides.

    Args:
        path (str): config file; None starts from the defaults
        overrides (list): `key=value` strings applied after the file
        full_scale (bool): switch Burgers to the n0 = 40 discretization

    Returns:
        ExperimentConfig
    """
    values = {}
    source = ""
    if path:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"Config file not found: {path}")
        values.update(parse_assignments(path.read_text(encoding="utf-8").splitlines(), str(path)))
        source = str(path)
        values.setdefault("name", path.stem)
    if overrides:
        override_values = parse_assignments(overrides)
        # an explicit rank or tolerance replaces the other one from the file
        for rank_key, tau_key in (("rank_p", "tau_p"), ("rank_r", "tau_r")):
            if rank_key in override_values and tau_key not in override_values:
                values.pop(tau_key, None)
            if tau_key in override_values and rank_key not in override_values:
                values.pop(rank_key, None)
        values.update(override_values)
    if "rank_p" in values and values["rank_p"] is not None and "tau_p" not in values:
        values["tau_p"] = None
    if full_scale:
        values["n0"] = BURGERS_FULL_SCALE_N0
        values["name"] = values.get("name", "experiment") + "_full"
    return ExperimentConfig(source=source, **values)
