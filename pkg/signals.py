"""
Input signal module - parametric control inputs sampled on a uniform grid
"""
from dataclasses import dataclass, field

import numpy as np

from errors import ConfigError, DimensionError


class InputSignal:
    """Base class for control inputs u(t), defined for all t >= 0"""
    kind = "abstract"

    def __call__(self, t):
        raise NotImplementedError

    def to_text(self):
        """Config-file form `kind:p1,p2,...`"""
        raise NotImplementedError


@dataclass(frozen=True)
class CosineDecay(InputSignal):
    """amp * cos(freq t) * exp(-decay t)"""
    amp: float
    freq: float
    decay: float
    kind = "cosine_decay"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.amp * np.cos(self.freq * t) * np.exp(-self.decay * t)

    def to_text(self):
        return f"{self.kind}:{self.amp!r},{self.freq!r},{self.decay!r}"


@dataclass(frozen=True)
class SinCosCombo(InputSignal):
    """a1 sin(f1 t) + a2 cos(f2 t)"""
    a1: float
    f1: float
    a2: float
    f2: float
    kind = "sincos"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.a1 * np.sin(self.f1 * t) + self.a2 * np.cos(self.f2 * t)

    def to_text(self):
        return f"{self.kind}:{self.a1!r},{self.f1!r},{self.a2!r},{self.f2!r}"


def square(x):
    """Unit square wave sgn(sin x) with sgn(0) = +1"""
    return np.where(np.sin(np.asarray(x, dtype=float)) >= 0.0, 1.0, -1.0)


@dataclass(frozen=True)
class SquareWave(InputSignal):
    """amp * square(freq t)"""
    amp: float
    freq: float
    kind = "square"

    def __call__(self, t):
        return self.amp * square(self.freq * np.asarray(t, dtype=float))

    def to_text(self):
        return f"{self.kind}:{self.amp!r},{self.freq!r}"


@dataclass(frozen=True)
class ZeroInput(InputSignal):
    kind = "zero"

    def __call__(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def to_text(self):
        return self.kind


@dataclass(frozen=True)
class Custom(InputSignal):
    """
    Pre-sampled input held constant over each step of width dt.

    Times beyond the last sample hold the last value.
    """
    samples: tuple
    dt: float
    label: str = field(default="custom", compare=False)
    kind = "custom"

    def __post_init__(self):
        if len(self.samples) == 0:
            raise DimensionError("Custom signal needs at least one sample")
        if self.dt <= 0:
            raise ConfigError(f"Custom signal step must be positive, got {self.dt}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        values = np.asarray(self.samples, dtype=float)
        idx = np.clip(np.floor(t / self.dt + 1e-9).astype(int), 0, values.size - 1)
        return values[idx]

    def to_text(self):
        return self.label


def scaled_square(amp, freq, dt, m):
    """
    Custom signal amp * square(freq t) / (t + 1) sampled at t = k dt.

    The decaying envelope makes this input non-stationary, hence a Custom signal.
    """
    t = np.arange(m) * dt
    samples = amp * square(freq * t) / (t + 1.0)
    return Custom(tuple(float(s) for s in samples), dt, label=f"square_decay:{amp!r},{freq!r}")


def sample_signal(sig, dt, m):
    """
    Evaluate a signal on the grid t_k = k dt, k = 0..m-1.

    Returns:
        np.ndarray: 1-D array of length m
    """
    if dt <= 0:
        raise ConfigError(f"Time step must be positive, got {dt}")
    if m < 1:
        raise DimensionError(f"Need at least one sample, got m={m}")
    t = np.arange(m) * dt
    return np.asarray(sig(t), dtype=float).reshape(m)


_SIGNAL_ARITY = {
    "cosine_decay": (CosineDecay, 3),
    "sincos": (SinCosCombo, 4),
    "square": (SquareWave, 2),
}


def parse_signal(text, dt=None, m=None):
    """
    Parse the config form of a signal.

    `square_decay:amp,freq` needs the sampling grid (dt, m) because it becomes a Custom signal.
    """
    text = text.strip()
    kind, _, params = text.partition(":")
    kind = kind.strip().lower()
    try:
        values = [float(p) for p in params.split(",")] if params.strip() else []
    except ValueError:
        raise ConfigError(f"Unparsable signal parameters in {text!r}")

    if kind == "zero":
        return ZeroInput()
    if kind == "square_decay":
        if len(values) != 2:
            raise ConfigError(f"square_decay takes 2 parameters, got {len(values)}")
        if dt is None or m is None:
            raise ConfigError("square_decay needs the sampling grid (dt, m)")
        return scaled_square(values[0], values[1], dt, m)
    if kind not in _SIGNAL_ARITY:
        raise ConfigError(f"Unknown signal kind {kind!r}. Available: "
                          f"{sorted(list(_SIGNAL_ARITY) + ['zero', 'square_decay'])}")
    cls, arity = _SIGNAL_ARITY[kind]
    if len(values) != arity:
        raise ConfigError(f"{kind} takes {arity} parameters, got {len(values)}")
    return cls(*values)
