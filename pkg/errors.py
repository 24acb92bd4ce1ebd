"""
Exception and warning types shared by the identification toolkit.

Config problems map to CLI exit code 2, numerical failures to exit code 3.
"""


class StructDmdError(Exception):
    """Base class for all toolkit errors"""
    exit_code = 1


class ConfigError(StructDmdError, ValueError):
    """Invalid experiment configuration or parameter"""
    exit_code = 2


class PolicyError(ConfigError):
    """Invalid truncation policy"""


class StructureMismatchError(ConfigError):
    """Model structure and data/config disagree"""


class DimensionError(StructDmdError, ValueError):
    """Array shapes are inconsistent or empty"""
    exit_code = 2


class NumericalError(StructDmdError, RuntimeError):
    """A numerical computation could not be completed"""
    exit_code = 3


class SingularRegressorError(NumericalError):
    """The regressor carries no retained singular value"""


class DivergenceError(NumericalError):
    """A simulation produced a non-finite state"""

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"Simulation diverged at step {step} (non-finite state)")


class NumericalWarning(UserWarning):
    """Recoverable numerical situation (clipped rank, vanishing regressor rows, ...)"""
