"""
Model structure tags - which regressor blocks and system matrices a fit uses
"""
from dataclasses import dataclass
from enum import Enum

from errors import ConfigError


class StructureKind(Enum):
    LINEAR = "linear"
    LINEAR_CONTROL = "linear_control"
    LINEAR_IO = "linear_io"
    BILINEAR = "bilinear"
    BILINEAR_IO = "bilinear_io"
    QUADRATIC_BILINEAR = "quadratic_bilinear"
    QUADRATIC_BILINEAR_IO = "quadratic_bilinear_io"


_IO = {StructureKind.LINEAR_IO, StructureKind.BILINEAR_IO, StructureKind.QUADRATIC_BILINEAR_IO}
_BILINEAR = {StructureKind.BILINEAR, StructureKind.BILINEAR_IO,
             StructureKind.QUADRATIC_BILINEAR, StructureKind.QUADRATIC_BILINEAR_IO}
_QUADRATIC = {StructureKind.QUADRATIC_BILINEAR, StructureKind.QUADRATIC_BILINEAR_IO}

# Omega row blocks, in order
STATE = "state"
INPUT = "input"
BILINEAR = "bilinear"
QUADRATIC = "quadratic"


@dataclass(frozen=True)
class ModelStructure:
    """Fit target; include_quadratic_output only matters for QB-IO"""
    kind: StructureKind
    include_quadratic_output: bool = True

    @classmethod
    def from_name(cls, name, include_quadratic_output=True):
        try:
            kind = StructureKind(str(name).strip().lower())
        except ValueError:
            raise ConfigError(f"Unknown model structure {name!r}. "
                              f"Available: {[k.value for k in StructureKind]}")
        return cls(kind, include_quadratic_output)

    @property
    def name(self):
        return self.kind.value

    @property
    def is_io(self):
        return self.kind in _IO

    @property
    def has_input(self):
        return self.kind is not StructureKind.LINEAR

    @property
    def has_bilinear(self):
        return self.kind in _BILINEAR

    @property
    def has_quadratic(self):
        return self.kind in _QUADRATIC

    @property
    def fits_quadratic_output(self):
        return self.has_quadratic and self.is_io and self.include_quadratic_output

    def blocks(self):
        """Ordered Omega block labels"""
        labels = [STATE]
        if self.has_input:
            labels.append(INPUT)
        if self.has_bilinear:
            labels.append(BILINEAR)
        if self.has_quadratic:
            labels.append(QUADRATIC)
        return labels

    def regressor_rows(self, n):
        sizes = {STATE: n, INPUT: 1, BILINEAR: n, QUADRATIC: n * n}
        return sum(sizes[b] for b in self.blocks())
