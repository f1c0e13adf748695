"""Type definitions and enums for the TD-DBP toolkit."""

from enum import Enum
from typing import Literal


class Nonlinearity(str, Enum):
    """Form of the nonlinear step between two CD filters."""

    EXACT = "exact"         # x * exp(-j g |x|^2)
    TAYLOR1 = "taylor1"     # x * (1 - j g |x|^2)
    OFF = "off"             # linear-only DBP


class Arithmetic(str, Enum):
    """Number system of the DBP datapath."""

    FLOAT = "float"
    FIXED = "fixed"


class RoundingMode(str, Enum):
    """Fixed-point rounding applied when dropping LSBs."""

    HALF_UP = "half_up"     # add 0.5 ulp, then truncate
    TRUNCATE = "truncate"   # floor


class SsfmScheme(str, Enum):
    """Placement of the nonlinear operator within a split step."""

    SYMMETRIC = "symmetric"
    ASYMMETRIC = "asymmetric"


class TaylorSign(str, Enum):
    """Sign of the imaginary term in the first-order nonlinear step."""

    COMPENSATING = "compensating"   # x (1 - j g |x|^2)
    AS_PRINTED = "as_printed"       # x (1 + j g |x|^2)

    @property
    def factor(self) -> int:
        """Multiplier applied to g in the imaginary term."""
        return -1 if self is TaylorSign.COMPENSATING else 1


class DesignMethod(str, Enum):
    """CD filter design method."""

    LSCO = "lsco"
    LEAST_SQUARES = "ls"


class BankSource(str, Enum):
    """Where an experiment variant gets its filter bank from."""

    LSCO = "lsco"
    LEARNED = "learned"
    FILE = "file"
    IDEAL = "ideal"


class FftCostModel(str, Enum):
    """Multiplication count model for one FFT of size N."""

    RADIX2 = "radix2"
    SPLIT_RADIX = "split_radix"


class ComplexMultiplier(str, Enum):
    """Real multiplies spent per complex multiply."""

    MULT4 = "mult4"
    MULT3 = "mult3"

    @property
    def real_multiplies(self) -> int:
        return 4 if self is ComplexMultiplier.MULT4 else 3


# Reported in place of +inf effective SNR
SNR_CAP_DB = 100.0

# Type aliases for physical units
Decibel = float
DecibelMilliwatt = float
Meters = float
Hertz = float
RadPerWatt = float

# Literal types for specific fields
CellStatus = Literal["ok", "failed"]
