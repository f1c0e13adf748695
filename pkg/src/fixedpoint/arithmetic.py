"""Bit-exact two's-complement arithmetic on integer codes.

A fixed-point value is an integer code plus a FixedFormat; its real value is
code * 2**scale_exp. Products and sums are formed exactly on integers and
rounded only where a quantizer sits. Code arrays are int64, or Python-int
object arrays when an intermediate could exceed 62 bits.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..core.exceptions import QuantizationError
from ..core.models import FixedFormat
from ..core.types import RoundingMode

logger = logging.getLogger(__name__)

# Widest intermediate kept in int64 before switching to Python ints
INT64_SAFE_BITS = 62


def needs_wide(bits: int) -> bool:
    return bits > INT64_SAFE_BITS


def as_codes(codes: np.ndarray, wide: bool) -> np.ndarray:
    """View codes as int64 or as Python-int objects."""
    codes = np.asarray(codes)
    if wide:
        return codes.astype(object)
    return codes.astype(np.int64)


def saturate(codes: np.ndarray, fmt: FixedFormat) -> np.ndarray:
    """Clamp codes to the format range; returns int64."""
    clamped = np.minimum(np.maximum(np.asarray(codes), fmt.min_code), fmt.max_code)
    return np.asarray(clamped).astype(np.int64)


def quantize_value(
    x: np.ndarray | float,
    fmt: FixedFormat,
    mode: RoundingMode = RoundingMode.HALF_UP,
) -> np.ndarray:
    """
    Real value(s) -> saturated integer codes of ``fmt``.

    half_up: floor(x / 2**scale_exp + 0.5); truncate: floor(x / 2**scale_exp).

    Raises:
        QuantizationError: for NaN or infinite input
    """
    mode = RoundingMode(mode)
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise QuantizationError("cannot quantize non-finite values", {"format": fmt.model_dump()})
    # Pre-clamp so the +0.5 stays exact for huge inputs
    scaled = np.clip(np.ldexp(x, -fmt.scale_exp), fmt.min_code - 1.0, fmt.max_code + 1.0)
    if mode is RoundingMode.HALF_UP:
        codes = np.floor(scaled + 0.5)
    else:
        codes = np.floor(scaled)
    return saturate(codes, fmt)


def dequantize(codes: np.ndarray, fmt: FixedFormat) -> np.ndarray:
    """Integer codes -> real values."""
    return np.ldexp(np.asarray(codes).astype(np.float64), fmt.scale_exp)


def requantize_code(
    codes: np.ndarray,
    from_exp: int,
    fmt: FixedFormat,
    mode: RoundingMode = RoundingMode.HALF_UP,
) -> np.ndarray:
    """
    Rescale exact codes at 2**from_exp onto ``fmt``, rounding and saturating.

    Dropping s bits with half_up adds 2**(s-1) before the arithmetic shift.
    """
    mode = RoundingMode(mode)
    codes = np.asarray(codes)
    shift = fmt.scale_exp - from_exp
    if shift > 0:
        wide = codes.dtype == object or shift >= INT64_SAFE_BITS or (
            codes.size and int(np.max(np.abs(codes))) >= 1 << INT64_SAFE_BITS
        )
        codes = as_codes(codes, bool(wide))
        if mode is RoundingMode.HALF_UP:
            codes = (codes + (1 << (shift - 1))) >> shift
        else:
            codes = codes >> shift
    elif shift < 0:
        left = -shift
        # Clamp just outside the range so the shift cannot overflow but still saturates
        low = -((-fmt.min_code) >> left) - 1
        high = (fmt.max_code >> left) + 1
        codes = np.minimum(np.maximum(codes, low), high)
        codes = as_codes(codes, codes.dtype == object) << left
    return saturate(codes, fmt)


def clip(x: np.ndarray | complex, fmt: FixedFormat) -> np.ndarray:
    """Saturating clamp of real values; real and imaginary parts independently."""
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return np.clip(x.real, fmt.min_value, fmt.max_value) + 1j * np.clip(
            x.imag, fmt.min_value, fmt.max_value
        )
    return np.clip(x, fmt.min_value, fmt.max_value)


def quantize_complex(
    z: np.ndarray,
    fmt: FixedFormat,
    mode: RoundingMode = RoundingMode.HALF_UP,
) -> tuple[np.ndarray, np.ndarray]:
    z = np.asarray(z, dtype=np.complex128)
    return quantize_value(z.real, fmt, mode), quantize_value(z.imag, fmt, mode)


def dequantize_complex(re_codes: np.ndarray, im_codes: np.ndarray, fmt: FixedFormat) -> np.ndarray:
    return dequantize(re_codes, fmt) + 1j * dequantize(im_codes, fmt)


@dataclass(frozen=True)
class FixedArray:
    """Integer codes sharing one format."""

    codes: np.ndarray
    fmt: FixedFormat

    @classmethod
    def from_real(
        cls,
        x: np.ndarray | float,
        fmt: FixedFormat,
        mode: RoundingMode = RoundingMode.HALF_UP,
    ) -> "FixedArray":
        return cls(quantize_value(x, fmt, mode), fmt)

    def to_real(self) -> np.ndarray:
        return dequantize(self.codes, self.fmt)


def requantize_product(
    a: FixedArray,
    b: FixedArray,
    out_fmt: FixedFormat,
    mode: RoundingMode = RoundingMode.HALF_UP,
) -> FixedArray:
    """Exact integer product at 2**(a.scale + b.scale), rounded onto ``out_fmt``."""
    wide = needs_wide(a.fmt.word_bits + b.fmt.word_bits)
    product = as_codes(a.codes, wide) * as_codes(b.codes, wide)
    return FixedArray(
        requantize_code(product, a.fmt.scale_exp + b.fmt.scale_exp, out_fmt, mode),
        out_fmt,
    )
