"""Coefficient quantization of CD filters and nonlinear gains."""

import logging

import numpy as np

from ..core.exceptions import QuantizationError
from ..core.models import FilterBank, FirFilter, FixedFormat, QuantizedFilter, QuantizedFilterBank
from ..core.types import RoundingMode
from .arithmetic import quantize_value
from .scaling import containing_exponent

logger = logging.getLogger(__name__)


def filter_exponent(fir: FirFilter, word_bits: int) -> int:
    """Per-filter scale_exp: smallest power of two containing the largest tap part."""
    peak = float(max(np.max(np.abs(fir.unique_taps.real)), np.max(np.abs(fir.unique_taps.imag))))
    if peak == 0.0:
        raise QuantizationError("cannot scale an all-zero filter")
    return containing_exponent(peak, word_bits)


def quantize_filter(
    fir: FirFilter,
    coeff_format: FixedFormat,
    mode: RoundingMode = RoundingMode.HALF_UP,
    scale_exp: int | None = None,
) -> QuantizedFilter:
    """
    Quantize the K+1 unique taps; symmetry is preserved by construction.

    The format's scale_exp is replaced by the filter's own exponent unless
    ``scale_exp`` is given explicitly.

    Raises:
        QuantizationError: if every tap is zero
    """
    if scale_exp is None:
        scale_exp = filter_exponent(fir, coeff_format.word_bits)
    fmt = coeff_format.with_scale(scale_exp)
    return QuantizedFilter(
        re_codes=quantize_value(fir.unique_taps.real, fmt, mode),
        im_codes=quantize_value(fir.unique_taps.imag, fmt, mode),
        fmt=fmt,
    )


def quantize_bank(
    bank: FilterBank,
    coeff_format: FixedFormat,
    mode: RoundingMode = RoundingMode.HALF_UP,
    scale_exps: list[int] | None = None,
) -> QuantizedFilterBank:
    """Quantize every filter of a bank independently (round to nearest)."""
    if scale_exps is not None and len(scale_exps) != bank.num_filters:
        raise QuantizationError(f"{len(scale_exps)} exponents for {bank.num_filters} filters")
    filters = tuple(
        quantize_filter(fir, coeff_format, mode, None if scale_exps is None else scale_exps[i])
        for i, fir in enumerate(bank.filters)
    )
    logger.debug(
        f"Quantized {bank.num_filters} filters to {coeff_format.word_bits} bits, "
        f"exponents {[f.fmt.scale_exp for f in filters]}"
    )
    return QuantizedFilterBank(
        filters=filters,
        step_sizes=bank.step_sizes,
        beta2=bank.beta2,
        sample_rate=bank.sample_rate,
        nonlinear_scales=bank.nonlinear_scales,
    )


def quantize_gain(gain: float, word_bits: int) -> tuple[int, FixedFormat]:
    """Quantize a positive nonlinear gain g to one code and its format."""
    if gain == 0.0:
        return 0, FixedFormat(word_bits=word_bits)
    fmt = FixedFormat(word_bits=word_bits, scale_exp=containing_exponent(abs(gain), word_bits))
    return int(quantize_value(gain, fmt)), fmt
