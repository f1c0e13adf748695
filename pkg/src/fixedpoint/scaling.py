"""Power-of-two scaling of fixed-point stages."""

import logging
import math
from typing import Sequence

import numpy as np

from ..core.exceptions import ScalingError
from ..core.models import FixedFormat

logger = logging.getLogger(__name__)


def containing_exponent(max_abs: float, word_bits: int) -> int:
    """
    scale_exp whose range just contains ``max_abs``: the smallest p with
    2**p > max_abs, minus the word_bits - 1 magnitude bits.
    """
    if not (math.isfinite(max_abs) and max_abs > 0.0):
        raise ValueError(f"max_abs must be positive and finite, got {max_abs}")
    _, exponent = math.frexp(max_abs)
    return exponent - (word_bits - 1)


def headroom_exponent(rms: float, word_bits: int, clip_sigma: float) -> int:
    """scale_exp placing the clip level near clip_sigma * rms (power of two, rounded)."""
    return math.floor(math.log2(rms * clip_sigma) + 0.5) - (word_bits - 1)


def propagate_scaling(
    chain: Sequence[float],
    word_bits: int,
    clip_sigma: float = 4.0,
    input_rms: float = 1.0,
) -> list[FixedFormat]:
    """
    Assign each stage of a chain its own scale exponent.

    Args:
        chain: RMS gain of every stage relative to the previous one (the
               first entry relative to the input)
        word_bits: Word length shared by all stages
        clip_sigma: Headroom in RMS units before clipping
        input_rms: Per-component RMS at the chain input

    Returns:
        One FixedFormat per stage

    Raises:
        ScalingError: for an empty chain or a stage without power
    """
    if not chain:
        raise ScalingError(0, "empty chain")
    formats = []
    rms = input_rms
    for stage, gain in enumerate(chain):
        rms *= gain
        if not (math.isfinite(rms) and rms > 0.0):
            raise ScalingError(stage, f"degenerate stage RMS {rms}")
        formats.append(FixedFormat(word_bits=word_bits, scale_exp=headroom_exponent(rms, word_bits, clip_sigma)))
    logger.debug(f"Stage scale exponents: {[f.scale_exp for f in formats]}")
    return formats


def component_rms(x: np.ndarray) -> float:
    """RMS of the real and imaginary components (complex) or of the values (real)."""
    x = np.asarray(x)
    if x.size == 0:
        return 0.0
    if np.iscomplexobj(x):
        return float(np.sqrt(np.mean(np.abs(x) ** 2) / 2.0))
    return float(np.sqrt(np.mean(x**2)))


def clip_rate(x: np.ndarray, fmt: FixedFormat) -> float:
    """Fraction of real components outside the representable range."""
    x = np.asarray(x)
    parts = np.concatenate([x.real.ravel(), x.imag.ravel()]) if np.iscomplexobj(x) else x.ravel()
    if parts.size == 0:
        return 0.0
    outside = (parts > fmt.max_value) | (parts < fmt.min_value)
    return float(np.mean(outside))
