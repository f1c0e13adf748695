"""Root-raised-cosine pulse shaping, matched filtering and resampling.

Shaping and matched filtering are circular: a block of N symbols is
treated as one period of a periodic waveform, so no symbols are lost to
filter transients and the channel simulation can use plain FFTs.
"""

import logging

import numpy as np
import scipy.signal

from ..core.exceptions import PulseShapeError, ValidationError
from ..core.models import ComplexSignal

logger = logging.getLogger(__name__)

# Tail energy a truncated RRC may lose relative to a long reference pulse
MAX_TAIL_ENERGY = 1e-4
_REFERENCE_SPAN_FACTOR = 8


def _rrc_samples(t: np.ndarray, rolloff: float) -> np.ndarray:
    """Unnormalized RRC impulse response at times ``t`` in symbol periods."""
    t = np.asarray(t, dtype=np.float64)
    beta = rolloff
    h = np.empty_like(t)

    at_zero = np.isclose(t, 0.0, rtol=0.0, atol=1e-12)
    singular = np.isclose(np.abs(t), 1.0 / (4.0 * beta), rtol=0.0, atol=1e-12)
    regular = ~(at_zero | singular)

    tr = t[regular]
    h[regular] = (
        np.sin(np.pi * tr * (1.0 - beta)) + 4.0 * beta * tr * np.cos(np.pi * tr * (1.0 + beta))
    ) / (np.pi * tr * (1.0 - (4.0 * beta * tr) ** 2))
    h[at_zero] = 1.0 - beta + 4.0 * beta / np.pi
    h[singular] = (beta / np.sqrt(2.0)) * (
        (1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * beta))
        + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * beta))
    )
    return h


def _sample_times(samples_per_symbol: int, span_symbols: int) -> np.ndarray:
    half = (span_symbols * samples_per_symbol) // 2
    return np.arange(-half, half + 1) / samples_per_symbol


def rrc_tail_energy(samples_per_symbol: int, rolloff: float, span_symbols: int) -> float:
    """Fraction of pulse energy outside ``span_symbols``."""
    kept = _rrc_samples(_sample_times(samples_per_symbol, span_symbols), rolloff)
    reference = _rrc_samples(
        _sample_times(samples_per_symbol, _REFERENCE_SPAN_FACTOR * span_symbols), rolloff
    )
    return float(max(1.0 - np.sum(kept**2) / np.sum(reference**2), 0.0))


def rrc_taps(samples_per_symbol: int, rolloff: float, span_symbols: int) -> np.ndarray:
    """
    Unit-energy RRC taps, centered, ``span_symbols * samples_per_symbol + 1`` long.

    Raises:
        PulseShapeError: if the span truncates more than MAX_TAIL_ENERGY
    """
    if not 0.0 < rolloff <= 1.0:
        raise ValidationError("rolloff", rolloff, "must lie in (0, 1]")
    if span_symbols < 1:
        raise ValidationError("span_symbols", span_symbols, "must be positive")

    tail = rrc_tail_energy(samples_per_symbol, rolloff, span_symbols)
    if tail > MAX_TAIL_ENERGY:
        raise PulseShapeError(span_symbols, tail, MAX_TAIL_ENERGY)

    taps = _rrc_samples(_sample_times(samples_per_symbol, span_symbols), rolloff)
    return taps / np.sqrt(np.sum(taps**2))


def circular_kernel(taps: np.ndarray, length: int) -> np.ndarray:
    """Frequency response of centered ``taps`` wrapped onto ``length`` samples."""
    center = len(taps) // 2
    wrapped = np.zeros(length, dtype=np.float64)
    np.add.at(wrapped, (np.arange(len(taps)) - center) % length, taps)
    return np.fft.fft(wrapped)


def pulse_shape(
    symbols: np.ndarray,
    samples_per_symbol: int,
    rolloff: float,
    span_symbols: int,
    symbol_rate: float = 20e9,
) -> ComplexSignal:
    """
    Upsample and RRC-filter a symbol block (circularly).

    Samples are scaled by sqrt(samples_per_symbol) so unit-power symbols give
    a unit-power waveform. Symbol n sits at sample n * samples_per_symbol.
    """
    if samples_per_symbol < 2:
        raise ValidationError("samples_per_symbol", samples_per_symbol, "must be at least 2")
    symbols = np.asarray(symbols, dtype=np.complex128)
    taps = rrc_taps(samples_per_symbol, rolloff, span_symbols)

    length = len(symbols) * samples_per_symbol
    upsampled = np.zeros(length, dtype=np.complex128)
    upsampled[::samples_per_symbol] = symbols
    shaped = np.fft.ifft(np.fft.fft(upsampled) * circular_kernel(taps, length))

    return ComplexSignal(
        samples=shaped * np.sqrt(samples_per_symbol),
        sample_rate=symbol_rate * samples_per_symbol,
        samples_per_symbol=samples_per_symbol,
    )


def matched_filter(signal: ComplexSignal, rolloff: float, span_symbols: int) -> np.ndarray:
    """Circular RRC matched filter, then one sample per symbol."""
    sps = signal.samples_per_symbol
    taps = rrc_taps(sps, rolloff, span_symbols)
    filtered = np.fft.ifft(np.fft.fft(signal.samples) * circular_kernel(taps, len(signal)))
    return filtered[::sps] / np.sqrt(sps)


def resample(signal: ComplexSignal, samples_per_symbol: int) -> ComplexSignal:
    """Fourier resampling to a new integer oversampling factor."""
    if samples_per_symbol < 1:
        raise ValidationError("samples_per_symbol", samples_per_symbol, "must be positive")
    if samples_per_symbol == signal.samples_per_symbol:
        return signal
    num = signal.num_symbols * samples_per_symbol
    logger.debug(f"Resampling {len(signal)} -> {num} samples")
    return ComplexSignal(
        samples=scipy.signal.resample(signal.samples, num),
        sample_rate=signal.symbol_rate * samples_per_symbol,
        samples_per_symbol=samples_per_symbol,
    )
