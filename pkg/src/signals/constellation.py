"""Constellations, symbol generation and hard decisions."""

import logging
from typing import Sequence

import numpy as np

from ..core.exceptions import ConstellationError, ValidationError
from ..core.models import Constellation

logger = logging.getLogger(__name__)

_DECISION_CHUNK = 1 << 15


def _gray(values: np.ndarray) -> np.ndarray:
    return values ^ (values >> 1)


def qam_constellation(order: int) -> Constellation:
    """
    Square Gray-mapped QAM (order 4, 16, 64) or BPSK (order 2).

    ``points[label]`` is the symbol for bit pattern ``label``; adjacent
    points differ in exactly one bit. Mean power is normalized to 1.
    """
    if order == 2:
        return Constellation(points=[-1.0, 1.0], bits_per_symbol=1)

    side = int(round(np.sqrt(order)))
    if side * side != order or side < 2 or side & (side - 1):
        raise ConstellationError(f"order {order} is not a square power of four", {"order": order})
    bits_per_axis = side.bit_length() - 1

    levels = 2 * np.arange(side) - (side - 1)
    gray = _gray(np.arange(side))
    # Axis level index for each Gray label
    level_of_label = np.empty(side, dtype=int)
    level_of_label[gray] = np.arange(side)

    labels = np.arange(order)
    in_phase = levels[level_of_label[labels >> bits_per_axis]]
    quadrature = levels[level_of_label[labels & (side - 1)]]
    points = in_phase + 1j * quadrature
    points = points / np.sqrt(2.0 * (order - 1) / 3.0)

    return Constellation(points=points, bits_per_symbol=2 * bits_per_axis)


def generate_symbols(
    count: int,
    constellation: Constellation | Sequence[complex],
    seed: int,
) -> np.ndarray:
    """Draw ``count`` symbols uniformly from the constellation points."""
    if count <= 0:
        raise ValidationError("count", count, "must be positive")
    points = (
        constellation.points
        if isinstance(constellation, Constellation)
        else np.asarray(constellation, dtype=np.complex128)
    )
    if points.size == 0:
        raise ConstellationError("cannot draw symbols from an empty constellation")

    rng = np.random.default_rng(seed)
    return points[rng.integers(0, points.size, size=count)]


def hard_decision(symbols: np.ndarray, constellation: Constellation) -> np.ndarray:
    """Minimum-distance decision; returns integer labels (bit patterns)."""
    symbols = np.asarray(symbols, dtype=np.complex128)
    labels = np.empty(len(symbols), dtype=np.int64)
    for start in range(0, len(symbols), _DECISION_CHUNK):
        block = symbols[start:start + _DECISION_CHUNK]
        distances = np.abs(block[:, None] - constellation.points[None, :])
        labels[start:start + len(block)] = np.argmin(distances, axis=1)
    return labels


def labels_to_bits(labels: np.ndarray, bits_per_symbol: int) -> np.ndarray:
    """Unpack labels to a flat bit stream, MSB first."""
    labels = np.asarray(labels, dtype=np.int64)
    shifts = np.arange(bits_per_symbol - 1, -1, -1)
    return ((labels[:, None] >> shifts[None, :]) & 1).astype(np.uint8).ravel()


def symbols_to_bits(symbols: np.ndarray, constellation: Constellation) -> np.ndarray:
    """Hard decision followed by Gray demapping."""
    return labels_to_bits(hard_decision(symbols, constellation), constellation.bits_per_symbol)
