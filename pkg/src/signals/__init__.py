"""Signal core - constellations, pulse shaping and quality metrics."""

from .constellation import (
    generate_symbols,
    hard_decision,
    labels_to_bits,
    qam_constellation,
    symbols_to_bits,
)
from .metrics import ber_count, effective_snr, measure
from .pulse import matched_filter, pulse_shape, resample, rrc_taps
from .units import dbm_to_watt, signal_power, watt_to_dbm

__all__ = [
    "generate_symbols",
    "hard_decision",
    "labels_to_bits",
    "qam_constellation",
    "symbols_to_bits",
    "ber_count",
    "effective_snr",
    "measure",
    "matched_filter",
    "pulse_shape",
    "resample",
    "rrc_taps",
    "dbm_to_watt",
    "signal_power",
    "watt_to_dbm",
]
