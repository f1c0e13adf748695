"""Quality metrics: effective SNR and bit error ratio."""

import logging

import numpy as np

from ..core.exceptions import MetricError, ValidationError
from ..core.models import Constellation, Metrics
from ..core.types import SNR_CAP_DB
from .constellation import symbols_to_bits

logger = logging.getLogger(__name__)


def _check_pair(equalized: np.ndarray, reference: np.ndarray) -> None:
    if equalized.shape != reference.shape or equalized.ndim != 1:
        raise ValidationError(
            "equalized_symbols", equalized.shape, f"must match reference shape {reference.shape}"
        )
    if len(reference) == 0:
        raise ValidationError("reference_symbols", 0, "need at least one symbol")


def scale_fit(equalized: np.ndarray, reference: np.ndarray) -> complex:
    """Least-squares complex scale c minimizing sum |c * equalized - reference|^2."""
    denominator = float(np.sum(np.abs(equalized) ** 2))
    if denominator == 0.0:
        return 0j
    return complex(np.sum(np.conj(equalized) * reference) / denominator)


def effective_snr(
    equalized_symbols: np.ndarray,
    reference_symbols: np.ndarray,
    cap_db: float = SNR_CAP_DB,
    unbiased: bool = False,
) -> float:
    """
    Effective SNR in dB after one global complex scale fit.

    Args:
        equalized_symbols: Receiver output at one sample per symbol
        reference_symbols: Transmitted symbols
        cap_db: Reported in place of an infinite SNR
        unbiased: Subtract the 1 that the least-squares fit adds in linear
                  scale (Gaussian-noise model)

    Returns:
        SNR in dB, at most ``cap_db``

    Raises:
        MetricError: if the reference carries no power
    """
    a_hat = np.asarray(equalized_symbols, dtype=np.complex128)
    a = np.asarray(reference_symbols, dtype=np.complex128)
    _check_pair(a_hat, a)

    reference_power = float(np.mean(np.abs(a) ** 2))
    if reference_power == 0.0:
        raise MetricError("reference symbols carry no power")

    c = scale_fit(a_hat, a)
    error_power = float(np.mean(np.abs(c * a_hat - a) ** 2))
    snr = reference_power / error_power if error_power > 0.0 else np.inf
    if unbiased:
        snr -= 1.0
    if not snr > 0.0:
        return -cap_db
    return float(min(10.0 * np.log10(snr), cap_db))


def ber_count(decided_bits: np.ndarray, reference_bits: np.ndarray) -> Metrics:
    """Fraction of differing bits."""
    decided = np.asarray(decided_bits)
    reference = np.asarray(reference_bits)
    if decided.shape != reference.shape:
        raise ValidationError("decided_bits", decided.shape, f"must match {reference.shape}")
    if decided.size == 0:
        raise MetricError("cannot count errors in an empty bit stream")
    errors = int(np.count_nonzero(decided != reference))
    return Metrics(ber=errors / decided.size, num_bits=int(decided.size))


def measure(
    equalized_symbols: np.ndarray,
    reference_symbols: np.ndarray,
    constellation: Constellation,
) -> Metrics:
    """Effective SNR plus BER of the scale-corrected decisions."""
    a_hat = np.asarray(equalized_symbols, dtype=np.complex128)
    a = np.asarray(reference_symbols, dtype=np.complex128)
    snr_db = effective_snr(a_hat, a)
    corrected = scale_fit(a_hat, a) * a_hat
    bits = ber_count(symbols_to_bits(corrected, constellation), symbols_to_bits(a, constellation))
    return Metrics(
        effective_snr_db=snr_db,
        ber=bits.ber,
        num_symbols=len(a),
        num_bits=bits.num_bits,
    )
