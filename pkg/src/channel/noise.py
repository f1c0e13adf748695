"""Lumped EDFA noise model."""

import math

from ..core.models import LinkParams
from ..signals.units import dbm_to_watt

PLANCK = 6.62607015e-34     # J s
CARRIER_HZ = 193.41e12      # 1550 nm


def ase_psd(link: LinkParams) -> float:
    """
    Single-polarization ASE power spectral density of one amplifier, W/Hz.

    N_ase = n_sp h nu (G - 1) with n_sp = NF / 2 and G the span loss.
    """
    noise_figure = 10.0 ** (link.ase_noise_figure_db / 10.0)
    return noise_figure / 2.0 * PLANCK * CARRIER_HZ * (link.span_gain - 1.0)


def ase_noise_variance(link: LinkParams, sample_rate: float) -> float:
    """Per-sample complex noise variance added by one amplifier."""
    if not link.noise_enabled:
        return 0.0
    return ase_psd(link) * sample_rate


def ase_limited_snr_db(link: LinkParams, launch_power_dbm: float, symbol_rate: float) -> float:
    """Matched-filter SNR after all spans when ASE is the only impairment."""
    noise = link.num_spans * ase_psd(link) * symbol_rate
    if noise == 0.0:
        return math.inf
    return 10.0 * math.log10(dbm_to_watt(launch_power_dbm) / noise)
