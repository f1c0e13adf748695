"""Receiver chain: DBP, matched filter, edge trimming and metrics."""

import logging
import math

import numpy as np

from ..channel.link import Transmission
from ..channel.ssfm import ideal_backpropagation
from ..core.models import Constellation, DbpConfig, LinkParams, Metrics, SimulationSettings
from ..signals.constellation import qam_constellation
from ..signals.metrics import measure
from ..signals.pulse import matched_filter
from ..signals.units import dbm_to_watt
from .engine import dbp_run, edge_symbols, trim_edges

logger = logging.getLogger(__name__)


def _to_symbols(samples, transmission: Transmission, sim: SimulationSettings) -> np.ndarray:
    """Matched filter and undo the launch scaling."""
    symbols = matched_filter(samples, sim.rolloff, sim.span_symbols)
    return symbols / math.sqrt(dbm_to_watt(transmission.launch_power_dbm))


def receive(
    transmission: Transmission,
    cfg: DbpConfig,
    sim: SimulationSettings,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Equalize a transmission with the TD-DBP datapath.

    Returns:
        (equalized symbols, transmitted symbols), both edge-trimmed
    """
    equalized = _to_symbols(dbp_run(transmission.received, cfg), transmission, sim)
    edge = edge_symbols(cfg, transmission.received.samples_per_symbol, sim.span_symbols)
    return trim_edges(equalized, edge), trim_edges(transmission.symbols, edge)


def receive_ideal(
    transmission: Transmission,
    link: LinkParams,
    sim: SimulationSettings,
) -> tuple[np.ndarray, np.ndarray]:
    """Equalize with frequency-domain backpropagation at the forward step resolution."""
    back = ideal_backpropagation(transmission.received, link, sim.forward_steps_per_span, sim.scheme)
    equalized = _to_symbols(back, transmission, sim)
    edge = sim.span_symbols // 2
    return trim_edges(equalized, edge), trim_edges(transmission.symbols, edge)


def evaluate(
    transmission: Transmission,
    cfg: DbpConfig,
    sim: SimulationSettings,
    constellation: Constellation | None = None,
) -> Metrics:
    """Effective SNR and BER of the TD-DBP output."""
    constellation = constellation or qam_constellation(sim.modulation_order)
    equalized, reference = receive(transmission, cfg, sim)
    metrics = measure(equalized, reference, constellation)
    logger.debug(
        f"TD-DBP at {transmission.launch_power_dbm:+.1f} dBm: "
        f"{metrics.effective_snr_db:.2f} dB, BER {metrics.ber:.3e}"
    )
    return metrics


def evaluate_ideal(
    transmission: Transmission,
    link: LinkParams,
    sim: SimulationSettings,
    constellation: Constellation | None = None,
) -> Metrics:
    """Effective SNR and BER of frequency-domain backpropagation."""
    constellation = constellation or qam_constellation(sim.modulation_order)
    equalized, reference = receive_ideal(transmission, link, sim)
    return measure(equalized, reference, constellation)
