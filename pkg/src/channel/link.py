"""End-to-end transmitter and channel: symbols in, received field out."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..core.models import ComplexSignal, Constellation, LinkParams, SimulationSettings
from ..signals.constellation import generate_symbols, qam_constellation
from ..signals.pulse import pulse_shape, resample
from ..signals.units import dbm_to_watt
from .ssfm import make_plan, ssfm_forward

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Transmission:
    """Transmitted symbols and the field seen by the receiver."""

    symbols: np.ndarray
    received: ComplexSignal     # DBP rate, sqrt(W)
    launch_power_dbm: float


def launch(signal: ComplexSignal, launch_power_dbm: float) -> ComplexSignal:
    """Scale a unit-power waveform to the launch power (samples in sqrt(W))."""
    return signal.with_samples(signal.samples * math.sqrt(dbm_to_watt(launch_power_dbm)))


def split_seed(seed: int, parts: int) -> list[int]:
    """Independent integer seeds derived from one seed."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(parts)]


def transmit(
    link: LinkParams,
    sim: SimulationSettings,
    num_symbols: int,
    seed: int,
    constellation: Constellation | None = None,
) -> Transmission:
    """
    Generate symbols, shape them, propagate over the link and resample to
    the DBP rate. Deterministic given ``seed``.
    """
    constellation = constellation or qam_constellation(sim.modulation_order)
    symbol_seed, channel_seed = split_seed(seed, 2)

    symbols = generate_symbols(num_symbols, constellation, symbol_seed)
    waveform = pulse_shape(
        symbols, sim.sim_samples_per_symbol, sim.rolloff, sim.span_symbols, sim.symbol_rate
    )
    field = launch(waveform, link.launch_power_dbm)
    plan = make_plan(link, sim.forward_steps_per_span, sim.scheme)
    received = ssfm_forward(field, link, plan, channel_seed)

    logger.debug(
        f"Transmitted {num_symbols} symbols at {link.launch_power_dbm:+.1f} dBm over "
        f"{link.num_spans} spans (seed {seed})"
    )
    return Transmission(
        symbols=symbols,
        received=resample(received, sim.dbp_samples_per_symbol),
        launch_power_dbm=link.launch_power_dbm,
    )
