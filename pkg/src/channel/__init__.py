"""Channel simulation - split-step fiber propagation with lumped amplification."""

from .link import Transmission, launch, split_seed, transmit
from .noise import ase_limited_snr_db, ase_noise_variance, ase_psd
from .ssfm import (
    effective_step_length,
    ideal_backpropagation,
    make_plan,
    ssfm_forward,
)

__all__ = [
    "Transmission",
    "launch",
    "split_seed",
    "transmit",
    "ase_limited_snr_db",
    "ase_noise_variance",
    "ase_psd",
    "effective_step_length",
    "ideal_backpropagation",
    "make_plan",
    "ssfm_forward",
]
