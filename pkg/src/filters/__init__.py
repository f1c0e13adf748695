"""CD filter design - ideal response, LS-CO design and response inspection."""

from .design import (
    bank_step_sizes,
    cascade_ideal,
    cascade_response,
    default_passband_fraction,
    design_bank,
    freq_response,
    ideal_cd_response,
    inband_error,
    least_squares_design,
    lsco_design,
    required_taps,
)

__all__ = [
    "bank_step_sizes",
    "cascade_ideal",
    "cascade_response",
    "default_passband_fraction",
    "design_bank",
    "freq_response",
    "ideal_cd_response",
    "inband_error",
    "least_squares_design",
    "lsco_design",
    "required_taps",
]
