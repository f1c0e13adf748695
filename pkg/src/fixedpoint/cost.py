"""Arithmetic-cost proxy of the parallel direct-form DBP step.

Counts are per DBP step for ``parallelism`` outputs per clock. The proxy
(real multipliers x signal bits x coefficient bits) ranks designs; it is not
a power or area estimate.
"""

import logging

from ..core.exceptions import ValidationError
from ..core.models import CostReport, QuantConfig
from ..core.types import ComplexMultiplier

logger = logging.getLogger(__name__)


def cost_report(
    num_taps: int,
    quant: QuantConfig,
    parallelism: int = 96,
    multiplier: ComplexMultiplier = ComplexMultiplier.MULT4,
    clock_hz: float = 416.7e6,
    bits_per_sample: float = 2.0,
) -> CostReport:
    """
    Multiplier and adder counts of one symmetric FIR step.

    Per output: K pre-adds x[n-k] + x[n+k], K+1 complex coefficient
    products, K complex accumulations.
    """
    if parallelism < 1:
        raise ValidationError("parallelism", parallelism, "must be at least 1")
    if num_taps < 1 or num_taps % 2 == 0:
        raise ValidationError("num_taps", num_taps, "must be odd and positive")
    multiplier = ComplexMultiplier(multiplier)

    half_length = num_taps // 2
    complex_mults = (half_length + 1) * parallelism
    real_mults = complex_mults * multiplier.real_multiplies
    # Coefficient-side Karatsuba sums are precomputed constants
    adds_per_product = 2 if multiplier is ComplexMultiplier.MULT4 else 3
    real_adds = (2 * half_length + (half_length + 1) * adds_per_product + 2 * half_length) * parallelism

    return CostReport(
        num_taps=num_taps,
        parallelism=parallelism,
        signal_bits=quant.signal_bits,
        coeff_bits=quant.coeff_bits,
        multiplier=multiplier,
        complex_multipliers=complex_mults,
        real_multipliers=real_mults,
        adders=real_adds,
        area_power_proxy=float(real_mults * quant.signal_bits * quant.coeff_bits),
        clock_hz=clock_hz,
        bits_per_sample=bits_per_sample,
    )


def proxy_reduction(reference: CostReport, candidate: CostReport) -> float:
    """Fractional proxy saving of ``candidate`` relative to ``reference``."""
    return 1.0 - candidate.area_power_proxy / reference.area_power_proxy
