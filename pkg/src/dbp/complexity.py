"""Direct-form vs overlap-save FFT filtering cost, per output sample."""

import logging
import math
from typing import Iterable

from ..core.exceptions import ValidationError
from ..core.models import CostModel, CrossoverReport, CrossoverRow
from ..core.types import FftCostModel

logger = logging.getLogger(__name__)

DEFAULT_TAPS = tuple(range(1, 62, 2))
DEFAULT_FFT_SIZES = tuple(2**p for p in range(3, 13))


def fft_real_mults(size: int, model: FftCostModel) -> float:
    """Real multiplications of one complex FFT of power-of-two ``size``."""
    stages = math.log2(size)
    if model is FftCostModel.SPLIT_RADIX:
        return max(size * stages - 3 * size + 4, 0.0)
    # (N/2) log2 N butterflies, 4 real multiplies each
    return 2.0 * size * stages


def overlap_save_cost(num_taps: int, size: int, cost_model: CostModel) -> float | None:
    """
    Real multiplies per output of overlap-save with FFT size ``size``.

    Forward FFT, pointwise product with the stored filter spectrum and
    inverse FFT per block. None if the block cannot hold the filter.
    """
    if cost_model.overlap_fraction is None:
        outputs = size - (num_taps - 1)
    else:
        outputs = int(size * (1.0 - cost_model.overlap_fraction))
        if size - outputs < num_taps - 1:
            return None
    if outputs < 1:
        return None
    pointwise = size * cost_model.multiplier.real_multiplies
    return (2.0 * fft_real_mults(size, cost_model.fft) + pointwise) / outputs


def estimate_crossover(
    tap_range: Iterable[int] = DEFAULT_TAPS,
    fft_sizes: Iterable[int] = DEFAULT_FFT_SIZES,
    cost_model: CostModel | None = None,
) -> CrossoverReport:
    """
    Per-tap cost of symmetric direct convolution against the best FFT size.

    The crossover is the smallest tap count whose direct cost exceeds the
    cheapest overlap-save configuration.
    """
    cost_model = cost_model or CostModel()
    taps = sorted(set(tap_range))
    sizes = sorted(set(fft_sizes))
    if not taps or not sizes:
        raise ValidationError("ranges", (len(taps), len(sizes)), "must be nonempty")
    if any(size < 2 or size & (size - 1) for size in sizes):
        raise ValidationError("fft_sizes", sizes, "must be powers of two")

    rows = []
    crossover = None
    for num_taps in taps:
        complex_mults = num_taps // 2 + 1
        direct = float(complex_mults * cost_model.multiplier.real_multiplies)
        candidates = [
            (cost, size)
            for size in sizes
            if (cost := overlap_save_cost(num_taps, size, cost_model)) is not None
        ]
        best_cost, best_size = min(candidates) if candidates else (None, None)
        rows.append(
            CrossoverRow(
                num_taps=num_taps,
                direct_complex_mults=complex_mults,
                direct_real_mults=direct,
                fft_real_mults=best_cost,
                best_fft_size=best_size,
            )
        )
        if crossover is None and best_cost is not None and direct > best_cost:
            crossover = num_taps

    logger.info(f"Direct/FFT crossover ({cost_model.fft.value}): {crossover} taps")
    return CrossoverReport(rows=tuple(rows), crossover_taps=crossover, cost_model=cost_model)
