"""Power unit helpers."""

import numpy as np


def dbm_to_watt(power_dbm: float) -> float:
    return 1e-3 * 10.0 ** (power_dbm / 10.0)


def watt_to_dbm(power_w: float) -> float:
    return 10.0 * np.log10(power_w / 1e-3)


def signal_power(samples: np.ndarray) -> float:
    """Mean |x|^2."""
    samples = np.asarray(samples)
    return float(np.mean(np.abs(samples) ** 2)) if samples.size else 0.0
