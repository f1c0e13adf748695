"""Summary tables across sweep results: peak SNR, optimal power and cost proxies."""

import logging
import math
from typing import Sequence

import pandas as pd

from ..core.exceptions import CompareError, ValidationError
from ..core.models import QuantConfig
from ..core.types import ComplexMultiplier
from ..fixedpoint.cost import cost_report
from .runner import ResultSet

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = [
    "set",
    "variant",
    "taps",
    "signal_bits",
    "coeff_bits",
    "peak_eff_snr_db",
    "opt_power_dbm",
    "ber_at_peak",
    "delta_peak_db",
    "real_multipliers",
    "proxy",
    "proxy_reduction",
]


def _grid(rows: pd.DataFrame, variant: str) -> set[tuple[float, int]]:
    subset = rows[rows["variant"] == variant]
    return {(float(p), int(s)) for p, s in zip(subset["power_dbm"], subset["seed"])}


def _check_sets(result_sets: Sequence[ResultSet], baseline: str | None) -> list[str]:
    if len(result_sets) < 2:
        raise ValidationError("result_sets", len(result_sets), "need at least two result sets to compare")
    reference = result_sets[0]
    variants = list(dict.fromkeys(reference.rows["variant"]))
    if baseline is not None and baseline not in variants:
        raise CompareError(f"baseline variant {baseline!r} not in results", {"variants": variants})
    for result in result_sets[1:]:
        present = set(result.rows["variant"])
        missing = [v for v in variants if v not in present]
        if missing:
            raise CompareError(f"result set {result.label!r} lacks variants {missing}")
    for result in result_sets:
        for variant in variants:
            if _grid(result.rows, variant) != _grid(reference.rows, variant):
                raise CompareError(
                    f"sweep grid of {variant!r} in {result.label!r} differs from {reference.label!r}"
                )
    return variants


def _peak(rows: pd.DataFrame, variant: str) -> tuple[float, float, float]:
    """Seed-averaged curve of one variant -> (peak SNR, power at peak, BER there)."""
    ok = rows[(rows["variant"] == variant) & (rows["status"] == "ok")]
    if ok.empty:
        return math.nan, math.nan, math.nan
    curve = ok.groupby("power_dbm", sort=True)[["eff_snr_db", "ber"]].mean()
    best = curve["eff_snr_db"].idxmax()
    return float(curve.loc[best, "eff_snr_db"]), float(best), float(curve.loc[best, "ber"])


def _proxy(info: dict, parallelism: int, multiplier: ComplexMultiplier) -> tuple[float, float]:
    taps, signal_bits, coeff_bits = info.get("taps"), info.get("signal_bits"), info.get("coeff_bits")
    if taps is None or signal_bits is None or coeff_bits is None:
        return math.nan, math.nan
    report = cost_report(
        taps,
        QuantConfig.from_bits(signal_bits, coeff_bits),
        parallelism=parallelism,
        multiplier=multiplier,
    )
    return float(report.real_multipliers), report.area_power_proxy


def compare_report(
    result_sets: Sequence[ResultSet],
    baseline: str | None = None,
    parallelism: int = 96,
    multiplier: ComplexMultiplier = ComplexMultiplier.MULT4,
) -> pd.DataFrame:
    """
    One row per (result set, variant).

    ``delta_peak_db`` is relative to the same variant in the first set;
    ``proxy_reduction`` is relative to ``baseline`` within the same set.

    Raises:
        ValidationError: for fewer than two result sets
        CompareError: for mismatched grids, a missing variant or an unknown baseline
    """
    variants = _check_sets(result_sets, baseline)
    reference_peaks = {v: _peak(result_sets[0].rows, v)[0] for v in variants}

    records = []
    for result in result_sets:
        proxies = {v: _proxy(result.variants.get(v, {}), parallelism, multiplier) for v in variants}
        for variant in variants:
            info = result.variants.get(variant, {})
            peak, power, ber = _peak(result.rows, variant)
            multipliers, proxy = proxies[variant]
            reduction = math.nan
            if baseline is not None:
                base_proxy = proxies[baseline][1]
                if base_proxy and not math.isnan(base_proxy) and not math.isnan(proxy):
                    reduction = 1.0 - proxy / base_proxy
            records.append(
                {
                    "set": result.label,
                    "variant": variant,
                    "taps": info.get("taps"),
                    "signal_bits": info.get("signal_bits"),
                    "coeff_bits": info.get("coeff_bits"),
                    "peak_eff_snr_db": peak,
                    "opt_power_dbm": power,
                    "ber_at_peak": ber,
                    "delta_peak_db": peak - reference_peaks[variant],
                    "real_multipliers": multipliers,
                    "proxy": proxy,
                    "proxy_reduction": reduction,
                }
            )

    logger.info(f"Compared {len(result_sets)} result set(s), {len(variants)} variants")
    return pd.DataFrame(records, columns=SUMMARY_COLUMNS)
