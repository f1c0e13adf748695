"""Fixed-point model - formats, rounding, scaling, coefficient quantization and cost."""

from .arithmetic import (
    FixedArray,
    clip,
    dequantize,
    quantize_value,
    requantize_code,
    requantize_product,
)
from .coefficients import quantize_bank, quantize_filter, quantize_gain
from .cost import cost_report, proxy_reduction
from .scaling import clip_rate, containing_exponent, propagate_scaling

__all__ = [
    "FixedArray",
    "clip",
    "dequantize",
    "quantize_value",
    "requantize_code",
    "requantize_product",
    "quantize_bank",
    "quantize_filter",
    "quantize_gain",
    "cost_report",
    "proxy_reduction",
    "clip_rate",
    "containing_exponent",
    "propagate_scaling",
]
