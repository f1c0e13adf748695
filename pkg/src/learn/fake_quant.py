"""Straight-through fake quantization of filter taps."""

import torch

from ..core.models import FixedFormat


class FakeQuantize(torch.autograd.Function):
    """
    Forward: half-up rounding onto the grid of ``ulp``, saturated to
    [lo, hi] codes. Backward: identity inside the representable range,
    zero for saturated values.
    """

    @staticmethod
    def forward(ctx, x: torch.Tensor, ulp: torch.Tensor, lo: int, hi: int) -> torch.Tensor:
        inside = (x >= lo * ulp) & (x <= hi * ulp)
        ctx.save_for_backward(inside)
        return torch.clamp(torch.floor(x / ulp + 0.5), lo, hi) * ulp

    @staticmethod
    def backward(ctx, grad_output: torch.Tensor) -> tuple[torch.Tensor, None, None, None]:
        (inside,) = ctx.saved_tensors
        return grad_output * inside.to(grad_output.dtype), None, None, None


def fake_quantize_real(x: torch.Tensor, ulp: torch.Tensor | float, word_bits: int) -> torch.Tensor:
    """Fake-quantize a real tensor; ``ulp`` broadcasts against ``x``."""
    ulp = torch.as_tensor(ulp, dtype=x.dtype, device=x.device)
    return FakeQuantize.apply(x, ulp, -(1 << (word_bits - 1)), (1 << (word_bits - 1)) - 1)


def fake_quantize(taps: torch.Tensor, coeff_format: FixedFormat) -> torch.Tensor:
    """Real and imaginary parts quantized independently with ``coeff_format``."""
    if taps.is_complex():
        return torch.complex(
            fake_quantize_real(taps.real, coeff_format.ulp, coeff_format.word_bits),
            fake_quantize_real(taps.imag, coeff_format.ulp, coeff_format.word_bits),
        )
    return fake_quantize_real(taps, coeff_format.ulp, coeff_format.word_bits)
