"""
Differentiable TD-DBP receiver in torch (float64).

The forward pass mirrors the numpy float datapath term for term: same
symmetric-FIR summation order, same nonlinear steps, followed by the
circular matched filter, edge trimming and the effective-SNR metric.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from ..channel.link import Transmission
from ..core.exceptions import DegenerateBatchError, GradientError
from ..core.models import FilterBank, FirFilter, FixedFormat, SimulationSettings
from ..core.types import SNR_CAP_DB, Nonlinearity, RadPerWatt, TaylorSign
from ..fixedpoint.coefficients import filter_exponent
from ..signals.pulse import circular_kernel, rrc_taps
from .fake_quant import fake_quantize_real

logger = logging.getLogger(__name__)

_MIN_ERROR_POWER = 1e-300


@dataclass(frozen=True)
class Batch:
    """One training batch: received DBP-rate field and the transmitted symbols."""

    received: torch.Tensor      # complex128, sqrt(W)
    symbols: torch.Tensor       # complex128, untrimmed

    @classmethod
    def from_transmission(cls, transmission: Transmission) -> "Batch":
        return cls(
            received=torch.from_numpy(np.array(transmission.received.samples)),
            symbols=torch.from_numpy(np.array(transmission.symbols, dtype=np.complex128)),
        )


def symmetric_fir(x: torch.Tensor, unique_taps: torch.Tensor) -> torch.Tensor:
    """Zero-padded symmetric FIR, accumulated in increasing k."""
    half_length = unique_taps.shape[0] - 1
    n = x.shape[0]
    zeros = torch.zeros(half_length, dtype=x.dtype)
    padded = torch.cat([zeros, x, zeros])
    y = unique_taps[0] * x
    for k in range(1, half_length + 1):
        y = y + unique_taps[k] * (
            padded[half_length - k : half_length - k + n] + padded[half_length + k : half_length + k + n]
        )
    return y


def nonlinear_step(
    x: torch.Tensor,
    gain: torch.Tensor,
    nonlinearity: Nonlinearity,
    sign: TaylorSign,
) -> torch.Tensor:
    if nonlinearity is Nonlinearity.OFF:
        return x
    power = x.real**2 + x.imag**2
    if nonlinearity is Nonlinearity.EXACT:
        phase = -gain * power
        return x * torch.complex(torch.cos(phase), torch.sin(phase))
    return x * torch.complex(torch.ones_like(power), sign.factor * gain * power)


def effective_snr_linear(equalized: torch.Tensor, reference: torch.Tensor, cap_db: float = SNR_CAP_DB) -> torch.Tensor:
    """
    Effective SNR (linear) after a least-squares complex scale fit.

    Raises:
        DegenerateBatchError: if the equalized block or the reference has no power
    """
    eq_power = torch.sum(equalized.real**2 + equalized.imag**2)
    ref_power = torch.mean(reference.real**2 + reference.imag**2)
    if eq_power.item() == 0.0 or ref_power.item() == 0.0:
        raise DegenerateBatchError("batch carries no power after equalization")
    scale = torch.sum(torch.conj(equalized) * reference) / eq_power
    error = scale * equalized - reference
    error_power = torch.mean(error.real**2 + error.imag**2)
    snr = ref_power / torch.clamp(error_power, min=_MIN_ERROR_POWER)
    return torch.clamp(snr, max=10.0 ** (cap_db / 10.0))


class DbpNetwork(nn.Module):
    """
    TD-DBP with trainable unique taps and per-step nonlinear scales.

    Taps are stored as real (M, K+1, 2) pairs. A fixed mask buffer zeroes
    pruned positions; fake quantization, once enabled, uses a per-filter
    exponent frozen at activation.
    """

    def __init__(
        self,
        bank: FilterBank,
        gamma_steps: tuple[RadPerWatt, ...],
        sim: SimulationSettings,
        nonlinearity: Nonlinearity = Nonlinearity.TAYLOR1,
        taylor_sign: TaylorSign = TaylorSign.COMPENSATING,
        train_nonlinear_scales: bool = True,
    ):
        super().__init__()
        taps = np.stack([f.unique_taps for f in bank.filters])
        self.taps = nn.Parameter(torch.from_numpy(np.stack([taps.real, taps.imag], axis=-1).copy()))
        self.nl_scales = nn.Parameter(
            torch.tensor(bank.nonlinear_scales, dtype=torch.float64),
            requires_grad=train_nonlinear_scales,
        )
        self.register_buffer("mask", torch.ones_like(self.taps.detach()))
        self.register_buffer("gamma", torch.tensor(gamma_steps, dtype=torch.float64))
        self.register_buffer("ulp", torch.zeros(0, dtype=torch.float64))

        self.beta2 = bank.beta2
        self.sample_rate = bank.sample_rate
        self.step_sizes = bank.step_sizes
        self.nonlinearity = Nonlinearity(nonlinearity)
        self.taylor_sign = TaylorSign(taylor_sign)
        self.sim = sim
        self.active_half = bank.half_length
        self.coeff_bits: int | None = None
        self.scale_exps: list[int] | None = None
        # Edge fixed by the initial length so every iteration scores the same symbols
        self.edge = (
            math.ceil(bank.num_filters * bank.half_length / sim.dbp_samples_per_symbol)
            + sim.span_symbols // 2
        )
        self._kernels: dict[int, torch.Tensor] = {}
        self._watch_stages = False
        self._bad_stages: list[str] = []

    @property
    def num_filters(self) -> int:
        return self.taps.shape[0]

    @property
    def fake_quant_enabled(self) -> bool:
        return self.coeff_bits is not None

    # -- coefficients -------------------------------------------------------

    def complex_taps(self) -> torch.Tensor:
        """(M, K+1) complex taps as used in the forward pass."""
        taps = self.taps * self.mask
        if self.fake_quant_enabled:
            taps = fake_quantize_real(taps, self.ulp, self.coeff_bits)
        return torch.view_as_complex(taps.contiguous())

    @torch.no_grad()
    def apply_mask(self) -> None:
        self.taps.mul_(self.mask)

    @torch.no_grad()
    def prune(self, pairs: int = 1) -> None:
        """Zero and permanently mask the outermost active tap pair of every filter."""
        for _ in range(pairs):
            if self.active_half == 0:
                raise ValueError("no tap pair left to prune")
            self.mask[:, self.active_half, :] = 0.0
            self.active_half -= 1
        self.apply_mask()
        logger.debug(f"Pruned to {2 * self.active_half + 1} taps")

    @torch.no_grad()
    def enable_fake_quant(self, coeff_bits: int) -> list[int]:
        """Freeze one exponent per filter from the current taps and start fake quantization."""
        bank = self.float_bank()
        self.scale_exps = [filter_exponent(fir, coeff_bits) for fir in bank.filters]
        self.ulp = torch.tensor([2.0**e for e in self.scale_exps], dtype=torch.float64).view(-1, 1, 1)
        self.coeff_bits = coeff_bits
        logger.info(f"Fake quantization at {coeff_bits} bits, exponents {self.scale_exps}")
        return self.scale_exps

    @torch.no_grad()
    def float_bank(self) -> FilterBank:
        """Current latent taps, trimmed to the active length."""
        taps = torch.view_as_complex((self.taps * self.mask).contiguous()).numpy()
        filters = tuple(FirFilter(unique_taps=row[: self.active_half + 1]) for row in taps)
        return FilterBank(
            filters=filters,
            step_sizes=self.step_sizes,
            beta2=self.beta2,
            sample_rate=self.sample_rate,
            nonlinear_scales=tuple(float(s) for s in self.nl_scales),
        )

    def coeff_format(self, index: int) -> FixedFormat:
        return FixedFormat(word_bits=self.coeff_bits, scale_exp=self.scale_exps[index])

    # -- forward ------------------------------------------------------------

    def _watch(self, tensor: torch.Tensor, stage: str) -> None:
        if not (self._watch_stages and tensor.requires_grad):
            return

        def check(grad: torch.Tensor) -> None:
            if not bool(torch.isfinite(torch.view_as_real(grad) if grad.is_complex() else grad).all()):
                self._bad_stages.append(stage)

        tensor.register_hook(check)

    def propagate(self, x: torch.Tensor) -> torch.Tensor:
        """DBP cascade on the received field (no matched filter)."""
        taps = self.complex_taps()
        gains = self.gamma * self.nl_scales
        for index in range(self.num_filters):
            h = taps[index]
            self._watch(h, f"fir[{index}]")
            x = symmetric_fir(x, h)
            if index < self.num_filters - 1:
                self._watch(x, f"nonlinear[{index}]")
                gain = gains[index]
                self._watch(gain, f"nonlinear[{index}]")
                x = nonlinear_step(x, gain, self.nonlinearity, self.taylor_sign)
        return x

    def _kernel(self, length: int) -> torch.Tensor:
        if length not in self._kernels:
            taps = rrc_taps(self.sim.dbp_samples_per_symbol, self.sim.rolloff, self.sim.span_symbols)
            self._kernels[length] = torch.from_numpy(circular_kernel(taps, length).astype(np.complex128))
        return self._kernels[length]

    def equalize(self, received: torch.Tensor) -> torch.Tensor:
        """Trimmed symbol-rate output of DBP plus matched filter."""
        sps = self.sim.dbp_samples_per_symbol
        y = self.propagate(received)
        self._watch(y, "matched_filter")
        y = torch.fft.ifft(torch.fft.fft(y) * self._kernel(y.shape[0]))[::sps] / math.sqrt(sps)
        return y[self.edge : y.shape[0] - self.edge]

    def forward(self, batch: Batch) -> torch.Tensor:
        """Loss: minus the linear effective SNR of the batch."""
        reference = batch.symbols[self.edge : batch.symbols.shape[0] - self.edge]
        return -effective_snr_linear(self.equalize(batch.received), reference)

    def trainable_parameters(self) -> list[nn.Parameter]:
        return [p for p in (self.taps, self.nl_scales) if p.requires_grad]

    def backward_checked(self, batch: Batch, iteration: int | None = None) -> torch.Tensor:
        """
        Loss plus gradients, with stage-level diagnosis of non-finite gradients.

        Raises:
            GradientError: naming the most downstream stage whose gradient broke
        """
        self._watch_stages = True
        self._bad_stages = []
        try:
            value = self(batch)
            if not bool(torch.isfinite(value)):
                raise GradientError("metric", iteration)
            value.backward()
        finally:
            self._watch_stages = False
        grads = [p.grad for p in self.trainable_parameters() if p.grad is not None]
        if self._bad_stages or not all(bool(torch.isfinite(g).all()) for g in grads):
            raise GradientError(self._bad_stages[0] if self._bad_stages else "parameters", iteration)
        return value.detach()


def loss(network: DbpNetwork, batch: Batch) -> float:
    """Minus the linear effective SNR of the network on ``batch``."""
    with torch.no_grad():
        return float(network(batch))


def gradient(network: DbpNetwork, batch: Batch) -> tuple[np.ndarray, np.ndarray]:
    """
    Analytic gradient of the loss.

    Returns:
        (M, K+1) complex tap gradients (d/d re + j d/d im; zero at pruned
        positions) and the nonlinear-scale gradients
    """
    network.zero_grad(set_to_none=True)
    network.backward_checked(batch)
    tap_grad = network.taps.grad.detach().numpy()
    scale_grad = (
        network.nl_scales.grad.detach().numpy().copy()
        if network.nl_scales.grad is not None
        else np.zeros(network.num_filters - 1)
    )
    return tap_grad[..., 0] + 1j * tap_grad[..., 1], scale_grad
