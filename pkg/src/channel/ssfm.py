"""Split-step Fourier solver for single-polarization fiber propagation.

Sign conventions (numpy FFT, omega = 2*pi*f):

* forward linear step:  X(w) * exp(-j beta2/2 delta w^2 - alpha/2 delta)
* forward Kerr step:    x * exp(+j gamma delta_eff |x|^2)

Backpropagation uses the inverse operators, so the DBP CD response is
exp(+j beta2/2 delta w^2) and its nonlinear step rotates by -j.
"""

import logging
import math

import numpy as np

from ..core.exceptions import AliasingError, ValidationError
from ..core.models import ComplexSignal, LinkParams, SsfmPlan
from ..core.types import SsfmScheme
from .noise import ase_noise_variance

logger = logging.getLogger(__name__)

# Band-edge energy above which a waveform is considered aliased
ALIASING_LIMIT = 1e-3
EDGE_BAND = 0.9     # |f| >= EDGE_BAND * fs/2 counts as band edge


def effective_step_length(delta: float, link: LinkParams) -> float:
    """Loss-weighted length (1 - exp(-alpha delta)) / alpha of one step."""
    if delta <= 0:
        raise ValidationError("delta", delta, "must be positive")
    alpha = link.alpha_per_m
    if alpha == 0.0:
        return float(delta)
    return float(-math.expm1(-alpha * delta) / alpha)


def angular_frequencies(num_samples: int, sample_rate: float) -> np.ndarray:
    """FFT-ordered angular frequency grid in rad/s."""
    return 2.0 * np.pi * np.fft.fftfreq(num_samples, d=1.0 / sample_rate)


def band_edge_fraction(samples: np.ndarray, edge_band: float = EDGE_BAND) -> float:
    """Share of spectral energy with |f| >= edge_band * Nyquist."""
    spectrum = np.abs(np.fft.fft(samples)) ** 2
    total = float(np.sum(spectrum))
    if total == 0.0:
        return 0.0
    normalized_freq = np.abs(np.fft.fftfreq(len(samples))) * 2.0
    return float(np.sum(spectrum[normalized_freq >= edge_band]) / total)


def make_plan(
    link: LinkParams,
    steps_per_span: int,
    scheme: SsfmScheme = SsfmScheme.SYMMETRIC,
) -> SsfmPlan:
    """Uniform step layout over one span."""
    if steps_per_span < 1:
        raise ValidationError("steps_per_span", steps_per_span, "must be at least 1")
    step = link.span_length_m / steps_per_span
    return SsfmPlan(steps_per_span=steps_per_span, step_sizes=(step,) * steps_per_span, scheme=scheme)


def _nonlinear_length(delta: float, alpha: float, scheme: SsfmScheme) -> float:
    """Length multiplying gamma |x|^2 where the Kerr step samples the power."""
    if alpha == 0.0:
        return delta
    l_eff = -math.expm1(-alpha * delta) / alpha
    if scheme is SsfmScheme.SYMMETRIC:
        # Power is sampled at the midpoint, after a half step of loss
        return l_eff * math.exp(alpha * delta / 2.0)
    return l_eff


class _StepOperators:
    """Cached per-step-size linear operators for one frequency grid."""

    def __init__(self, omega: np.ndarray, beta2: float, alpha: float, direction: int):
        self._omega_sq = omega**2
        self._beta2 = beta2
        self._alpha = alpha
        self._direction = direction
        self._cache: dict[float, np.ndarray] = {}

    def linear(self, length: float) -> np.ndarray:
        if length not in self._cache:
            exponent = -1j * self._beta2 / 2.0 * self._omega_sq * length - self._alpha / 2.0 * length
            self._cache[length] = np.exp(self._direction * exponent)
        return self._cache[length]


def _check_plan(link: LinkParams, plan: SsfmPlan) -> None:
    if not math.isclose(plan.span_length_m, link.span_length_m, rel_tol=1e-9):
        raise ValidationError(
            "plan.step_sizes",
            plan.span_length_m,
            f"must sum to span_length_m={link.span_length_m}",
        )


def ssfm_forward(
    signal: ComplexSignal,
    link: LinkParams,
    plan: SsfmPlan,
    seed: int,
) -> ComplexSignal:
    """
    Propagate a field (in sqrt(W)) over all spans of the link.

    Each span runs ``plan`` step by step, then an ideal amplifier restores
    the span loss and, if enabled, adds circular Gaussian ASE noise over the
    simulation band. Noise streams are spawned per span from ``seed``.

    Raises:
        AliasingError: if the input has significant energy at the band edge
        ValidationError: if the plan does not cover one span
    """
    _check_plan(link, plan)
    edge = band_edge_fraction(signal.samples)
    if edge > ALIASING_LIMIT:
        raise AliasingError(edge, ALIASING_LIMIT)

    alpha = link.alpha_per_m
    omega = angular_frequencies(len(signal), signal.sample_rate)
    ops = _StepOperators(omega, link.beta2, alpha, direction=1)
    amplitude_gain = math.exp(alpha * link.span_length_m / 2.0)
    noise_std = math.sqrt(ase_noise_variance(link, signal.sample_rate) / 2.0)
    span_rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(link.num_spans)]

    logger.debug(
        f"SSFM: {link.num_spans} spans x {plan.steps_per_span} steps ({plan.scheme.value}), "
        f"{len(signal)} samples"
    )

    x = np.array(signal.samples, dtype=np.complex128)
    for span in range(link.num_spans):
        for delta in plan.step_sizes:
            phase_length = link.gamma * _nonlinear_length(delta, alpha, plan.scheme)
            if plan.scheme is SsfmScheme.SYMMETRIC:
                x = np.fft.ifft(np.fft.fft(x) * ops.linear(delta / 2.0))
                x = x * np.exp(1j * phase_length * np.abs(x) ** 2)
                x = np.fft.ifft(np.fft.fft(x) * ops.linear(delta / 2.0))
            else:
                x = x * np.exp(1j * phase_length * np.abs(x) ** 2)
                x = np.fft.ifft(np.fft.fft(x) * ops.linear(delta))

        x = x * amplitude_gain
        if link.noise_enabled and noise_std > 0.0:
            rng = span_rngs[span]
            x = x + noise_std * (rng.standard_normal(len(x)) + 1j * rng.standard_normal(len(x)))

    return signal.with_samples(x)


def ideal_backpropagation(
    signal: ComplexSignal,
    link: LinkParams,
    steps_per_span: int,
    scheme: SsfmScheme = SsfmScheme.SYMMETRIC,
) -> ComplexSignal:
    """
    Frequency-domain DBP: the exact inverse of the noiseless forward model.

    With ``link.gamma == 0`` this is ideal CD compensation.
    """
    plan = make_plan(link, steps_per_span, scheme)
    alpha = link.alpha_per_m
    omega = angular_frequencies(len(signal), signal.sample_rate)
    ops = _StepOperators(omega, link.beta2, alpha, direction=-1)
    amplitude_gain = math.exp(alpha * link.span_length_m / 2.0)

    x = np.array(signal.samples, dtype=np.complex128)
    for _ in range(link.num_spans):
        x = x / amplitude_gain
        for delta in reversed(plan.step_sizes):
            phase_length = link.gamma * _nonlinear_length(delta, alpha, scheme)
            if scheme is SsfmScheme.SYMMETRIC:
                x = np.fft.ifft(np.fft.fft(x) * ops.linear(delta / 2.0))
                x = x * np.exp(-1j * phase_length * np.abs(x) ** 2)
                x = np.fft.ifft(np.fft.fft(x) * ops.linear(delta / 2.0))
            else:
                x = np.fft.ifft(np.fft.fft(x) * ops.linear(delta))
                x = x * np.exp(-1j * phase_length * np.abs(x) ** 2)

    return signal.with_samples(x)
