"""
Time-domain DBP datapath.

The cascade is filter 0, then for every step l: nonlinear step l and filter
l + 1. The float and the bit-exact fixed datapath implement the same four
hooks (ingest, fir, nonlinear, emit) and share one control-flow function, so
the two modes cannot drift apart structurally.

Fixed mode quantizes at four kinds of points: the DBP input, every FIR
output, |x|^2 inside each nonlinear step (optional) and each nonlinear-step
output. Their formats are listed in stage order (see ``stage_names``).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from ..channel.ssfm import effective_step_length
from ..core.exceptions import DbpError, ValidationError
from ..core.models import (
    ComplexSignal,
    DbpConfig,
    FilterBank,
    FirFilter,
    FixedFormat,
    LinkParams,
    QuantConfig,
    QuantizedFilterBank,
)
from ..core.types import Arithmetic, Nonlinearity, RadPerWatt, TaylorSign
from ..fixedpoint.arithmetic import (
    as_codes,
    dequantize_complex,
    needs_wide,
    quantize_complex,
    quantize_value,
    requantize_code,
)
from ..fixedpoint.coefficients import quantize_bank, quantize_gain
from ..fixedpoint.scaling import component_rms, containing_exponent, propagate_scaling
from .nonlinear import nonlinear_exact, nonlinear_taylor

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Stage bookkeeping
# ---------------------------------------------------------------------------


def stage_names(num_filters: int) -> list[str]:
    """Quantization points in datapath order."""
    names = ["input", "fir[0]"]
    for step in range(num_filters - 1):
        names += [f"power[{step}]", f"nonlinear[{step}]", f"fir[{step + 1}]"]
    return names


def _fir_slot(index: int) -> int:
    return 1 + 3 * index


def _power_slot(step: int) -> int:
    return 2 + 3 * step


def _nonlinear_slot(step: int) -> int:
    return 3 + 3 * step


def step_gains(cfg: DbpConfig) -> tuple[float, ...]:
    """Effective g per nonlinear step: gamma term times trained scale."""
    return tuple(g * s for g, s in zip(cfg.gamma_steps, cfg.bank.nonlinear_scales))


def span_gamma(link: LinkParams) -> RadPerWatt:
    """gamma * L_eff of one span, in rad/W."""
    return link.gamma * effective_step_length(link.span_length_m, link)


def build_config(
    bank: FilterBank,
    link: LinkParams,
    nonlinearity: Nonlinearity = Nonlinearity.TAYLOR1,
    taylor_sign: TaylorSign = TaylorSign.COMPENSATING,
    quant: QuantConfig | None = None,
    quantized_bank: QuantizedFilterBank | None = None,
    stage_formats: tuple[FixedFormat, ...] | None = None,
) -> DbpConfig:
    """DbpConfig for ``bank`` on ``link``; fixed arithmetic when ``quant`` is given."""
    return DbpConfig(
        bank=bank,
        gamma_steps=(span_gamma(link),) * (bank.num_filters - 1),
        nonlinearity=nonlinearity,
        taylor_sign=taylor_sign,
        arithmetic=Arithmetic.FIXED if quant is not None else Arithmetic.FLOAT,
        quant=quant,
        quantized_bank=quantized_bank,
        stage_formats=stage_formats,
    )


# ---------------------------------------------------------------------------
# Symmetric FIR
# ---------------------------------------------------------------------------


def symmetric_fir(x: np.ndarray, unique_taps: np.ndarray) -> np.ndarray:
    """
    y[n] = h0 x[n] + sum_k h_k (x[n-k] + x[n+k]), zero padded, same length.

    Terms are accumulated in increasing k.
    """
    x = np.asarray(x, dtype=np.complex128)
    h = np.asarray(unique_taps, dtype=np.complex128)
    half_length = len(h) - 1
    n = len(x)
    padded = np.zeros(n + 2 * half_length, dtype=np.complex128)
    padded[half_length : half_length + n] = x

    y = h[0] * x
    for k in range(1, half_length + 1):
        y = y + h[k] * (padded[half_length - k : half_length - k + n] + padded[half_length + k : half_length + k + n])
    return y


def fir_apply(signal: ComplexSignal, fir: FirFilter) -> ComplexSignal:
    """Apply one symmetric FIR filter with zero-delay alignment."""
    if len(signal) <= fir.num_taps:
        raise ValidationError("signal", len(signal), f"must be longer than {fir.num_taps} taps")
    return signal.with_samples(symmetric_fir(signal.samples, fir.unique_taps))


def _symmetric_fir_codes(
    re: np.ndarray,
    im: np.ndarray,
    h_re: np.ndarray,
    h_im: np.ndarray,
    wide: bool,
) -> tuple[np.ndarray, np.ndarray]:
    """Exact integer accumulation of the symmetric FIR on complex codes."""
    re = as_codes(re, wide)
    im = as_codes(im, wide)
    half_length = len(h_re) - 1
    n = len(re)
    dtype = object if wide else np.int64
    pad_re = np.zeros(n + 2 * half_length, dtype=dtype)
    pad_im = np.zeros(n + 2 * half_length, dtype=dtype)
    pad_re[half_length : half_length + n] = re
    pad_im[half_length : half_length + n] = im

    hr, hi = int(h_re[0]), int(h_im[0])
    acc_re = hr * re - hi * im
    acc_im = hr * im + hi * re
    for k in range(1, half_length + 1):
        lo, up = half_length - k, half_length + k
        s_re = pad_re[lo : lo + n] + pad_re[up : up + n]
        s_im = pad_im[lo : lo + n] + pad_im[up : up + n]
        hr, hi = int(h_re[k]), int(h_im[k])
        acc_re = acc_re + (hr * s_re - hi * s_im)
        acc_im = acc_im + (hr * s_im + hi * s_re)
    return acc_re, acc_im


# ---------------------------------------------------------------------------
# Datapaths
# ---------------------------------------------------------------------------


class Datapath(Protocol):
    def ingest(self, x: np.ndarray): ...

    def fir(self, state, index: int): ...

    def nonlinear(self, state, step: int): ...

    def emit(self, state) -> np.ndarray: ...


def _cascade(x: np.ndarray, num_filters: int, path: Datapath) -> np.ndarray:
    state = path.fir(path.ingest(x), 0)
    for step in range(num_filters - 1):
        state = path.nonlinear(state, step)
        state = path.fir(state, step + 1)
    return path.emit(state)


def _effective_bank(cfg: DbpConfig) -> FilterBank:
    """Float bank, or the dequantized taps when a quantized bank is attached."""
    if cfg.quantized_bank is not None:
        return cfg.quantized_bank.to_bank()
    return cfg.bank


class FloatDatapath:
    """complex128 throughout."""

    def __init__(self, cfg: DbpConfig):
        self.cfg = cfg
        self.filters = _effective_bank(cfg).filters
        self.gains = step_gains(cfg)

    def ingest(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=np.complex128)

    def fir(self, x: np.ndarray, index: int) -> np.ndarray:
        return symmetric_fir(x, self.filters[index].unique_taps)

    def nonlinear(self, x: np.ndarray, step: int) -> np.ndarray:
        nl = self.cfg.nonlinearity
        if nl is Nonlinearity.OFF:
            return x
        if nl is Nonlinearity.EXACT:
            return nonlinear_exact(x, self.gains[step])
        return nonlinear_taylor(x, self.gains[step], self.cfg.taylor_sign)

    def emit(self, x: np.ndarray) -> np.ndarray:
        return x


class _RecordingDatapath(FloatDatapath):
    """Float datapath that records the RMS at every quantization point."""

    def __init__(self, cfg: DbpConfig):
        super().__init__(cfg)
        self.rms: list[float] = []

    def ingest(self, x: np.ndarray) -> np.ndarray:
        x = super().ingest(x)
        self.rms.append(component_rms(x))
        return x

    def fir(self, x: np.ndarray, index: int) -> np.ndarray:
        y = super().fir(x, index)
        self.rms.append(component_rms(y))
        return y

    def nonlinear(self, x: np.ndarray, step: int) -> np.ndarray:
        self.rms.append(component_rms(x.real**2 + x.imag**2))
        y = super().nonlinear(x, step)
        self.rms.append(component_rms(y))
        return y


@dataclass(frozen=True)
class FixedWord:
    """Complex codes sharing one format."""

    re: np.ndarray
    im: np.ndarray
    fmt: FixedFormat


def _bit_length(codes: np.ndarray) -> int:
    if codes.size == 0:
        return 0
    return int(np.max(np.abs(codes))).bit_length()


def _multiply(a: np.ndarray, b: np.ndarray | int) -> np.ndarray:
    """Exact product, promoting to Python ints when int64 could overflow."""
    b_bits = _bit_length(np.asarray(b))
    if needs_wide(_bit_length(a) + b_bits):
        return as_codes(a, True) * (int(b) if np.ndim(b) == 0 else as_codes(b, True))
    return a * b


def _shift_left(a: np.ndarray, shift: int) -> np.ndarray:
    if shift == 0:
        return a
    if a.dtype == object or needs_wide(_bit_length(a) + shift):
        return as_codes(a, True) << shift
    return a << shift


@dataclass
class FixedDatapath:
    """Bit-exact integer datapath; rounding only at the quantization points."""

    cfg: DbpConfig
    formats: tuple[FixedFormat, ...]
    qbank: QuantizedFilterBank = field(init=False)
    gain_codes: list[tuple[int, FixedFormat]] = field(init=False)
    trig_format: FixedFormat = field(init=False)

    def __post_init__(self) -> None:
        quant = self.cfg.quant
        self.mode = quant.rounding
        self.qbank = self.cfg.quantized_bank or quantize_bank(
            self.cfg.bank, quant.coeff_format, quant.rounding
        )
        self.gain_codes = [quantize_gain(g, quant.gain_bits) for g in step_gains(self.cfg)]
        self.trig_format = FixedFormat(
            word_bits=quant.gain_bits, scale_exp=containing_exponent(1.0, quant.gain_bits)
        )

    def _requantize(self, re: np.ndarray, im: np.ndarray, exp: int, fmt: FixedFormat) -> FixedWord:
        return FixedWord(
            requantize_code(re, exp, fmt, self.mode),
            requantize_code(im, exp, fmt, self.mode),
            fmt,
        )

    def ingest(self, x: np.ndarray) -> FixedWord:
        fmt = self.formats[0]
        re, im = quantize_complex(x, fmt, self.mode)
        return FixedWord(re, im, fmt)

    def fir(self, word: FixedWord, index: int) -> FixedWord:
        qf = self.qbank.filters[index]
        acc_bits = word.fmt.word_bits + 1 + qf.fmt.word_bits + 1 + qf.num_taps.bit_length()
        acc_re, acc_im = _symmetric_fir_codes(
            word.re, word.im, qf.re_codes, qf.im_codes, needs_wide(acc_bits)
        )
        return self._requantize(
            acc_re, acc_im, word.fmt.scale_exp + qf.fmt.scale_exp, self.formats[_fir_slot(index)]
        )

    def nonlinear(self, word: FixedWord, step: int) -> FixedWord:
        out_fmt = self.formats[_nonlinear_slot(step)]
        if self.cfg.nonlinearity is Nonlinearity.OFF:
            return self._requantize(word.re, word.im, word.fmt.scale_exp, out_fmt)

        wide = needs_wide(2 * word.fmt.word_bits + 1)
        re, im = as_codes(word.re, wide), as_codes(word.im, wide)
        power = re * re + im * im
        power_exp = 2 * word.fmt.scale_exp
        if self.cfg.quant.quantize_power:
            power_fmt = self.formats[_power_slot(step)]
            power = requantize_code(power, power_exp, power_fmt, self.mode)
            power_exp = power_fmt.scale_exp

        g_code, g_fmt = self.gain_codes[step]
        phi = _multiply(power, g_code)
        phi_exp = power_exp + g_fmt.scale_exp

        if self.cfg.nonlinearity is Nonlinearity.EXACT:
            return self._rotate(word, phi, phi_exp, out_fmt)

        # x (1 + s j phi): re - s phi im, im + s phi re, aligned to a common exponent
        sign = self.cfg.taylor_sign.factor
        common = word.fmt.scale_exp + min(0, phi_exp)
        x_shift = word.fmt.scale_exp - common
        p_shift = phi_exp + word.fmt.scale_exp - common
        base_re = _shift_left(as_codes(word.re, False), x_shift)
        base_im = _shift_left(as_codes(word.im, False), x_shift)
        cross_re = _shift_left(_multiply(phi, as_codes(word.im, False)), p_shift)
        cross_im = _shift_left(_multiply(phi, as_codes(word.re, False)), p_shift)
        if sign < 0:
            out_re, out_im = base_re + cross_re, base_im - cross_im
        else:
            out_re, out_im = base_re - cross_re, base_im + cross_im
        return self._requantize(out_re, out_im, common, out_fmt)

    def _rotate(self, word: FixedWord, phi: np.ndarray, phi_exp: int, out_fmt: FixedFormat) -> FixedWord:
        """x exp(-j phi) with cos/sin taken from a table quantized to gain_bits."""
        theta = -np.ldexp(np.asarray(phi).astype(np.float64), phi_exp)
        c = quantize_value(np.cos(theta), self.trig_format, self.mode)
        s = quantize_value(np.sin(theta), self.trig_format, self.mode)
        wide = needs_wide(word.fmt.word_bits + self.trig_format.word_bits + 1)
        re, im = as_codes(word.re, wide), as_codes(word.im, wide)
        c, s = as_codes(c, wide), as_codes(s, wide)
        return self._requantize(
            re * c - im * s,
            re * s + im * c,
            word.fmt.scale_exp + self.trig_format.scale_exp,
            out_fmt,
        )

    def emit(self, word: FixedWord) -> np.ndarray:
        return dequantize_complex(word.re, word.im, word.fmt)


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------


def calibrate_formats(x: np.ndarray, cfg: DbpConfig) -> tuple[FixedFormat, ...]:
    """
    Power-of-two formats for every quantization point from a float run on ``x``.

    Raises:
        ScalingError: if a stage carries no power
    """
    if cfg.quant is None:
        raise DbpError("calibration needs a QuantConfig")
    recorder = _RecordingDatapath(cfg)
    _cascade(np.asarray(x, dtype=np.complex128), cfg.bank.num_filters, recorder)
    rms = recorder.rms

    chain = [1.0] + [rms[i] / rms[i - 1] if rms[i - 1] > 0.0 else 0.0 for i in range(1, len(rms))]
    formats = propagate_scaling(
        chain, cfg.quant.signal_bits, cfg.quant.clip_sigma, input_rms=rms[0]
    )
    logger.debug(
        "Calibrated formats: "
        + ", ".join(f"{name}=2^{f.scale_exp}" for name, f in zip(stage_names(cfg.bank.num_filters), formats))
    )
    return tuple(formats)


def _check_signal(signal: ComplexSignal, cfg: DbpConfig) -> None:
    if not math.isclose(signal.sample_rate, cfg.bank.sample_rate, rel_tol=1e-9):
        raise DbpError(
            f"signal at {signal.sample_rate:.4g} Hz but bank designed for {cfg.bank.sample_rate:.4g} Hz"
        )
    if len(signal) <= 2 * cfg.edge_samples or len(signal) <= cfg.bank.num_taps:
        raise DbpError(
            f"{len(signal)} samples leave nothing after trimming {cfg.edge_samples} at each end",
            {"num_samples": len(signal), "edge_samples": cfg.edge_samples},
        )


def dbp_run(signal: ComplexSignal, cfg: DbpConfig) -> ComplexSignal:
    """
    Run the DBP cascade on a received field at the bank's sample rate.

    In fixed arithmetic, formats come from ``cfg.stage_formats`` or, when
    absent, from a calibration run on this signal.

    Raises:
        DbpError: for a rate mismatch or a signal too short for the edges
    """
    _check_signal(signal, cfg)
    num_filters = cfg.bank.num_filters
    if cfg.arithmetic is Arithmetic.FLOAT:
        path: Datapath = FloatDatapath(cfg)
    else:
        formats = cfg.stage_formats or calibrate_formats(signal.samples, cfg)
        if len(formats) != len(stage_names(num_filters)):
            raise DbpError(f"{len(formats)} stage formats for {len(stage_names(num_filters))} stages")
        path = FixedDatapath(cfg, tuple(formats))

    logger.debug(
        f"DBP {cfg.arithmetic.value}: {num_filters} filters x {cfg.bank.num_taps} taps, "
        f"nonlinearity {cfg.nonlinearity.value}, {len(signal)} samples"
    )
    return signal.with_samples(_cascade(signal.samples, num_filters, path))


def edge_symbols(cfg: DbpConfig, samples_per_symbol: int, span_symbols: int) -> int:
    """Symbols dropped at each end: the zero-padding reach plus half the RRC span."""
    return math.ceil(cfg.edge_samples / samples_per_symbol) + span_symbols // 2


def trim_edges(symbols: np.ndarray, edge: int) -> np.ndarray:
    """Drop ``edge`` symbols at both ends."""
    symbols = np.asarray(symbols)
    if 2 * edge >= len(symbols):
        raise DbpError(f"{len(symbols)} symbols cannot lose {edge} at each end")
    return symbols[edge : len(symbols) - edge]
