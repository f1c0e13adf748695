"""Pydantic data models for the TD-DBP toolkit.

All data structures are immutable (frozen) after creation. Models that
carry sample or tap arrays hold read-only numpy arrays, so a signal or a
filter bank can be shared between worker threads without copying.
"""

import math
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .types import (
    Arithmetic,
    BankSource,
    ComplexMultiplier,
    Decibel,
    DecibelMilliwatt,
    DesignMethod,
    FftCostModel,
    Hertz,
    Meters,
    Nonlinearity,
    RadPerWatt,
    RoundingMode,
    SsfmScheme,
    TaylorSign,
)

_ARRAY_CONFIG = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def frozen_array(value: Any, dtype: Any) -> np.ndarray:
    """Copy ``value`` into a 1-D read-only array of ``dtype``."""
    array = np.array(value, dtype=dtype)
    if array.ndim != 1:
        raise ValueError(f"expected a 1-D array, got shape {array.shape}")
    array.setflags(write=False)
    return array


# ---------------------------------------------------------------------------
# Signals
# ---------------------------------------------------------------------------


class ComplexSignal(BaseModel):
    """Uniformly sampled complex baseband waveform."""

    samples: np.ndarray
    sample_rate: Hertz = Field(gt=0)
    samples_per_symbol: int = Field(ge=1)

    model_config = _ARRAY_CONFIG

    @field_validator("samples", mode="before")
    @classmethod
    def validate_samples(cls, v: Any) -> np.ndarray:
        return frozen_array(v, np.complex128)

    @model_validator(mode="after")
    def check_whole_symbols(self) -> "ComplexSignal":
        if len(self.samples) % self.samples_per_symbol:
            raise ValueError(
                f"length {len(self.samples)} is not a multiple of "
                f"samples_per_symbol={self.samples_per_symbol}"
            )
        return self

    @property
    def symbol_rate(self) -> Hertz:
        return self.sample_rate / self.samples_per_symbol

    @property
    def num_symbols(self) -> int:
        return len(self.samples) // self.samples_per_symbol

    @property
    def power(self) -> float:
        """Mean sample power."""
        if len(self.samples) == 0:
            return 0.0
        return float(np.mean(np.abs(self.samples) ** 2))

    def __len__(self) -> int:
        return len(self.samples)

    def with_samples(self, samples: Any) -> "ComplexSignal":
        """Same timing metadata, new samples."""
        return ComplexSignal(
            samples=samples,
            sample_rate=self.sample_rate,
            samples_per_symbol=self.samples_per_symbol,
        )


class Constellation(BaseModel):
    """Unit-energy constellation; ``points[label]`` is the point for that bit pattern."""

    points: np.ndarray
    bits_per_symbol: int = Field(ge=1)

    model_config = _ARRAY_CONFIG

    @field_validator("points", mode="before")
    @classmethod
    def validate_points(cls, v: Any) -> np.ndarray:
        return frozen_array(v, np.complex128)

    @model_validator(mode="after")
    def check_labelling(self) -> "Constellation":
        if len(self.points) != 2**self.bits_per_symbol:
            raise ValueError(
                f"{len(self.points)} points cannot label {self.bits_per_symbol} bits"
            )
        if len(np.unique(self.points)) != len(self.points):
            raise ValueError("constellation points must be distinct")
        mean_power = float(np.mean(np.abs(self.points) ** 2))
        if not math.isclose(mean_power, 1.0, rel_tol=1e-9):
            raise ValueError(f"mean power must be 1, got {mean_power}")
        return self

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def gray_map(self) -> dict[int, complex]:
        """Bit pattern -> point."""
        return {label: complex(point) for label, point in enumerate(self.points)}


class Metrics(BaseModel):
    """Quality of one equalized block."""

    effective_snr_db: Decibel | None = None
    ber: float | None = Field(default=None, ge=0.0, le=1.0)
    num_symbols: int = Field(default=0, ge=0)
    num_bits: int = Field(default=0, ge=0)

    model_config = {"frozen": True}


# ---------------------------------------------------------------------------
# Link and simulation settings
# ---------------------------------------------------------------------------


class LinkParams(BaseModel):
    """Fiber link physics. SI units unless the field name says otherwise."""

    beta2: float = -21.7e-27            # s^2/m (-21.7 ps^2/km)
    gamma: float = Field(default=1.3e-3, ge=0.0)   # 1/(W m)
    alpha_db_per_km: float = Field(default=0.2, ge=0.0)
    span_length_m: Meters = Field(default=100e3, gt=0)
    num_spans: int = Field(default=8, ge=1)
    ase_noise_figure_db: Decibel = 5.0
    launch_power_dbm: DecibelMilliwatt = 0.0
    noise_enabled: bool = True

    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def total_length_m(self) -> Meters:
        return self.span_length_m * self.num_spans

    @property
    def alpha_per_m(self) -> float:
        """Power attenuation coefficient in 1/m."""
        return self.alpha_db_per_km * math.log(10.0) / 10.0 / 1000.0

    @property
    def span_gain(self) -> float:
        """Amplifier power gain that restores one span's loss."""
        return math.exp(self.alpha_per_m * self.span_length_m)

    def with_power(self, launch_power_dbm: DecibelMilliwatt) -> "LinkParams":
        return self.model_copy(update={"launch_power_dbm": launch_power_dbm})


class SsfmPlan(BaseModel):
    """Step layout of one span for the split-step solver."""

    steps_per_span: int = Field(ge=1)
    step_sizes: tuple[Meters, ...]
    scheme: SsfmScheme = SsfmScheme.SYMMETRIC

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def check_steps(self) -> "SsfmPlan":
        if len(self.step_sizes) != self.steps_per_span:
            raise ValueError(
                f"{len(self.step_sizes)} step sizes for steps_per_span={self.steps_per_span}"
            )
        if any(step <= 0 for step in self.step_sizes):
            raise ValueError("step sizes must be positive")
        return self

    @property
    def span_length_m(self) -> Meters:
        return math.fsum(self.step_sizes)


class SimulationSettings(BaseModel):
    """Transmitter, channel-solver and receiver rates."""

    symbol_rate: Hertz = Field(default=20e9, gt=0)
    modulation_order: int = 16
    sim_samples_per_symbol: int = Field(default=4, ge=2)
    dbp_samples_per_symbol: int = Field(default=2, ge=1)
    rolloff: float = Field(default=0.1, gt=0.0, le=1.0)
    span_symbols: int = Field(default=64, ge=2)
    forward_steps_per_span: int = Field(default=50, ge=1)
    scheme: SsfmScheme = SsfmScheme.SYMMETRIC

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("modulation_order")
    @classmethod
    def validate_order(cls, v: int) -> int:
        if v not in (2, 4, 16, 64):
            raise ValueError("modulation_order must be 2, 4, 16 or 64")
        return v

    @property
    def sim_sample_rate(self) -> Hertz:
        return self.symbol_rate * self.sim_samples_per_symbol

    @property
    def dbp_sample_rate(self) -> Hertz:
        return self.symbol_rate * self.dbp_samples_per_symbol


class DesignSettings(BaseModel):
    """CD filter design defaults."""

    num_taps: int = Field(default=25, ge=1)
    method: DesignMethod = DesignMethod.LSCO
    passband_guard: float = Field(default=1.1, ge=1.0)
    magnitude_bound: float = Field(default=1.001, ge=1.0)
    grid_oversampling: int = Field(default=16, ge=1)
    max_iterations: int = Field(default=500, ge=1)
    tolerance: float = Field(default=1e-8, gt=0.0)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("num_taps")
    @classmethod
    def validate_odd(cls, v: int) -> int:
        if v % 2 == 0:
            raise ValueError("num_taps must be odd")
        return v


# ---------------------------------------------------------------------------
# Fixed point
# ---------------------------------------------------------------------------


class FixedFormat(BaseModel):
    """Two's-complement word with a power-of-two scale: value = code * 2**scale_exp."""

    word_bits: int = Field(ge=2, le=32)
    scale_exp: int = 0

    model_config = {"frozen": True}

    @property
    def min_code(self) -> int:
        return -(1 << (self.word_bits - 1))

    @property
    def max_code(self) -> int:
        return (1 << (self.word_bits - 1)) - 1

    @property
    def ulp(self) -> float:
        return math.ldexp(1.0, self.scale_exp)

    @property
    def min_value(self) -> float:
        return math.ldexp(float(self.min_code), self.scale_exp)

    @property
    def max_value(self) -> float:
        return math.ldexp(float(self.max_code), self.scale_exp)

    def with_scale(self, scale_exp: int) -> "FixedFormat":
        return FixedFormat(word_bits=self.word_bits, scale_exp=scale_exp)


class QuantConfig(BaseModel):
    """Word lengths of the fixed-point DBP datapath.

    The scale exponents given here are starting points only: signal stages
    are rescaled by calibration and every filter gets its own coefficient
    exponent when it is quantized.
    """

    signal_format: FixedFormat = FixedFormat(word_bits=9)
    coeff_format: FixedFormat = FixedFormat(word_bits=6)
    clip_sigma: float = Field(default=4.0, gt=0.0)
    rounding: RoundingMode = RoundingMode.HALF_UP
    quantize_power: bool = True
    gain_bits: int = Field(default=12, ge=2, le=32)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @classmethod
    def from_bits(cls, signal_bits: int, coeff_bits: int, **kwargs: Any) -> "QuantConfig":
        return cls(
            signal_format=FixedFormat(word_bits=signal_bits),
            coeff_format=FixedFormat(word_bits=coeff_bits),
            **kwargs,
        )

    @property
    def signal_bits(self) -> int:
        return self.signal_format.word_bits

    @property
    def coeff_bits(self) -> int:
        return self.coeff_format.word_bits


# ---------------------------------------------------------------------------
# Filters
# ---------------------------------------------------------------------------


class FirFilter(BaseModel):
    """Symmetric complex FIR filter, stored as its unique taps h_0..h_K."""

    unique_taps: np.ndarray

    model_config = _ARRAY_CONFIG

    @field_validator("unique_taps", mode="before")
    @classmethod
    def validate_taps(cls, v: Any) -> np.ndarray:
        taps = frozen_array(v, np.complex128)
        if len(taps) == 0:
            raise ValueError("a filter needs at least one tap")
        if not np.all(np.isfinite(taps)):
            raise ValueError("taps must be finite")
        return taps

    @property
    def half_length(self) -> int:
        return len(self.unique_taps) - 1

    @property
    def num_taps(self) -> int:
        return 2 * self.half_length + 1

    @property
    def taps(self) -> np.ndarray:
        """Full tap vector (h_-K, ..., h_0, ..., h_K)."""
        return np.concatenate([self.unique_taps[:0:-1], self.unique_taps])

    @classmethod
    def from_taps(cls, taps: Any, atol: float = 0.0) -> "FirFilter":
        full = np.asarray(taps, dtype=np.complex128)
        if full.ndim != 1 or len(full) % 2 == 0:
            raise ValueError(f"expected an odd-length tap vector, got shape {full.shape}")
        if atol > 0:
            symmetric = np.allclose(full, full[::-1], rtol=0.0, atol=atol)
        else:
            symmetric = np.array_equal(full, full[::-1])
        if not symmetric:
            raise ValueError("taps are not symmetric")
        return cls(unique_taps=full[len(full) // 2:])

    @classmethod
    def impulse(cls, num_taps: int = 1) -> "FirFilter":
        if num_taps < 1 or num_taps % 2 == 0:
            raise ValueError("num_taps must be odd and positive")
        unique = np.zeros(num_taps // 2 + 1, dtype=np.complex128)
        unique[0] = 1.0
        return cls(unique_taps=unique)


def _unit_scales(data: Any) -> Any:
    if isinstance(data, dict) and data.get("nonlinear_scales") is None:
        filters = data.get("filters") or ()
        data = {**data, "nonlinear_scales": (1.0,) * max(len(filters) - 1, 0)}
    return data


def _check_bank_shape(filters: tuple, step_sizes: tuple, scales: tuple) -> None:
    if not filters:
        raise ValueError("a bank needs at least one filter")
    if len(step_sizes) != len(filters):
        raise ValueError(f"{len(step_sizes)} step sizes for {len(filters)} filters")
    if len({f.num_taps for f in filters}) != 1:
        raise ValueError("all filters of a bank must share their tap count")
    if len(scales) != len(filters) - 1:
        raise ValueError(f"{len(scales)} nonlinear scales for {len(filters)} filters")


class FilterBank(BaseModel):
    """The M CD filters of a symmetric 1-StPS DBP, plus per-step nonlinear scales."""

    filters: tuple[FirFilter, ...]
    step_sizes: tuple[Meters, ...]
    beta2: float
    sample_rate: Hertz = Field(gt=0)
    nonlinear_scales: tuple[float, ...]

    model_config = _ARRAY_CONFIG

    @model_validator(mode="before")
    @classmethod
    def fill_scales(cls, data: Any) -> Any:
        return _unit_scales(data)

    @model_validator(mode="after")
    def check_shape(self) -> "FilterBank":
        _check_bank_shape(self.filters, self.step_sizes, self.nonlinear_scales)
        return self

    @property
    def num_filters(self) -> int:
        return len(self.filters)

    @property
    def num_taps(self) -> int:
        return self.filters[0].num_taps

    @property
    def half_length(self) -> int:
        return self.filters[0].half_length

    def replace(self, **update: Any) -> "FilterBank":
        """Validated copy with some fields replaced."""
        return FilterBank(**{**dict(self), **update})


class QuantizedFilter(BaseModel):
    """Integer unique taps sharing one coefficient format."""

    re_codes: np.ndarray
    im_codes: np.ndarray
    fmt: FixedFormat

    model_config = _ARRAY_CONFIG

    @field_validator("re_codes", "im_codes", mode="before")
    @classmethod
    def validate_codes(cls, v: Any) -> np.ndarray:
        return frozen_array(v, np.int64)

    @model_validator(mode="after")
    def check_codes(self) -> "QuantizedFilter":
        if len(self.re_codes) != len(self.im_codes) or len(self.re_codes) == 0:
            raise ValueError("real and imaginary codes must be nonempty and equally long")
        for codes in (self.re_codes, self.im_codes):
            if codes.min() < self.fmt.min_code or codes.max() > self.fmt.max_code:
                raise ValueError(f"codes exceed the {self.fmt.word_bits}-bit range")
        return self

    @property
    def num_taps(self) -> int:
        return 2 * len(self.re_codes) - 1

    def to_filter(self) -> FirFilter:
        unique = np.ldexp(self.re_codes.astype(np.float64), self.fmt.scale_exp) + 1j * np.ldexp(
            self.im_codes.astype(np.float64), self.fmt.scale_exp
        )
        return FirFilter(unique_taps=unique)


class QuantizedFilterBank(BaseModel):
    """Filter bank with integer taps, as loaded into hardware."""

    filters: tuple[QuantizedFilter, ...]
    step_sizes: tuple[Meters, ...]
    beta2: float
    sample_rate: Hertz = Field(gt=0)
    nonlinear_scales: tuple[float, ...]

    model_config = _ARRAY_CONFIG

    @model_validator(mode="before")
    @classmethod
    def fill_scales(cls, data: Any) -> Any:
        return _unit_scales(data)

    @model_validator(mode="after")
    def check_shape(self) -> "QuantizedFilterBank":
        _check_bank_shape(self.filters, self.step_sizes, self.nonlinear_scales)
        return self

    @property
    def num_taps(self) -> int:
        return self.filters[0].num_taps

    @property
    def word_bits(self) -> int:
        return self.filters[0].fmt.word_bits

    def to_bank(self) -> FilterBank:
        return FilterBank(
            filters=tuple(f.to_filter() for f in self.filters),
            step_sizes=self.step_sizes,
            beta2=self.beta2,
            sample_rate=self.sample_rate,
            nonlinear_scales=self.nonlinear_scales,
        )


# ---------------------------------------------------------------------------
# DBP receiver
# ---------------------------------------------------------------------------


class DbpConfig(BaseModel):
    """Everything the DBP datapath needs for one run."""

    bank: FilterBank
    gamma_steps: tuple[RadPerWatt, ...]     # one per nonlinear step
    nonlinearity: Nonlinearity = Nonlinearity.TAYLOR1
    taylor_sign: TaylorSign = TaylorSign.COMPENSATING
    arithmetic: Arithmetic = Arithmetic.FLOAT
    quant: QuantConfig | None = None
    quantized_bank: QuantizedFilterBank | None = None
    stage_formats: tuple[FixedFormat, ...] | None = None

    model_config = _ARRAY_CONFIG

    @model_validator(mode="after")
    def check_config(self) -> "DbpConfig":
        if len(self.gamma_steps) != self.bank.num_filters - 1:
            raise ValueError(
                f"{len(self.gamma_steps)} nonlinear gains for {self.bank.num_filters} filters"
            )
        if self.arithmetic is Arithmetic.FIXED and self.quant is None:
            raise ValueError("fixed arithmetic needs a QuantConfig")
        if self.quantized_bank is not None and (
            len(self.quantized_bank.filters) != self.bank.num_filters
            or self.quantized_bank.num_taps != self.bank.num_taps
        ):
            raise ValueError("quantized bank does not match the float bank")
        return self

    @property
    def num_steps(self) -> int:
        return self.bank.num_filters - 1

    @property
    def edge_samples(self) -> int:
        """Samples at each end touched by zero padding: M * K."""
        return self.bank.num_filters * self.bank.half_length


# ---------------------------------------------------------------------------
# Cost models
# ---------------------------------------------------------------------------


class CostModel(BaseModel):
    """Assumptions of the direct-vs-FFT multiplication count."""

    fft: FftCostModel = FftCostModel.RADIX2
    multiplier: ComplexMultiplier = ComplexMultiplier.MULT4
    overlap_fraction: float | None = Field(default=0.5, gt=0.0, lt=1.0)

    model_config = {"frozen": True}


class CrossoverRow(BaseModel):
    """Real multiplies per output sample at one tap count."""

    num_taps: int
    direct_complex_mults: int
    direct_real_mults: float
    fft_real_mults: float | None
    best_fft_size: int | None

    model_config = {"frozen": True}


class CrossoverReport(BaseModel):
    """Direct convolution vs overlap-save FFT filtering."""

    rows: tuple[CrossoverRow, ...]
    crossover_taps: int | None
    cost_model: CostModel

    model_config = {"frozen": True}


class CostReport(BaseModel):
    """Per-DBP-step arithmetic counts of the parallel direct-form datapath."""

    num_taps: int
    parallelism: int
    signal_bits: int
    coeff_bits: int
    multiplier: ComplexMultiplier
    complex_multipliers: int
    real_multipliers: int
    adders: int
    area_power_proxy: float
    clock_hz: Hertz
    bits_per_sample: float

    model_config = {"frozen": True}

    @property
    def throughput_samples_per_s(self) -> float:
        return self.parallelism * self.clock_hz

    @property
    def throughput_bits_per_s(self) -> float:
        return self.throughput_samples_per_s * self.bits_per_sample

    @property
    def proxy_per_bit(self) -> float:
        """Proxy normalized by information throughput (pJ/bit-style hook)."""
        return self.area_power_proxy * self.clock_hz / self.throughput_bits_per_s


# ---------------------------------------------------------------------------
# Training and experiments
# ---------------------------------------------------------------------------


class TrainConfig(BaseModel):
    """Joint tap optimization with pruning and fake-quantized fine-tuning."""

    initial_taps: int = 25
    target_taps: int = 15
    batch_symbols: int = Field(default=2**14, ge=64)
    learning_rate: float = Field(default=1e-3, gt=0.0)
    lr_decay: float = Field(default=1.0, gt=0.0, le=1.0)
    max_iterations: int | None = Field(default=None, ge=1)
    prune_interval: int = Field(default=500, ge=1)
    prune_schedule: tuple[tuple[int, int], ...] | None = None
    fakequant_start: int | None = Field(default=None, ge=0)
    fakequant_iterations: int = Field(default=500, ge=500, le=1000)
    fakequant_lr: float = Field(default=1e-5, gt=0.0)
    coeff_bits: int = Field(default=6, ge=2, le=32)
    seed: int = 0
    launch_power_dbm: DecibelMilliwatt | None = None
    batch_pool: int = Field(default=0, ge=0)
    train_nonlinear_scales: bool = True
    nonlinearity: Nonlinearity = Nonlinearity.TAYLOR1
    taylor_sign: TaylorSign = TaylorSign.COMPENSATING
    log_every: int = Field(default=50, ge=1)
    divergence_db: Decibel = Field(default=10.0, gt=0.0)
    divergence_patience: int = Field(default=200, ge=1)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def check_schedule(self) -> "TrainConfig":
        if self.initial_taps % 2 == 0 or self.target_taps % 2 == 0:
            raise ValueError("initial_taps and target_taps must be odd")
        if not 1 <= self.target_taps <= self.initial_taps:
            raise ValueError("need 1 <= target_taps <= initial_taps")
        schedule = self.resolved_prune_schedule()
        pairs = (self.initial_taps - self.target_taps) // 2
        if sum(count for _, count in schedule) != pairs:
            raise ValueError(f"prune_schedule must remove exactly {pairs} tap pairs")
        iterations = [it for it, _ in schedule]
        if any(it <= 0 for it in iterations) or iterations != sorted(set(iterations)):
            raise ValueError("prune iterations must be positive and strictly increasing")
        if any(count <= 0 for _, count in schedule):
            raise ValueError("each prune event removes at least one pair")
        if iterations and self.resolved_fakequant_start() < iterations[-1]:
            raise ValueError("fakequant_start must not precede the last prune event")
        if self.max_iterations is not None and self.max_iterations < self.total_iterations:
            raise ValueError(
                f"max_iterations={self.max_iterations} is shorter than the schedule "
                f"({self.total_iterations} iterations)"
            )
        return self

    def resolved_prune_schedule(self) -> tuple[tuple[int, int], ...]:
        """Explicit schedule, or one pair every prune_interval iterations."""
        if self.prune_schedule is not None:
            return tuple(tuple(event) for event in self.prune_schedule)
        pairs = (self.initial_taps - self.target_taps) // 2
        return tuple((self.prune_interval * (i + 1), 1) for i in range(pairs))

    def resolved_fakequant_start(self) -> int:
        if self.fakequant_start is not None:
            return self.fakequant_start
        schedule = self.resolved_prune_schedule()
        last = schedule[-1][0] if schedule else 0
        return last + self.prune_interval

    @property
    def total_iterations(self) -> int:
        return self.resolved_fakequant_start() + self.fakequant_iterations


class VariantSpec(BaseModel):
    """One DBP receiver configuration in a sweep."""

    name: str = Field(min_length=1)
    source: BankSource
    taps: int | None = Field(default=None, ge=1)
    quant: QuantConfig | None = None
    path: str | None = None
    nonlinearity: Nonlinearity = Nonlinearity.TAYLOR1
    taylor_sign: TaylorSign = TaylorSign.COMPENSATING
    design_method: DesignMethod = DesignMethod.LSCO

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def check_source(self) -> "VariantSpec":
        if self.source is BankSource.FILE and not self.path:
            raise ValueError(f"variant {self.name}: file source needs a path")
        if self.source is BankSource.LSCO and self.taps is None:
            raise ValueError(f"variant {self.name}: lsco source needs taps")
        if self.taps is not None and self.taps % 2 == 0:
            raise ValueError(f"variant {self.name}: taps must be odd")
        return self


class ExperimentSpec(BaseModel):
    """Versioned recipe for one launch-power sweep."""

    schema_version: Literal[1] = 1
    name: str = "experiment"
    link: LinkParams = LinkParams()
    simulation: SimulationSettings = SimulationSettings()
    design: DesignSettings = DesignSettings()
    train: TrainConfig | None = None
    variants: tuple[VariantSpec, ...] = Field(min_length=1)
    sweep_dbm: tuple[DecibelMilliwatt, ...] = Field(min_length=1)
    symbols_per_point: int = Field(default=2**14, ge=64)
    seeds: tuple[int, ...] = Field(default=(0,), min_length=1)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def check_variants(self) -> "ExperimentSpec":
        names = [v.name for v in self.variants]
        if len(set(names)) != len(names):
            raise ValueError("variant names must be unique")
        for variant in self.variants:
            if variant.source is BankSource.LEARNED:
                if self.train is None:
                    raise ValueError(f"variant {variant.name} is learned but no train section is given")
                if variant.taps is not None and variant.taps != self.train.target_taps:
                    raise ValueError(
                        f"variant {variant.name}: taps={variant.taps} differs from "
                        f"train.target_taps={self.train.target_taps}"
                    )
        return self
