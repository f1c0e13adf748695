"""Tests for the time-domain DBP datapath, receiver and complexity estimate."""

import numpy as np
import pytest

from src.channel.link import transmit
from src.core.exceptions import DbpError, ValidationError
from src.core.models import ComplexSignal, CostModel, FirFilter, LinkParams, QuantConfig, SimulationSettings
from src.core.types import Arithmetic, FftCostModel, Nonlinearity, TaylorSign
from src.dbp.complexity import estimate_crossover, fft_real_mults, overlap_save_cost
from src.dbp.engine import (
    build_config,
    calibrate_formats,
    dbp_run,
    edge_symbols,
    fir_apply,
    stage_names,
    step_gains,
    symmetric_fir,
    trim_edges,
)
from src.dbp.nonlinear import nonlinear_exact, nonlinear_taylor
from src.dbp.receiver import evaluate, evaluate_ideal, receive
from src.filters.design import design_bank
from src.fixedpoint.coefficients import quantize_bank


def _signal(samples: np.ndarray, rate: float = 40e9) -> ComplexSignal:
    return ComplexSignal(samples=samples, sample_rate=rate, samples_per_symbol=2)


class TestSymmetricFir:
    """Tests for the direct-form symmetric filter."""

    def test_matches_naive_convolution(self, rng):
        """A random 15-tap filter agrees with full-length convolution."""
        unique = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        fir = FirFilter(unique_taps=unique)
        x = rng.standard_normal(256) + 1j * rng.standard_normal(256)
        expected = np.convolve(x, fir.taps, mode="same")
        np.testing.assert_allclose(symmetric_fir(x, unique), expected, rtol=0, atol=1e-12)

    def test_impulse_is_identity(self, rng):
        x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        np.testing.assert_array_equal(symmetric_fir(x, np.array([1.0 + 0j])), x)

    def test_zero_delay(self):
        """A centred impulse stays in place."""
        x = np.zeros(41, dtype=complex)
        x[20] = 1.0
        y = symmetric_fir(x, np.array([0.5, 0.25, 0.125]))
        np.testing.assert_allclose(y[18:23], [0.125, 0.25, 0.5, 0.25, 0.125])

    def test_signal_shorter_than_filter(self):
        with pytest.raises(ValidationError):
            fir_apply(_signal(np.ones(10, dtype=complex)), FirFilter.impulse(25))


class TestNonlinearStep:
    """Tests for the nonlinear DBP step."""

    def test_exact_preserves_magnitude(self, rng):
        x = rng.standard_normal(100) + 1j * rng.standard_normal(100)
        np.testing.assert_allclose(np.abs(nonlinear_exact(x, 0.3)), np.abs(x))

    def test_taylor_error_bound(self, rng):
        """|taylor - exact| <= |x| (g |x|^2)^2 / 2."""
        x = 0.1 * (rng.standard_normal(1000) + 1j * rng.standard_normal(1000))
        gain = 5.0
        phi = gain * np.abs(x) ** 2
        diff = np.abs(nonlinear_taylor(x, gain) - nonlinear_exact(x, gain))
        assert np.all(diff <= np.abs(x) * phi**2 / 2 + 1e-15)

    def test_sign_conventions(self):
        """Compensating rotates by -j; as printed by +j."""
        x = np.array([1.0 + 0j])
        assert nonlinear_taylor(x, 0.1, TaylorSign.COMPENSATING)[0] == pytest.approx(1.0 - 0.1j)
        assert nonlinear_taylor(x, 0.1, TaylorSign.AS_PRINTED)[0] == pytest.approx(1.0 + 0.1j)


class TestConfig:
    """Tests for configuration helpers."""

    def test_stage_names(self):
        names = stage_names(3)
        assert len(names) == 3 * 3 - 1
        assert names[:5] == ["input", "fir[0]", "power[0]", "nonlinear[0]", "fir[1]"]
        assert names[-1] == "fir[2]"

    def test_build_config_arithmetic(self, short_bank, short_link):
        assert build_config(short_bank, short_link).arithmetic is Arithmetic.FLOAT
        fixed = build_config(short_bank, short_link, quant=QuantConfig())
        assert fixed.arithmetic is Arithmetic.FIXED
        assert len(fixed.gamma_steps) == short_bank.num_filters - 1

    def test_step_gains_scaled(self, short_bank, short_link):
        cfg = build_config(short_bank.replace(nonlinear_scales=(0.5, 2.0)), short_link)
        gains = step_gains(cfg)
        assert gains[0] == pytest.approx(0.5 * cfg.gamma_steps[0])
        assert gains[1] == pytest.approx(2.0 * cfg.gamma_steps[1])

    def test_gamma_count_checked(self, short_bank):
        from src.core.models import DbpConfig

        with pytest.raises(ValueError):
            DbpConfig(bank=short_bank, gamma_steps=(0.1,))

    def test_edges(self, short_bank, short_link):
        cfg = build_config(short_bank, short_link)
        assert cfg.edge_samples == 3 * 12
        assert edge_symbols(cfg, 2, 64) == 18 + 32
        assert len(trim_edges(np.arange(200), 50)) == 100
        with pytest.raises(DbpError):
            trim_edges(np.arange(100), 50)


class TestFloatDatapath:
    """Tests for the float DBP run."""

    def test_impulse_bank_is_identity(self, impulse_bank, short_link, rng):
        cfg = build_config(impulse_bank, short_link, Nonlinearity.OFF)
        x = rng.standard_normal(128) + 1j * rng.standard_normal(128)
        np.testing.assert_array_equal(dbp_run(_signal(x), cfg).samples, x)

    def test_impulse_bank_applies_nonlinear_steps(self, impulse_bank, short_link, rng):
        """With pass-through filters only the nonlinear rotations remain."""
        cfg = build_config(impulse_bank, short_link, Nonlinearity.EXACT)
        x = 0.03 * (rng.standard_normal(128) + 1j * rng.standard_normal(128))
        expected = nonlinear_exact(nonlinear_exact(x, cfg.gamma_steps[0]), cfg.gamma_steps[1])
        np.testing.assert_allclose(dbp_run(_signal(x), cfg).samples, expected, rtol=1e-12)

    def test_rate_mismatch(self, short_bank, short_link):
        cfg = build_config(short_bank, short_link)
        with pytest.raises(DbpError):
            dbp_run(_signal(np.ones(512, dtype=complex), rate=80e9), cfg)

    def test_too_short(self, short_bank, short_link):
        cfg = build_config(short_bank, short_link)
        with pytest.raises(DbpError):
            dbp_run(_signal(np.ones(60, dtype=complex)), cfg)

    def test_quantized_taps_used_in_float_mode(self, short_bank, short_link, short_transmission):
        """A float run with an attached quantized bank uses the rounded taps."""
        qbank = quantize_bank(short_bank, QuantConfig().coeff_format)
        with_q = build_config(short_bank, short_link, quantized_bank=qbank)
        rounded = build_config(qbank.to_bank(), short_link)
        np.testing.assert_array_equal(
            dbp_run(short_transmission.received, with_q).samples,
            dbp_run(short_transmission.received, rounded).samples,
        )


class TestFixedDatapath:
    """Tests for the bit-exact integer datapath."""

    def test_calibrated_formats(self, short_bank, short_link, short_transmission):
        cfg = build_config(short_bank, short_link, quant=QuantConfig.from_bits(9, 6))
        formats = calibrate_formats(short_transmission.received.samples, cfg)
        assert len(formats) == len(stage_names(short_bank.num_filters))
        assert all(f.word_bits == 9 for f in formats)

    def test_wide_words_track_float(self, short_bank, short_link, short_transmission):
        """At 24-bit words the fixed datapath is indistinguishable from float."""
        received = short_transmission.received
        quant = QuantConfig.from_bits(24, 24, gain_bits=24, clip_sigma=8.0)
        for nonlinearity in (Nonlinearity.TAYLOR1, Nonlinearity.EXACT):
            reference = dbp_run(received, build_config(short_bank, short_link, nonlinearity)).samples
            fixed = dbp_run(received, build_config(short_bank, short_link, nonlinearity, quant=quant)).samples
            error = np.linalg.norm(fixed - reference) / np.linalg.norm(reference)
            assert error < 1e-4

    def test_deterministic(self, short_bank, short_link, short_transmission):
        cfg = build_config(short_bank, short_link, quant=QuantConfig.from_bits(9, 6))
        first = dbp_run(short_transmission.received, cfg).samples
        second = dbp_run(short_transmission.received, cfg).samples
        np.testing.assert_array_equal(first, second)

    def test_outputs_on_grid(self, short_bank, short_link, short_transmission):
        """Every output value is a code of the last stage format."""
        cfg = build_config(short_bank, short_link, quant=QuantConfig.from_bits(9, 6))
        formats = calibrate_formats(short_transmission.received.samples, cfg)
        cfg = cfg.model_copy(update={"stage_formats": formats})
        out = dbp_run(short_transmission.received, cfg).samples
        codes = np.ldexp(out.real, -formats[-1].scale_exp)
        np.testing.assert_array_equal(codes, np.round(codes))
        assert np.max(np.abs(codes)) <= 256

    def test_stage_format_count_checked(self, short_bank, short_link, short_transmission):
        cfg = build_config(short_bank, short_link, quant=QuantConfig(), stage_formats=(QuantConfig().signal_format,))
        with pytest.raises(DbpError):
            dbp_run(short_transmission.received, cfg)


class TestReceiver:
    """Tests for DBP plus matched filter and metrics."""

    def test_receive_trims_edges(self, short_bank, short_link, fast_sim, short_transmission):
        cfg = build_config(short_bank, short_link)
        equalized, reference = receive(short_transmission, cfg, fast_sim)
        edge = edge_symbols(cfg, 2, fast_sim.span_symbols)
        assert len(equalized) == len(reference) == 2048 - 2 * edge

    def test_linear_link_compensated(self, linear_link, fast_sim):
        """Noiseless gamma=0 link: LS-CO CD compensation and the frequency-domain ceiling."""
        transmission = transmit(linear_link, fast_sim, 2048, seed=2)
        bank = design_bank(linear_link, 25, fast_sim.dbp_sample_rate)
        lsco = evaluate(transmission, build_config(bank, linear_link, Nonlinearity.OFF), fast_sim)
        ideal = evaluate_ideal(transmission, linear_link, fast_sim)
        assert lsco.effective_snr_db > 20.0
        assert ideal.effective_snr_db > 30.0

    def test_nonlinear_compensation_helps(self, fast_sim):
        """At high launch power DBP beats linear CD compensation."""
        link = LinkParams(num_spans=2, noise_enabled=False, launch_power_dbm=8.0)
        transmission = transmit(link, fast_sim, 2048, seed=5)
        bank = design_bank(link, 25, fast_sim.dbp_sample_rate)
        linear = evaluate(transmission, build_config(bank, link, Nonlinearity.OFF), fast_sim)
        exact = evaluate(transmission, build_config(bank, link, Nonlinearity.EXACT), fast_sim)
        assert exact.effective_snr_db > linear.effective_snr_db

    def test_taylor_matches_exact_at_low_power(self, fast_sim):
        """At -2 dBm the first-order step costs under 0.3 dB."""
        link = LinkParams(num_spans=2, launch_power_dbm=-2.0)
        transmission = transmit(link, fast_sim, 4096, seed=6)
        bank = design_bank(link, 25, fast_sim.dbp_sample_rate)
        taylor = evaluate(transmission, build_config(bank, link, Nonlinearity.TAYLOR1), fast_sim)
        exact = evaluate(transmission, build_config(bank, link, Nonlinearity.EXACT), fast_sim)
        assert abs(taylor.effective_snr_db - exact.effective_snr_db) < 0.3

    def test_nine_bit_coefficients_cost_under_one_db(self, short_bank, short_link, fast_sim, short_transmission):
        """Rounding every filter to 9 bits barely moves the link SNR."""
        qbank = quantize_bank(short_bank, QuantConfig.from_bits(9, 9).coeff_format)
        exact = evaluate(short_transmission, build_config(short_bank, short_link), fast_sim)
        rounded = evaluate(short_transmission, build_config(short_bank, short_link, quantized_bank=qbank), fast_sim)
        assert exact.effective_snr_db - rounded.effective_snr_db < 1.0

    def test_snr_grows_with_taps(self, linear_link, fast_sim):
        """Longer LS-CO filters never compensate dispersion worse."""
        transmission = transmit(linear_link, fast_sim, 4096, seed=7)
        snr = [
            evaluate(
                transmission,
                build_config(design_bank(linear_link, taps, fast_sim.dbp_sample_rate), linear_link, Nonlinearity.OFF),
                fast_sim,
            ).effective_snr_db
            for taps in range(5, 26, 4)
        ]
        assert all(later >= earlier - 0.1 for earlier, later in zip(snr, snr[1:]))
        assert snr[-1] > snr[0] + 10.0

    @pytest.mark.slow
    def test_eight_span_linear_inversion(self):
        """8 x 100 km, gamma=0, noiseless: 25-tap LS-CO reaches 25 dB, within 5 dB of the ceiling."""
        link = LinkParams(num_spans=8, gamma=0.0, noise_enabled=False)
        sim = SimulationSettings(forward_steps_per_span=1)
        transmission = transmit(link, sim, 8192, seed=0)
        bank = design_bank(link, 25, sim.dbp_sample_rate)
        lsco = evaluate(transmission, build_config(bank, link, Nonlinearity.OFF), sim)
        ideal = evaluate_ideal(transmission, link, sim)
        assert lsco.effective_snr_db >= 25.0
        assert lsco.effective_snr_db >= ideal.effective_snr_db - 5.0
        assert ideal.effective_snr_db >= lsco.effective_snr_db - 0.5


class TestComplexity:
    """Tests for the direct vs FFT cost estimate."""

    def test_fft_counts(self):
        assert fft_real_mults(8, FftCostModel.RADIX2) == 48.0
        assert fft_real_mults(16, FftCostModel.SPLIT_RADIX) == 16 * 4 - 48 + 4

    def test_overlap_save_needs_room(self):
        assert overlap_save_cost(25, 16, CostModel()) is None
        assert overlap_save_cost(25, 64, CostModel()) == pytest.approx((2 * 2 * 64 * 6 + 4 * 64) / 32)

    def test_radix2_crossover(self):
        """The crossover falls in the 20-40 tap region (29 with radix-2, half overlap)."""
        report = estimate_crossover()
        assert report.crossover_taps == 29
        assert 20 <= report.crossover_taps <= 40

    def test_split_radix_not_later(self):
        split = estimate_crossover(cost_model=CostModel(fft=FftCostModel.SPLIT_RADIX))
        assert split.crossover_taps is not None
        assert split.crossover_taps <= 29

    def test_rows_per_tap(self):
        report = estimate_crossover(tap_range=[5, 15, 25])
        assert [row.num_taps for row in report.rows] == [5, 15, 25]
        assert report.rows[1].direct_complex_mults == 8

    def test_bad_fft_size(self):
        with pytest.raises(ValidationError):
            estimate_crossover(fft_sizes=[24])
