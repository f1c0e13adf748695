"""Tests for CD filter design."""

import math

import numpy as np
import pytest

from src.core.exceptions import ValidationError
from src.core.models import FirFilter, LinkParams
from src.core.types import DesignMethod
from src.filters.design import (
    bank_step_sizes,
    cascade_ideal,
    cascade_response,
    default_passband_fraction,
    design_bank,
    freq_response,
    ideal_cd_response,
    inband_error,
    least_squares_design,
    lsco_design,
    required_taps,
)

BETA2 = -21.7e-27
RATE = 40e9
PASSBAND = default_passband_fraction(0.1, 2)


def _error(fir: FirFilter, delta: float) -> float:
    points = 16 * fir.num_taps
    ideal = ideal_cd_response(np.linspace(-np.pi, np.pi, points, endpoint=False) * RATE, BETA2, delta)
    return inband_error(freq_response(fir, points), ideal, PASSBAND)


class TestIdealResponse:
    """Tests for the target response."""

    def test_all_pass(self):
        omega = np.linspace(-1e11, 1e11, 101)
        np.testing.assert_allclose(np.abs(ideal_cd_response(omega, BETA2, 100e3)), 1.0)

    def test_zero_frequency_is_unity(self):
        assert ideal_cd_response(0.0, BETA2, 100e3) == pytest.approx(1.0)

    def test_passband_fraction(self):
        """(1 + rolloff) / sps widened by 10%."""
        assert PASSBAND == pytest.approx(1.1 * 1.1 / 2.0)

    def test_required_taps_odd(self):
        taps = required_taps(BETA2, 100e3, RATE, PASSBAND)
        assert taps % 2 == 1
        assert 5 <= taps <= 25


class TestLscoDesign:
    """Tests for the constrained least-squares design."""

    def test_magnitude_bound_holds(self):
        """|H| never exceeds the bound on the design grid."""
        fir = lsco_design(25, BETA2, 100e3, RATE, PASSBAND, 1.001)
        assert fir.num_taps == 25
        assert np.max(np.abs(freq_response(fir, 16 * 25))) <= 1.001 + 1e-9

    def test_least_squares_is_the_error_floor(self):
        """Constraining the magnitude can only raise the in-band error."""
        ls = least_squares_design(25, BETA2, 100e3, RATE, PASSBAND)
        constrained = lsco_design(25, BETA2, 100e3, RATE, PASSBAND, 1.001)
        assert _error(constrained, 100e3) >= _error(ls, 100e3) - 1e-12
        assert _error(constrained, 100e3) < 0.1

    def test_close_to_least_squares(self):
        """T=25 over one 100 km step: the bound costs at most half again the LS error."""
        ls = least_squares_design(25, BETA2, 100e3, RATE, PASSBAND)
        constrained = lsco_design(25, BETA2, 100e3, RATE, PASSBAND, 1.001)
        assert _error(constrained, 100e3) <= 1.5 * _error(ls, 100e3)
        assert np.max(np.abs(freq_response(constrained, 16 * 25))) <= 1.001 + 1e-9

    def test_infinite_bound_is_least_squares(self):
        ls = least_squares_design(25, BETA2, 100e3, RATE, PASSBAND)
        unbounded = lsco_design(25, BETA2, 100e3, RATE, PASSBAND, math.inf)
        np.testing.assert_allclose(unbounded.unique_taps, ls.unique_taps, rtol=1e-9, atol=0)

    @pytest.mark.parametrize("beta2,delta", [(BETA2, 1e-3), (0.0, 100e3)])
    def test_no_dispersion_gives_unit_impulse(self, beta2, delta):
        fir = lsco_design(25, beta2, delta, RATE, PASSBAND, 1.001)
        np.testing.assert_allclose(fir.taps, FirFilter.impulse(25).taps, atol=1e-6)

    def test_deterministic(self):
        first = lsco_design(15, BETA2, 100e3, RATE, PASSBAND, 1.001)
        second = lsco_design(15, BETA2, 100e3, RATE, PASSBAND, 1.001)
        np.testing.assert_array_equal(first.unique_taps, second.unique_taps)

    def test_longer_filters_fit_better(self):
        assert _error(least_squares_design(25, BETA2, 100e3, RATE, PASSBAND), 100e3) < _error(
            least_squares_design(9, BETA2, 100e3, RATE, PASSBAND), 100e3
        )

    def test_even_taps_rejected(self):
        with pytest.raises(ValidationError):
            lsco_design(24, BETA2, 100e3, RATE, PASSBAND, 1.001)

    def test_bound_below_one_rejected(self):
        with pytest.raises(ValidationError):
            lsco_design(25, BETA2, 100e3, RATE, PASSBAND, 0.9)

    def test_freq_response_needs_enough_points(self):
        with pytest.raises(ValidationError):
            freq_response(FirFilter.impulse(25), 10)


class TestDesignBank:
    """Tests for the multi-step bank layout."""

    def test_half_steps_at_both_ends(self):
        link = LinkParams(num_spans=4)
        steps = bank_step_sizes(link)
        assert steps == (50e3, 100e3, 100e3, 100e3, 50e3)
        assert math.fsum(steps) == pytest.approx(link.total_length_m)

    def test_bank_shape(self, short_link, short_bank):
        assert short_bank.num_filters == short_link.num_spans + 1
        assert short_bank.num_taps == 25
        assert short_bank.nonlinear_scales == (1.0,) * short_link.num_spans
        np.testing.assert_array_equal(short_bank.filters[0].unique_taps, short_bank.filters[-1].unique_taps)

    def test_cascade_matches_total_dispersion(self, short_bank):
        """The filter product approximates the response of the whole link."""
        error = inband_error(cascade_response(short_bank), cascade_ideal(short_bank), PASSBAND)
        assert error < 0.2

    def test_least_squares_method(self, short_link):
        bank = design_bank(short_link, 9, RATE, DesignMethod.LEAST_SQUARES)
        assert bank.num_taps == 9

    def test_cascade_accumulates_error(self, short_bank):
        """Several passes through truncated filters drift further than one pass."""
        single = _error(short_bank.filters[1], short_bank.step_sizes[1])
        cascade = inband_error(cascade_response(short_bank), cascade_ideal(short_bank), PASSBAND)
        assert cascade > single


class TestFreqResponse:
    """Tests for the DTFT helper."""

    def test_symmetric_taps_give_even_response(self, rng):
        fir = FirFilter(unique_taps=rng.standard_normal(6) + 1j * rng.standard_normal(6))
        response = freq_response(fir, 64)
        np.testing.assert_allclose(response[1:], response[1:][::-1], rtol=0, atol=1e-12)

    def test_impulse_is_flat(self):
        np.testing.assert_allclose(freq_response(FirFilter.impulse(5), 32), 1.0)
