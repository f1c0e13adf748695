"""Chromatic-dispersion FIR filter design and frequency-response inspection.

Filters approximate the DBP response H(w) = exp(+j beta2/2 delta w^2) on the
normalized grid w in [-pi, pi) (w = omega / sample_rate). Taps are
symmetric, so H_FIR(w) = u_0 + 2 sum_k u_k cos(k w) with u the unique taps.
"""

import logging
import math

import numpy as np
import scipy.linalg
import scipy.optimize

from ..core.exceptions import FilterDesignError, ValidationError
from ..core.models import DesignSettings, FilterBank, FirFilter, LinkParams
from ..core.types import DesignMethod

logger = logging.getLogger(__name__)

# Relative overshoot of the magnitude bound tolerated before giving up;
# smaller overshoots are removed by rescaling the taps.
MAX_BOUND_OVERSHOOT = 1e-2


def ideal_cd_response(omega: np.ndarray | float, beta2: float, delta: float) -> np.ndarray:
    """exp(j beta2/2 delta omega^2), omega in rad/s."""
    omega = np.asarray(omega, dtype=np.float64)
    return np.exp(1j * (beta2 / 2.0) * delta * omega**2)


def frequency_grid(num_points: int) -> np.ndarray:
    """Uniform normalized frequencies over [-pi, pi)."""
    return -np.pi + 2.0 * np.pi * np.arange(num_points) / num_points


def default_passband_fraction(rolloff: float, samples_per_symbol: int, guard: float = 1.1) -> float:
    """Shaped-signal bandwidth over sample rate, widened by ``guard``."""
    return min((1.0 + rolloff) / samples_per_symbol * guard, 1.0)


def required_taps(beta2: float, delta: float, sample_rate: float, passband_fraction: float) -> int:
    """Odd tap count spanning the dispersion memory of one step."""
    bandwidth = passband_fraction * sample_rate
    return int(2 * math.floor(2 * math.pi * abs(beta2) * delta * bandwidth * sample_rate / 2) + 1)


def _symmetric_basis(w: np.ndarray, half_length: int) -> np.ndarray:
    k = np.arange(half_length + 1)
    basis = 2.0 * np.cos(np.outer(w, k))
    basis[:, 0] = 1.0
    return basis


def _check_design_args(num_taps: int, passband_fraction: float, magnitude_bound: float) -> None:
    if num_taps < 1 or num_taps % 2 == 0:
        raise ValidationError("num_taps", num_taps, "must be odd and positive")
    if not 0.0 < passband_fraction <= 1.0:
        raise ValidationError("passband_fraction", passband_fraction, "must lie in (0, 1]")
    if not magnitude_bound >= 1.0:
        raise ValidationError("magnitude_bound", magnitude_bound, "must be at least 1")


def _bounded_refit(
    passband_basis: np.ndarray,
    optimum: np.ndarray,
    grid_basis: np.ndarray,
    start: np.ndarray,
    magnitude_bound: float,
    max_iterations: int,
    tolerance: float,
) -> tuple[np.ndarray, scipy.optimize.OptimizeResult]:
    """
    min ||A u - d||^2 over the passband s.t. |B u| <= bound on the grid (SLSQP).

    With A = QR and the LS optimum u*, the objective is ||R (u - u*)||^2 up
    to a constant, so the search runs in y = R (u - u*) / s (real and
    imaginary parts stacked), where the objective is 0.5 ||y||^2 and
    ``start`` maps to a unit vector.
    """
    n = passband_basis.shape[1]
    _, r = scipy.linalg.qr(passband_basis, mode="economic")
    scale = max(float(np.linalg.norm(r @ (start - optimum))), 1e-300)
    # B R^-1 is real because the cosine basis is
    whitened = scipy.linalg.solve_triangular(r, grid_basis.T, trans="T").T * scale
    base = grid_basis @ optimum
    bound_sq = magnitude_bound**2

    def objective(y: np.ndarray) -> tuple[float, np.ndarray]:
        return 0.5 * float(y @ y), y

    def parts(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return base.real + whitened @ y[:n], base.imag + whitened @ y[n:]

    def headroom(y: np.ndarray) -> np.ndarray:
        re, im = parts(y)
        return bound_sq - re**2 - im**2

    def headroom_jac(y: np.ndarray) -> np.ndarray:
        re, im = parts(y)
        return np.hstack([-2.0 * re[:, None] * whitened, -2.0 * im[:, None] * whitened])

    y0 = r @ (start - optimum) / scale
    result = scipy.optimize.minimize(
        objective,
        np.concatenate([y0.real, y0.imag]),
        jac=True,
        method="SLSQP",
        constraints=[{"type": "ineq", "fun": headroom, "jac": headroom_jac}],
        options={"maxiter": max_iterations, "ftol": tolerance},
    )
    y = result.x[:n] + 1j * result.x[n:]
    return optimum + scale * scipy.linalg.solve_triangular(r, y), result


def lsco_design(
    num_taps: int,
    beta2: float,
    delta: float,
    sample_rate: float,
    passband_fraction: float,
    magnitude_bound: float,
    grid_oversampling: int = 16,
    max_iterations: int = 500,
    tolerance: float = 1e-8,
) -> FirFilter:
    """
    Constrained least-squares (LS-CO) CD filter.

    Minimizes the squared error over the passband |w| <= passband_fraction * pi
    subject to |H_FIR(w)| <= ``magnitude_bound`` on the dense grid. The
    unconstrained LS fit is returned as is when it already meets the bound;
    otherwise SLSQP starts from the LS taps scaled onto the bound.
    ``magnitude_bound=inf`` returns the plain LS fit.

    Raises:
        FilterDesignError: if the bound is still violated by more than
            MAX_BOUND_OVERSHOOT after ``max_iterations`` SLSQP iterations
    """
    _check_design_args(num_taps, passband_fraction, magnitude_bound)
    half_length = num_taps // 2
    w = frequency_grid(grid_oversampling * num_taps)
    basis = _symmetric_basis(w, half_length)
    desired = ideal_cd_response(w * sample_rate, beta2, delta)
    in_band = np.abs(w) <= passband_fraction * np.pi

    taps, *_ = scipy.linalg.lstsq(basis[in_band].astype(np.complex128), desired[in_band])
    if math.isinf(magnitude_bound):
        return FirFilter(unique_taps=taps)

    # Responses are even in w, so the non-negative half of the grid suffices
    grid_basis = _symmetric_basis(np.unique(np.abs(w)), half_length)
    peak = float(np.max(np.abs(grid_basis @ taps)))
    if peak <= magnitude_bound:
        logger.debug(f"LS-CO T={num_taps} delta={delta:.1f} m: LS fit within bound (peak {peak:.6f})")
        return FirFilter(unique_taps=taps)

    taps, result = _bounded_refit(
        basis[in_band],
        taps,
        grid_basis,
        taps * (magnitude_bound / peak),
        magnitude_bound,
        max_iterations,
        tolerance,
    )
    if not result.success:
        logger.warning(f"LS-CO T={num_taps} delta={delta:.1f} m: {result.message}")

    peak = float(np.max(np.abs(grid_basis @ taps)))
    if peak > magnitude_bound:
        if peak > magnitude_bound * (1.0 + MAX_BOUND_OVERSHOOT):
            raise FilterDesignError(
                f"magnitude bound {magnitude_bound} not met after {result.nit} iterations "
                f"(peak {peak:.6f})",
                {"num_taps": num_taps, "delta": delta, "peak": peak},
            )
        taps = taps * (magnitude_bound / peak)

    logger.debug(
        f"LS-CO T={num_taps} delta={delta:.1f} m: {result.nit} SLSQP iterations, peak |H|={peak:.6f}"
    )
    return FirFilter(unique_taps=taps)


def least_squares_design(
    num_taps: int,
    beta2: float,
    delta: float,
    sample_rate: float,
    passband_fraction: float,
    grid_oversampling: int = 16,
) -> FirFilter:
    """Unconstrained least-squares fit over the passband."""
    return lsco_design(
        num_taps,
        beta2,
        delta,
        sample_rate,
        passband_fraction,
        math.inf,
        grid_oversampling=grid_oversampling,
    )


def freq_response(fir: FirFilter, num_points: int) -> np.ndarray:
    """DTFT sum_k h_k exp(-j w k) on frequency_grid(num_points)."""
    if num_points < fir.num_taps:
        raise ValidationError("num_points", num_points, f"must be at least T={fir.num_taps}")
    w = frequency_grid(num_points)
    lags = np.arange(-fir.half_length, fir.half_length + 1)
    return np.exp(-1j * np.outer(w, lags)) @ fir.taps


def cascade_response(bank: FilterBank, num_points: int | None = None) -> np.ndarray:
    """Pointwise product of all filter responses."""
    if not bank.filters:
        raise ValidationError("bank", 0, "needs at least one filter")
    num_points = num_points or 16 * bank.num_taps
    response = np.ones(num_points, dtype=np.complex128)
    for fir in bank.filters:
        response = response * freq_response(fir, num_points)
    return response


def cascade_ideal(bank: FilterBank, num_points: int | None = None) -> np.ndarray:
    """Product of the ideal responses the bank approximates."""
    num_points = num_points or 16 * bank.num_taps
    omega = frequency_grid(num_points) * bank.sample_rate
    return ideal_cd_response(omega, bank.beta2, math.fsum(bank.step_sizes))


def inband_error(response: np.ndarray, ideal: np.ndarray, passband_fraction: float) -> float:
    """RMS of response - ideal over |w| <= passband_fraction * pi."""
    response = np.asarray(response)
    in_band = np.abs(frequency_grid(len(response))) <= passband_fraction * np.pi
    return float(np.sqrt(np.mean(np.abs(response[in_band] - np.asarray(ideal)[in_band]) ** 2)))


def bank_step_sizes(link: LinkParams) -> tuple[float, ...]:
    """Half step, num_spans - 1 full steps, half step."""
    half = link.span_length_m / 2.0
    return (half,) + (link.span_length_m,) * (link.num_spans - 1) + (half,)


def design_bank(
    link: LinkParams,
    num_taps: int,
    sample_rate: float,
    method: DesignMethod = DesignMethod.LSCO,
    passband_fraction: float | None = None,
    settings: DesignSettings | None = None,
    rolloff: float = 0.1,
    samples_per_symbol: int = 2,
) -> FilterBank:
    """
    Symmetric 1-StPS DBP bank: num_spans + 1 filters, half steps at both ends.
    """
    settings = settings or DesignSettings()
    if passband_fraction is None:
        passband_fraction = default_passband_fraction(
            rolloff, samples_per_symbol, settings.passband_guard
        )
    bound = settings.magnitude_bound if method is DesignMethod.LSCO else math.inf

    steps = bank_step_sizes(link)
    designed: dict[float, FirFilter] = {}
    for delta in steps:
        if delta not in designed:
            designed[delta] = lsco_design(
                num_taps,
                link.beta2,
                delta,
                sample_rate,
                passband_fraction,
                bound,
                grid_oversampling=settings.grid_oversampling,
                max_iterations=settings.max_iterations,
                tolerance=settings.tolerance,
            )

    logger.info(
        f"Designed {method.value} bank: {len(steps)} filters x {num_taps} taps, "
        f"passband {passband_fraction:.3f}"
    )
    return FilterBank(
        filters=tuple(designed[delta] for delta in steps),
        step_sizes=steps,
        beta2=link.beta2,
        sample_rate=sample_rate,
    )
