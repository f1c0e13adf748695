"""Nonlinear DBP steps."""

import numpy as np

from ..core.types import TaylorSign


def nonlinear_exact(x: np.ndarray, gain: float) -> np.ndarray:
    """x * exp(-j g |x|^2): undoes the Kerr rotation of one step."""
    x = np.asarray(x, dtype=np.complex128)
    return x * np.exp(-1j * gain * (x.real**2 + x.imag**2))


def nonlinear_taylor(
    x: np.ndarray,
    gain: float,
    sign: TaylorSign = TaylorSign.COMPENSATING,
) -> np.ndarray:
    """
    First-order expansion x * (1 + s j g |x|^2).

    ``sign`` COMPENSATING (s = -1) matches nonlinear_exact; AS_PRINTED
    (s = +1) expands the forward rotation instead.
    """
    x = np.asarray(x, dtype=np.complex128)
    phase = TaylorSign(sign).factor * gain * (x.real**2 + x.imag**2)
    return x * (1.0 + 1j * phase)
