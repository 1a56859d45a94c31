"""
Per-mode propagators and Duhamel quadrature.

Each kernel maps elapsed time s (column) and eigenvalues (row) to the
propagator weight of the respective equation:

    wave position   sin(sqrt(l) s) / sqrt(l)   (s at l = 0)
    wave velocity   cos(sqrt(l) s)
    heat            exp(-l s)
    schrodinger     -i exp(-i l s)
"""

from typing import Callable

import numpy as np
import scipy.integrate

Kernel = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _omega(lam: np.ndarray) -> np.ndarray:
    return np.sqrt(np.maximum(lam, 0.0))


def wave_sine_kernel(s: np.ndarray, lam: np.ndarray) -> np.ndarray:
    # s * sinc(omega s / pi) == sin(omega s) / omega, with the l -> 0 limit s
    return s * np.sinc(_omega(lam) * s / np.pi)


def wave_cosine_kernel(s: np.ndarray, lam: np.ndarray) -> np.ndarray:
    return np.cos(_omega(lam) * s)


def heat_kernel(s: np.ndarray, lam: np.ndarray) -> np.ndarray:
    return np.exp(-lam * s)


def schrodinger_kernel(s: np.ndarray, lam: np.ndarray) -> np.ndarray:
    return -1j * np.exp(-1j * lam * s)


def simpson(values: np.ndarray, dx: float) -> np.ndarray:
    """Composite Simpson along axis 0 (real and imaginary parts separately)."""
    real = scipy.integrate.simpson(values.real, dx=dx, axis=0)
    if np.iscomplexobj(values):
        return real + 1j * scipy.integrate.simpson(values.imag, dx=dx, axis=0)
    return real


def duhamel(
    kernel: Kernel,
    lam: np.ndarray,
    forcing_samples: np.ndarray,
    dx: float,
    stride: int,
) -> np.ndarray:
    """
    I_j = int_0^{t_j} kernel(t_j - tau) f(tau) dtau for t_j = j * stride * dx.

    forcing_samples holds f at tau_m = m * dx, m = 0 .. stride * J. With
    stride 2 every integral covers an even number of sub-intervals; with
    stride 1 scipy's Simpson handles odd counts (two samples fall back to
    the trapezoid).

    Returns:
        (J + 1, modes) complex array, row 0 is zero
    """
    n_samples = forcing_samples.shape[0]
    n_out = (n_samples - 1) // stride + 1
    out = np.zeros((n_out, lam.shape[0]), dtype=complex)
    for j in range(1, n_out):
        m = stride * j
        elapsed = (m - np.arange(m + 1))[:, None] * dx
        integrand = kernel(elapsed, lam[None, :]) * forcing_samples[: m + 1]
        out[j] = simpson(integrand, dx)
    return out
