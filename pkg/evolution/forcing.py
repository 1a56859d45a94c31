"""
Forcing terms f(t) in coefficient space.
"""

from typing import Optional

import numpy as np

from models import CoefVec, ForcingTerm, SpectralBasis
from utils.errors import DomainError


def zero_forcing() -> ForcingTerm:
    return ForcingTerm(kind="zero", description="zero")


def constant_forcing(constant: CoefVec, description: str = "constant") -> ForcingTerm:
    return ForcingTerm(kind="constant", constant=constant, description=description)


def sampled_forcing(
    basis: SpectralBasis,
    times: np.ndarray,
    samples: np.ndarray,
    description: str = "sampled",
) -> ForcingTerm:
    """Coefficient rows at strictly increasing times, linear in between."""
    times = np.asarray(times, dtype=float)
    samples = np.asarray(samples, dtype=complex)
    if times.ndim != 1 or times.shape[0] < 2 or np.any(np.diff(times) <= 0):
        raise DomainError("forcing times must be strictly increasing (>= 2 samples)")
    if samples.shape != (times.shape[0], basis.count):
        raise DomainError(
            f"forcing samples must have shape {(times.shape[0], basis.count)}, "
            f"got {samples.shape}"
        )
    return ForcingTerm(
        kind="sampled", times=times, samples=samples, description=description
    )


def is_zero(f: Optional[ForcingTerm]) -> bool:
    return f is None or f.kind == "zero"


def check_span(f: Optional[ForcingTerm], T: float) -> None:
    """Sampled forcing must cover [0, T]."""
    if f is not None and f.kind == "sampled":
        if f.times[0] > 0.0 or f.times[-1] < T * (1 - 1e-12):
            raise DomainError(
                f"forcing samples span [{f.times[0]}, {f.times[-1]}], need [0, {T}]"
            )


def forcing_at(f: Optional[ForcingTerm], times: np.ndarray, count: int) -> np.ndarray:
    """(len(times), count) coefficient rows of f at the given times."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if is_zero(f):
        return np.zeros((times.shape[0], count), dtype=complex)
    if f.kind == "constant":
        return np.tile(f.constant.values, (times.shape[0], 1))
    if f.kind == "sampled":
        rows = np.empty((times.shape[0], count), dtype=complex)
        for k in range(count):
            re = np.interp(times, f.times, f.samples[:, k].real)
            im = np.interp(times, f.times, f.samples[:, k].imag)
            rows[:, k] = re + 1j * im
        return rows
    raise DomainError(f"unknown forcing kind {f.kind!r}")
