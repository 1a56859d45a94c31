"""
Picard iteration on the Duhamel representation of the semilinear equations.

    u^(m+1)(t) = linear part(t) + int_0^t kernel(t - tau) F(u^(m)(tau)) dtau

The time interval is a uniform grid split into slices. Each slice is
iterated to tolerance from its own initial data; a slice whose differences
stop contracting is bisected, and the solution is marched slice by slice
with the end state of one slice as initial data of the next.

The integral is composite Simpson on the grid refined by midpoints, with
the iterate carried to the midpoints by a cubic spline.
"""

from typing import List, Optional, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from evolution.duhamel import (
    duhamel,
    heat_kernel,
    schrodinger_kernel,
    wave_cosine_kernel,
    wave_sine_kernel,
)
from evolution.linear import trajectory_norm_traces
from models import (
    CoefVec,
    Equation,
    Nonlinearity,
    PicardConfig,
    PicardReport,
    SpectralBasis,
    Trajectory,
)
from semilinear.nonlinearity import nonlinear_forcing
from utils.errors import ConfigurationError, DomainError, NonConvergenceError
from utils.logging import log_event

MIN_SLICE_STEPS = 2


class _Stagnation(Exception):
    def __init__(self, history: List[float]):
        super().__init__("Picard differences stopped contracting")
        self.history = history


def sup_dom_e_metric(lam: np.ndarray, diff: np.ndarray) -> float:
    """sup over rows of sqrt(sum_{l>0} l |d|^2 + sum_{l=0} |d|^2)."""
    weights = np.where(lam > 0, lam, 1.0)
    return float(np.sqrt((np.abs(diff) ** 2 * weights).sum(axis=1)).max())


def contraction_report(history: List[float]) -> List[float]:
    """Successive ratios of difference norms; empty below two iterations."""
    if len(history) < 2:
        return []
    return [
        (history[m] / history[m - 1]) if history[m - 1] > 0 else 0.0
        for m in range(1, len(history))
    ]


def _validate(config: PicardConfig) -> None:
    if not config.tol > 0:
        raise ConfigurationError(f"tol must be positive, got {config.tol}")
    if config.max_iter < 1:
        raise ConfigurationError(f"max_iter must be >= 1, got {config.max_iter}")
    if config.time_slices < 1:
        raise ConfigurationError(f"time_slices must be >= 1, got {config.time_slices}")
    if config.steps_per_slice < MIN_SLICE_STEPS:
        raise ConfigurationError(
            f"steps_per_slice must be >= {MIN_SLICE_STEPS}, "
            f"got {config.steps_per_slice}"
        )


def _linear_part(
    equation: Equation, lam: np.ndarray, c0: np.ndarray, d0: Optional[np.ndarray],
    s: np.ndarray,
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    t = s[:, None]
    if equation is Equation.WAVE:
        sine = wave_sine_kernel(t, lam[None, :])
        cosine = wave_cosine_kernel(t, lam[None, :])
        return c0 * cosine + d0 * sine, -c0 * lam * sine + d0 * cosine
    if equation is Equation.HEAT:
        return c0 * heat_kernel(t, lam[None, :]), None
    return c0 * np.exp(-1j * lam[None, :] * t), None


def half_step_states(s: np.ndarray, states: np.ndarray) -> np.ndarray:
    """
    States on the grid refined by midpoints.

    Even rows are the given states; odd rows come from a not-a-knot cubic
    spline through them, real and imaginary parts separately.
    """
    mid = 0.5 * (s[:-1] + s[1:])
    fine = np.empty((2 * len(s) - 1, states.shape[1]), dtype=complex)
    fine[0::2] = states
    re = CubicSpline(s, states.real, axis=0)(mid)
    im = CubicSpline(s, states.imag, axis=0)(mid)
    fine[1::2] = re + 1j * im
    return fine


def _duhamel_map(
    equation: Equation,
    basis: SpectralBasis,
    F: Nonlinearity,
    s: np.ndarray,
    states: np.ndarray,
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    lam = basis.eigenvalues
    forcing = nonlinear_forcing(basis, F, half_step_states(s, states))
    half = 0.5 * (s[1] - s[0])
    if equation is Equation.WAVE:
        return (
            duhamel(wave_sine_kernel, lam, forcing, half, stride=2),
            duhamel(wave_cosine_kernel, lam, forcing, half, stride=2),
        )
    kernel = heat_kernel if equation is Equation.HEAT else schrodinger_kernel
    return duhamel(kernel, lam, forcing, half, stride=2), None


def _iterate_slice(
    equation: Equation,
    basis: SpectralBasis,
    F: Nonlinearity,
    c0: np.ndarray,
    d0: Optional[np.ndarray],
    s: np.ndarray,
    config: PicardConfig,
) -> Tuple[np.ndarray, Optional[np.ndarray], List[float]]:
    lam = basis.eigenvalues
    base_u, base_v = _linear_part(equation, lam, c0, d0, s)
    u, v = base_u, base_v
    history: List[float] = []
    for _ in range(config.max_iter):
        du, dv = _duhamel_map(equation, basis, F, s, u)
        u_next = base_u + du
        v_next = None if base_v is None else base_v + dv
        history.append(sup_dom_e_metric(lam, u_next - u))
        u, v = u_next, v_next
        if history[-1] < config.tol:
            return u, v, history
        if len(history) >= 2 and history[-1] >= history[-2]:
            raise _Stagnation(history)
    raise _Stagnation(history)


def picard_solve(
    equation: Equation,
    g: CoefVec,
    h: Optional[CoefVec],
    F: Nonlinearity,
    T: float,
    config: PicardConfig = PicardConfig(),
) -> Tuple[Trajectory, PicardReport]:
    """
    Solve the semilinear equation on [0, T].

    The grid has time_slices * steps_per_slice uniform steps; slices are
    index ranges of that grid, so bisection never moves a grid time.

    Raises:
        DomainError: wave without h, or T not positive
        NonConvergenceError: a slice stagnates at the bisection limit
    """
    equation = Equation(equation)
    _validate(config)
    if not T > 0:
        raise DomainError(f"final time must be positive, got {T}")
    if equation is Equation.WAVE and h is None:
        raise DomainError("wave equation needs an initial velocity h")
    basis = g.basis

    steps = config.time_slices * config.steps_per_slice
    times = np.linspace(0.0, T, steps + 1)
    states = np.zeros((steps + 1, basis.count), dtype=complex)
    velocities = (
        np.zeros((steps + 1, basis.count), dtype=complex)
        if equation is Equation.WAVE
        else None
    )

    report = PicardReport()
    c0 = g.values.copy()
    d0 = h.values.copy() if h is not None else None
    pending = [
        (k * config.steps_per_slice, (k + 1) * config.steps_per_slice, 0)
        for k in range(config.time_slices)
    ]

    while pending:
        start, stop, depth = pending.pop(0)
        s = times[start : stop + 1] - times[start]
        try:
            u, v, history = _iterate_slice(equation, basis, F, c0, d0, s, config)
        except _Stagnation as stalled:
            ratios = contraction_report(stalled.history)
            if stop - start < 2 * MIN_SLICE_STEPS or depth >= config.max_bisections:
                raise NonConvergenceError(
                    f"Picard iteration did not converge on [{times[start]}, "
                    f"{times[stop]}]",
                    {
                        "slice": [float(times[start]), float(times[stop])],
                        "depth": depth,
                        "difference_norms": stalled.history,
                        "contraction_ratios": ratios,
                    },
                )
            middle = start + (stop - start) // 2
            pending[0:0] = [(start, middle, depth + 1), (middle, stop, depth + 1)]
            report.bisections += 1
            report.flagged = report.flagged or any(r >= 1 for r in ratios)
            log_event(
                "PICARD_SLICE_BISECTED",
                {"start": times[start], "end": times[stop], "depth": depth + 1},
            )
            continue

        states[start : stop + 1] = u
        if velocities is not None:
            velocities[start : stop + 1] = v
            d0 = v[-1].copy()
        c0 = u[-1].copy()

        ratios = contraction_report(history)
        report.iterations += len(history)
        report.difference_norms.extend(history)
        report.contraction_ratios.extend(ratios)
        report.flagged = report.flagged or any(r >= 1 for r in ratios)
        report.slices.append(
            {
                "start": float(times[start]),
                "end": float(times[stop]),
                "iterations": len(history),
            }
        )
        log_event(
            "PICARD_SLICE_CONVERGED",
            {
                "start": times[start],
                "end": times[stop],
                "iterations": len(history),
                "last_difference": history[-1],
            },
        )

    traj = Trajectory(
        equation=equation,
        times=times,
        states=states,
        basis=basis,
        velocities=velocities,
    )
    traj.traces = trajectory_norm_traces(traj)
    return traj, report


def fixed_point_residual(
    equation: Equation,
    traj: Trajectory,
    g: CoefVec,
    h: Optional[CoefVec],
    F: Nonlinearity,
) -> float:
    """sup-domE distance between u and one application of the Duhamel map."""
    equation = Equation(equation)
    lam = traj.basis.eigenvalues
    s = traj.times - traj.times[0]
    d0 = h.values if h is not None else None
    base_u, _ = _linear_part(equation, lam, g.values, d0, s)
    du, _ = _duhamel_map(equation, traj.basis, F, s, traj.states)
    return sup_dom_e_metric(lam, base_u + du - traj.states)
