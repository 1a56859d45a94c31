"""
Linear wave, heat and Schrodinger evolution in the eigenbasis.

Every mode evolves exactly in time; only the forced (Duhamel) part is
approximated, by composite Simpson on a half-step sampling of the forcing.
"""

from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from evolution.duhamel import (
    duhamel,
    heat_kernel,
    schrodinger_kernel,
    wave_cosine_kernel,
    wave_sine_kernel,
)
from evolution.forcing import check_span, forcing_at, is_zero
from models import CoefVec, Equation, ForcingTerm, NormRecord, SpectralBasis, Trajectory
from utils.errors import DomainError
from utils.logging import log_event

DEFAULT_ALPHAS = (0.0, 1.0, 2.0)
GENERATOR_STEPS = 64


# ------------------------------------------------------------------
# Norms
# ------------------------------------------------------------------


def _squared(values: np.ndarray) -> np.ndarray:
    return np.abs(values) ** 2


def _energy_weights(lam: np.ndarray) -> np.ndarray:
    # shifted bases can carry negative eigenvalues; they weigh as zero modes
    return np.clip(lam, 0.0, None)


def ealpha_norm(c: CoefVec, alpha: float) -> float:
    """sqrt(sum lambda_k^alpha |a_k|^2); zero modes count only at alpha = 0."""
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    lam = _energy_weights(c.basis.eigenvalues)
    return float(np.sqrt(np.sum(np.power(lam, alpha) * _squared(c.values))))


def dual_norm(c: CoefVec) -> float:
    """sqrt(sum_{lambda_k > 0} |a_k|^2 / lambda_k)."""
    lam = c.basis.eigenvalues
    positive = lam > 0
    return float(np.sqrt(np.sum(_squared(c.values[positive]) / lam[positive])))


def norms(c: CoefVec, alphas: Iterable[float] = DEFAULT_ALPHAS) -> NormRecord:
    lam = _energy_weights(c.basis.eigenvalues)
    return NormRecord(
        mu=float(np.sqrt(np.sum(_squared(c.values)))),
        dom_e=float(np.sqrt(np.sum(lam * _squared(c.values)))),
        dual=dual_norm(c),
        ealpha={float(a): ealpha_norm(c, a) for a in alphas},
    )


def state_norm_traces(lam: np.ndarray, states: np.ndarray) -> Dict[str, np.ndarray]:
    lam = _energy_weights(lam)
    sq = _squared(states)
    return {
        "mu": np.sqrt(sq.sum(axis=1)),
        "dom_e": np.sqrt((sq * lam).sum(axis=1)),
        "e_alpha_2": np.sqrt((sq * lam**2).sum(axis=1)),
    }


def ealpha_trace(lam: np.ndarray, states: np.ndarray, alpha: float) -> np.ndarray:
    """E_alpha norm of every state row; zero modes count only at alpha = 0."""
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    weights = np.power(_energy_weights(lam), alpha)
    return np.sqrt((_squared(states) * weights).sum(axis=1))


def trajectory_norm_traces(traj: Trajectory) -> Dict[str, np.ndarray]:
    """
    Norm traces recomputed from the stored states.

    energy is the wave energy 1/2 |d_t u|_mu^2 + 1/2 |u|_domE^2 for wave
    trajectories and the Dirichlet energy 1/2 |u|_domE^2 otherwise.
    """
    lam = traj.basis.eigenvalues
    traces = state_norm_traces(lam, traj.states)
    if traj.velocities is not None:
        vsq = _squared(traj.velocities)
        positive = lam > 0
        traces["velocity_mu"] = np.sqrt(vsq.sum(axis=1))
        dual_sq = vsq[:, positive] / lam[positive]
        traces["velocity_dual"] = np.sqrt(dual_sq.sum(axis=1))
        traces["energy"] = 0.5 * traces["velocity_mu"] ** 2 + 0.5 * traces["dom_e"] ** 2
    else:
        traces["energy"] = 0.5 * traces["dom_e"] ** 2
    return traces


def wave_energy_bound(g: CoefVec, h: CoefVec) -> float:
    """sum_{lambda_k > 0} |beta_k|^2 / lambda_k + sum |alpha_k|^2."""
    return dual_norm(h) ** 2 + float(np.sum(_squared(g.values)))


# ------------------------------------------------------------------
# Evolution
# ------------------------------------------------------------------


def _check_inputs(T: float, steps: int, *coefs: Optional[CoefVec]) -> SpectralBasis:
    if not T > 0:
        raise DomainError(f"final time must be positive, got {T}")
    if steps < 1:
        raise DomainError(f"steps must be >= 1, got {steps}")
    present = [c for c in coefs if c is not None]
    basis = present[0].basis
    if any(c.basis is not basis for c in present):
        raise DomainError("initial data must share one basis")
    return basis


def _forced_part(
    kernel, lam: np.ndarray, f: Optional[ForcingTerm], T: float, steps: int
) -> np.ndarray:
    if is_zero(f):
        return np.zeros((steps + 1, lam.shape[0]), dtype=complex)
    check_span(f, T)
    dt = T / steps
    half_times = np.arange(2 * steps + 1) * (dt / 2)
    samples = forcing_at(f, half_times, lam.shape[0])
    return duhamel(kernel, lam, samples, dt / 2, stride=2)


def wave_coefficients(
    g: CoefVec, h: CoefVec, f: Optional[ForcingTerm], T: float, steps: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(times, position coefficients, velocity coefficients) on a uniform grid."""
    basis = _check_inputs(T, steps, g, h)
    lam = basis.eigenvalues
    if np.any(lam < 0):
        raise DomainError("wave evolution needs nonnegative eigenvalues")
    times = np.linspace(0.0, T, steps + 1)
    t = times[:, None]
    sine = wave_sine_kernel(t, lam[None, :])
    cosine = wave_cosine_kernel(t, lam[None, :])
    position = g.values * cosine + h.values * sine
    velocity = -g.values * lam * sine + h.values * cosine
    position = position + _forced_part(wave_sine_kernel, lam, f, T, steps)
    velocity = velocity + _forced_part(wave_cosine_kernel, lam, f, T, steps)
    return times, position, velocity


def _finish(
    equation: Equation,
    basis: SpectralBasis,
    times: np.ndarray,
    states: np.ndarray,
    velocities: Optional[np.ndarray] = None,
) -> Trajectory:
    traj = Trajectory(
        equation=equation,
        times=times,
        states=states,
        basis=basis,
        velocities=velocities,
    )
    traj.traces = trajectory_norm_traces(traj)
    log_event(
        "TRAJECTORY_EVOLVED",
        {
            "equation": equation.value,
            "steps": len(times) - 1,
            "T": float(times[-1]),
            "final_mu": float(traj.traces["mu"][-1]),
        },
    )
    return traj


def wave_evolve(
    g: CoefVec, h: CoefVec, f: Optional[ForcingTerm], T: float, steps: int
) -> Trajectory:
    """Wave equation d_tt u + L u = f with u(0) = g, d_t u(0) = h."""
    times, position, velocity = wave_coefficients(g, h, f, T, steps)
    return _finish(Equation.WAVE, g.basis, times, position, velocity)


def heat_evolve(
    g: CoefVec, f: Optional[ForcingTerm], T: float, steps: int
) -> Trajectory:
    """Heat equation d_t u + L u = f with u(0) = g."""
    basis = _check_inputs(T, steps, g)
    lam = basis.eigenvalues
    times = np.linspace(0.0, T, steps + 1)
    states = g.values * heat_kernel(times[:, None], lam[None, :])
    states = states + _forced_part(heat_kernel, lam, f, T, steps)
    return _finish(Equation.HEAT, basis, times, states)


def schrodinger_evolve(
    g: CoefVec, f: Optional[ForcingTerm], T: float, steps: int
) -> Trajectory:
    """Schrodinger equation i d_t u - L u = f with u(0) = g."""
    basis = _check_inputs(T, steps, g)
    lam = basis.eigenvalues
    times = np.linspace(0.0, T, steps + 1)
    states = g.values * np.exp(-1j * lam[None, :] * times[:, None])
    states = states + _forced_part(schrodinger_kernel, lam, f, T, steps)
    return _finish(Equation.SCHRODINGER, basis, times, states)


def evolve(
    equation: Equation,
    g: CoefVec,
    h: Optional[CoefVec],
    f: Optional[ForcingTerm],
    T: float,
    steps: int,
) -> Trajectory:
    equation = Equation(equation)
    if equation is Equation.WAVE:
        if h is None:
            raise DomainError("wave evolution needs an initial velocity")
        return wave_evolve(g, h, f, T, steps)
    if equation is Equation.HEAT:
        return heat_evolve(g, f, T, steps)
    return schrodinger_evolve(g, f, T, steps)


# ------------------------------------------------------------------
# Second derivatives / generators
# ------------------------------------------------------------------


def _position_at(equation: Equation, g, h, f, t: float, steps: int) -> np.ndarray:
    if t == 0:
        return g.values
    return evolve(equation, g, h, f, t, steps).states[-1]


def wave_accel(
    g: CoefVec, h: CoefVec, f: Optional[ForcingTerm], t: float,
    steps: int = GENERATOR_STEPS,
) -> CoefVec:
    """K(t) = f(t) - L u(t) in (dom E)'."""
    if t < 0:
        raise DomainError(f"time must be >= 0, got {t}")
    lam = g.basis.eigenvalues
    c = _position_at(Equation.WAVE, g, h, f, t, steps)
    return CoefVec(forcing_at(f, [t], g.basis.count)[0] - lam * c, g.basis)


def heat_generator(
    g: CoefVec, f: Optional[ForcingTerm], t: float, steps: int = GENERATOR_STEPS
) -> CoefVec:
    """K(t) = -L u(t) + f(t)."""
    if t < 0:
        raise DomainError(f"time must be >= 0, got {t}")
    lam = g.basis.eigenvalues
    c = _position_at(Equation.HEAT, g, None, f, t, steps)
    return CoefVec(forcing_at(f, [t], g.basis.count)[0] - lam * c, g.basis)


def schrodinger_generator(
    g: CoefVec, f: Optional[ForcingTerm], t: float, steps: int = GENERATOR_STEPS
) -> CoefVec:
    """K(t) = -i L u(t) - i f(t)."""
    if t < 0:
        raise DomainError(f"time must be >= 0, got {t}")
    lam = g.basis.eigenvalues
    c = _position_at(Equation.SCHRODINGER, g, None, f, t, steps)
    return CoefVec(-1j * lam * c - 1j * forcing_at(f, [t], g.basis.count)[0], g.basis)
