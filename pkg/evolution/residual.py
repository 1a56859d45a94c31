"""
Weak-form residual of a trajectory tested against one eigenfunction.

With v = phi_k the weak formulations reduce to scalar ODEs for c_k(t):

    wave         c'' + l c = gamma
    heat         c'  + l c = beta
    schrodinger  i c' - l c = beta

Time derivatives are replaced by centred differences on the uniform grid.
"""

from typing import Optional

import numpy as np

from evolution.forcing import forcing_at
from models import Equation, ForcingTerm, Trajectory
from utils.errors import DomainError

UNIFORM_GRID_TOL = 1e-9


def weak_residual(
    traj: Trajectory,
    equation: Equation,
    f: Optional[ForcingTerm],
    k: int,
) -> float:
    """Max over interior grid times of the residual for test function phi_k."""
    equation = Equation(equation)
    times = traj.times
    if len(times) < 4:
        raise DomainError("weak residual needs at least 3 time steps")
    dt = times[1] - times[0]
    if np.max(np.abs(np.diff(times) - dt)) > UNIFORM_GRID_TOL * max(dt, 1.0):
        raise DomainError("weak residual needs a uniform time grid")
    if not 0 <= k < traj.basis.count:
        raise DomainError(f"test index {k} outside basis of size {traj.basis.count}")

    lam = traj.basis.eigenvalues[k]
    c = traj.states[:, k]
    forcing = forcing_at(f, times[1:-1], traj.basis.count)[:, k]

    if equation is Equation.WAVE:
        residual = (c[2:] - 2 * c[1:-1] + c[:-2]) / dt**2 + lam * c[1:-1] - forcing
    elif equation is Equation.HEAT:
        residual = (c[2:] - c[:-2]) / (2 * dt) + lam * c[1:-1] - forcing
    else:
        residual = 1j * (c[2:] - c[:-2]) / (2 * dt) - lam * c[1:-1] - forcing
    return float(np.max(np.abs(residual)))
