"""
Nonlinearities F applied at atom nodes and projected back to coefficients.

Functions in L2(mu) are determined by their values at the atoms, so F(u) is
evaluated nodewise there. Complex states are mapped on their real and
imaginary parts separately.
"""

from typing import Optional

import numpy as np

from models import Nonlinearity, SpectralBasis
from spectral.basis import free_nodal_rows, project_rows
from utils.errors import DomainError

_SCALAR_MAPS = {
    "linear": lambda x: x,
    "sin": np.sin,
    "tanh": np.tanh,
}


def make_nonlinearity(
    kind: str, scale: float, lipschitz_bound: Optional[float] = None
) -> Nonlinearity:
    if kind not in _SCALAR_MAPS:
        raise DomainError(
            f"unknown nonlinearity {kind!r}; expected one of {sorted(_SCALAR_MAPS)}"
        )
    bound = abs(scale) if lipschitz_bound is None else lipschitz_bound
    if bound < 0:
        raise DomainError("Lipschitz bound must be nonnegative")
    return Nonlinearity(kind=kind, scale=float(scale), lipschitz_bound=float(bound))


def is_identically_zero(F: Nonlinearity) -> bool:
    return F.scale == 0.0


def apply_nodal(F: Nonlinearity, values: np.ndarray) -> np.ndarray:
    fn = _SCALAR_MAPS[F.kind]
    if np.iscomplexobj(values):
        return F.scale * (fn(values.real) + 1j * fn(values.imag))
    return F.scale * fn(values)


def nonlinear_forcing(
    basis: SpectralBasis, F: Nonlinearity, states: np.ndarray
) -> np.ndarray:
    """Coefficient rows <F(u(t_j)), phi_k>_mu for each state row."""
    if is_identically_zero(F):
        return np.zeros_like(states, dtype=complex)
    if F.kind == "linear":
        # linear F commutes with the projection
        return F.scale * states
    nodal = free_nodal_rows(basis, states)
    return project_rows(basis, apply_nodal(F, nodal))
