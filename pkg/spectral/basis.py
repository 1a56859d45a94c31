"""
Moving between nodal values and eigen-coefficients.
"""

import numpy as np

from models import CoefVec, SpectralBasis
from utils.errors import DomainError

SIGN_TIE_TOL = 1e-9


def fix_sign(vector: np.ndarray) -> np.ndarray:
    """
    Scale by +-1 so the entry of largest magnitude is positive.

    Entries within SIGN_TIE_TOL (relative) of the maximum count as ties and
    the first of them decides.
    """
    vector = np.asarray(vector, dtype=float)
    magnitude = np.abs(vector)
    peak = magnitude.max() if magnitude.size else 0.0
    if peak == 0.0:
        return vector
    first = int(np.flatnonzero(magnitude >= peak * (1.0 - SIGN_TIE_TOL))[0])
    return -vector if vector[first] < 0 else vector


def free_values(basis: SpectralBasis, nodal_values: np.ndarray) -> np.ndarray:
    """Restrict full-mesh nodal values to the free nodes (pass-through otherwise)."""
    nodal_values = np.asarray(nodal_values).reshape(-1)
    mesh = basis.mesh
    if mesh is not None and nodal_values.shape[0] == len(mesh.nodes):
        return nodal_values[mesh.free_indices]
    if nodal_values.shape[0] == basis.pencil.dimension:
        return nodal_values
    raise DomainError(
        f"nodal vector of length {nodal_values.shape[0]} matches neither the mesh "
        f"nor the {basis.pencil.dimension} free nodes"
    )


def project(basis: SpectralBasis, nodal_values: np.ndarray) -> CoefVec:
    """a_k = x_k^T M g."""
    g = free_values(basis, nodal_values)
    return CoefVec(basis.vectors.T @ (basis.pencil.mass @ g), basis)


def project_rows(basis: SpectralBasis, rows: np.ndarray) -> np.ndarray:
    """project() applied to each row of a (times, free nodes) array."""
    return (rows @ basis.pencil.mass) @ basis.vectors


def free_nodal_rows(basis: SpectralBasis, coefficients: np.ndarray) -> np.ndarray:
    """Free-node values of each coefficient row (times, count)."""
    return np.atleast_2d(coefficients) @ basis.vectors.T


def reconstruct(basis: SpectralBasis, coef: CoefVec) -> np.ndarray:
    """Nodal values on every mesh node; Dirichlet nodes carry 0."""
    interior = basis.vectors @ coef.values
    mesh = basis.mesh
    if mesh is None:
        return interior
    values = np.zeros(len(mesh.nodes), dtype=complex)
    values[mesh.free_indices] = interior
    return values


def shifted_basis(basis: SpectralBasis, delta: float) -> SpectralBasis:
    """Same eigenvectors with every eigenvalue moved by delta."""
    return SpectralBasis(
        eigenvalues=basis.eigenvalues + delta,
        vectors=basis.vectors,
        pencil=basis.pencil,
        shift=basis.shift,
        max_residual=basis.max_residual,
    )


def unit_coefficients(basis: SpectralBasis, index: int) -> CoefVec:
    values = np.zeros(basis.count, dtype=complex)
    values[index] = 1.0
    return CoefVec(values, basis)
