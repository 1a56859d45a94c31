"""
Galerkin assembly of the pencil (K, M) and its generalized eigensolve.

K is the hat-function stiffness matrix of the arc-length Dirichlet form and
M the measure mass matrix. Atoms must sit on mesh nodes, which makes M
diagonal with rank equal to the number of distinct free atom nodes.
"""

from typing import Optional

import numpy as np
import scipy.linalg

from models import DiscreteMeasure, Manifold, Mesh1D, PencilMatrices, SpectralBasis
from spectral.basis import fix_sign
from utils.errors import (
    AssemblyError,
    ConfigurationError,
    DomainError,
    SpectralDiagnosticError,
)
from utils.logging import log_event

ATOM_NODE_TOL = 1e-12
NU_CUT_FRACTION = 1e-8
ZERO_EIGENVALUE_TOL = 1e-9
CLUSTER_TOL = 1e-9
RESIDUAL_TOL = 1e-9


def stiffness_matrix(mesh: Mesh1D) -> np.ndarray:
    """Full-node stiffness: 1/h stencil per element, cyclic when periodic."""
    n = len(mesh.nodes)
    K = np.zeros((n, n))
    for element, h in enumerate(mesh.spacings):
        i = element
        j = (element + 1) % n
        K[i, i] += 1.0 / h
        K[j, j] += 1.0 / h
        K[i, j] -= 1.0 / h
        K[j, i] -= 1.0 / h
    return K


def _atom_node(mesh: Mesh1D, theta: float) -> Optional[int]:
    gap = np.abs(mesh.nodes - theta)
    if mesh.domain.periodic:
        gap = np.minimum(gap % (2 * np.pi), 2 * np.pi - gap % (2 * np.pi))
    nearest = int(np.argmin(gap))
    return nearest if gap[nearest] <= ATOM_NODE_TOL else None


def assemble(mesh: Mesh1D, measure: DiscreteMeasure) -> PencilMatrices:
    """
    Assemble (K, M) restricted to the free nodes.

    Raises:
        AssemblyError: an atom does not coincide with a mesh node
        DomainError: measure not on the circle, or atom on a Dirichlet end
    """
    if measure.manifold is not Manifold.CIRCLE:
        raise DomainError("pencil assembly needs a measure on the circle")

    n = len(mesh.nodes)
    mass_diag = np.zeros(n)
    free = mesh.free_indices
    for (theta,), weight in zip(measure.coords, measure.weights):
        node = _atom_node(mesh, float(theta))
        if node is None:
            raise AssemblyError(
                f"atom at theta={theta} is not a mesh node; rebuild the mesh with "
                "the atom locations as required nodes",
                {"theta": float(theta)},
            )
        if node not in free:
            raise DomainError(f"atom at theta={theta} lies on a Dirichlet endpoint")
        mass_diag[node] += weight

    K = stiffness_matrix(mesh)[np.ix_(free, free)]
    M = np.diag(mass_diag[free])
    rank = int(np.count_nonzero(mass_diag[free] > 0))

    log_event(
        "PENCIL_ASSEMBLED",
        {"domain": mesh.domain.kind, "free_nodes": len(free), "mass_rank": rank},
    )
    return PencilMatrices(stiffness=K, mass=M, rank=rank, mesh=mesh)


def _orthonormalize_clusters(
    eigenvalues: np.ndarray, vectors: np.ndarray, M: np.ndarray
) -> np.ndarray:
    """M-Gram-Schmidt inside each numerically multiple eigenvalue cluster."""
    vectors = vectors.copy()
    start = 0
    count = eigenvalues.shape[0]
    while start < count:
        stop = start + 1
        scale = max(1.0, abs(eigenvalues[start]))
        while (
            stop < count
            and eigenvalues[stop] - eigenvalues[start] <= CLUSTER_TOL * scale
        ):
            stop += 1
        for k in range(start, stop):
            v = vectors[:, k]
            for j in range(start, k):
                v = v - (vectors[:, j] @ M @ v) * vectors[:, j]
            vectors[:, k] = v / np.sqrt(v @ M @ v)
        start = stop
    return vectors


def solve_pencil(pencil: PencilMatrices, shift: float = 1.0) -> SpectralBasis:
    """
    Finite eigenpairs of K x = lambda M x.

    A = K + shift*M is factored as L L^T and B = L^-1 M L^-T diagonalized.
    Eigenpairs (nu, y) with nu above the cut give lambda = 1/nu - shift and
    x = L^-T y / sqrt(nu); the rest are infinite modes without mass.

    Raises:
        ConfigurationError: shift not positive or A not positive definite
        SpectralDiagnosticError: retained count differs from rank(M), or
            the pencil residual exceeds tolerance
    """
    if not shift > 0:
        raise ConfigurationError(f"shift must be positive, got {shift}")
    K, M = pencil.stiffness, pencil.mass

    try:
        L = scipy.linalg.cholesky(K + shift * M, lower=True)
    except np.linalg.LinAlgError as e:
        raise ConfigurationError(f"K + {shift} M is not positive definite: {e}")

    LinvM = scipy.linalg.solve_triangular(L, M, lower=True)
    B = scipy.linalg.solve_triangular(L, LinvM.T, lower=True)
    B = 0.5 * (B + B.T)
    nu, Y = scipy.linalg.eigh(B)

    nu_max = float(nu.max()) if nu.size else 0.0
    keep = nu > NU_CUT_FRACTION * nu_max if nu_max > 0 else np.zeros(nu.shape, bool)
    retained = int(keep.sum())
    if retained != pencil.rank:
        raise SpectralDiagnosticError(
            f"retained {retained} eigenpairs but rank(M) = {pencil.rank}",
            {"retained": retained, "rank": pencil.rank, "nu_max": nu_max},
        )

    nu_kept = nu[keep]
    X = scipy.linalg.solve_triangular(L, Y[:, keep], lower=True, trans="T")
    X = X / np.sqrt(nu_kept)
    eigenvalues = 1.0 / nu_kept - shift
    eigenvalues[np.abs(eigenvalues) < ZERO_EIGENVALUE_TOL] = 0.0

    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    X = _orthonormalize_clusters(eigenvalues, X[:, order], M)
    for k in range(X.shape[1]):
        X[:, k] = fix_sign(X[:, k])

    k_norm = float(np.abs(K).sum(axis=1).max()) if K.size else 1.0
    residual = K @ X - (M @ X) * eigenvalues
    max_residual = float(np.abs(residual).max() / k_norm) if residual.size else 0.0
    if max_residual > RESIDUAL_TOL:
        raise SpectralDiagnosticError(
            f"pencil residual {max_residual:.3e} exceeds {RESIDUAL_TOL}",
            {"max_residual": max_residual},
        )

    basis = SpectralBasis(
        eigenvalues=eigenvalues,
        vectors=X,
        pencil=pencil,
        shift=shift,
        max_residual=max_residual,
    )
    log_event(
        "PENCIL_SOLVED",
        {"eigenvalues": eigenvalues, "shift": shift, "max_residual": max_residual},
    )
    return basis
