#!/usr/bin/env python3
"""
Unit tests for meshing, pencil assembly and the generalized eigensolve.

Covers:
- meshes containing the atom nodes (arc and full circle)
- stiffness / measure-mass assembly and its failure modes
- eigenvalues of Dirac measures with known spectra
- a hand-built 2x2 pencil and the finite-eigenvalue count on random atom sets
- M-orthonormality, residuals, sign convention and repeated eigenvalues
- projection onto and reconstruction from the eigenbasis
"""

import math
import os
import sys

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from measures.builders import dirac_measure  # noqa: E402
from models import PencilMatrices, circle_point, torus_point  # noqa: E402
from spectral.basis import (  # noqa: E402
    fix_sign,
    project,
    reconstruct,
    shifted_basis,
    unit_coefficients,
)
from spectral.mesh import arc_domain, build_mesh, full_circle_domain  # noqa: E402
from spectral.pencil import assemble, solve_pencil, stiffness_matrix  # noqa: E402
from utils.errors import (  # noqa: E402
    AssemblyError,
    ConfigurationError,
    DomainError,
    SpectralDiagnosticError,
)

HALF_PI = math.pi / 2
TENT_EIGENVALUE = 4.0 / math.pi


def circle_basis(domain, thetas, weights=None, resolution=16, shift=1.0):
    """Helper: eigenbasis of a Dirac measure on the circle."""
    weights = weights or [1.0] * len(thetas)
    measure = dirac_measure([circle_point(t) for t in thetas], weights)
    mesh = build_mesh(domain, resolution, thetas)
    return solve_pencil(assemble(mesh, measure), shift=shift)


@pytest.fixture(scope="module")
def half_circle_basis():
    """Fixture: unit atom at 0 on the Dirichlet arc (-pi/2, pi/2)."""
    return circle_basis(arc_domain(-HALF_PI, HALF_PI), [0.0])


@pytest.fixture(scope="module")
def full_circle_basis():
    """Fixture: unit atoms at 0 and pi on the full circle."""
    return circle_basis(full_circle_domain(), [0.0, math.pi])


# ------------------------------------------------------------------
# Meshes
# ------------------------------------------------------------------


def test_arc_mesh_contains_endpoints_and_required_nodes():
    """Arc meshes include both ends and every atom."""
    mesh = build_mesh(arc_domain(-1.0, 2.0), 4, [0.3])
    assert mesh.nodes[0] == -1.0 and mesh.nodes[-1] == 2.0
    assert 0.3 in mesh.nodes
    assert list(mesh.free_indices) == list(range(1, len(mesh.nodes) - 1))


def test_full_circle_mesh_wraps_pi_to_minus_pi():
    """The atom at pi becomes the node -pi of the periodic mesh."""
    mesh = build_mesh(full_circle_domain(), 4, [math.pi])
    assert len(mesh.nodes) == 4
    assert mesh.nodes[0] == -math.pi
    assert mesh.spacings.sum() == pytest.approx(2 * math.pi)


def test_mesh_rejects_low_resolution():
    """At least two elements are required."""
    with pytest.raises(DomainError):
        build_mesh(full_circle_domain(), 1)


def test_mesh_rejects_required_node_outside_arc():
    """Required nodes must lie in the arc."""
    with pytest.raises(DomainError):
        build_mesh(arc_domain(-1.0, 1.0), 8, [1.5])


def test_arc_domain_validation():
    """Arcs need theta_lo < theta_hi and length below 2 pi."""
    with pytest.raises(DomainError):
        arc_domain(1.0, 1.0)
    with pytest.raises(DomainError):
        arc_domain(-math.pi, math.pi)


# ------------------------------------------------------------------
# Assembly
# ------------------------------------------------------------------


def test_stiffness_rows_sum_to_zero_on_periodic_mesh():
    """Constants lie in the kernel of the periodic stiffness matrix."""
    mesh = build_mesh(full_circle_domain(), 8)
    K = stiffness_matrix(mesh)
    assert np.allclose(K.sum(axis=1), 0.0)
    assert np.allclose(K, K.T)


def test_mass_matrix_rank_counts_atom_nodes():
    """M is diagonal with one positive entry per atom node."""
    measure = dirac_measure([circle_point(0.0), circle_point(0.5)], [1.0, 2.0])
    mesh = build_mesh(arc_domain(-1.0, 1.0), 8, [0.0, 0.5])
    pencil = assemble(mesh, measure)
    assert pencil.rank == 2
    assert np.count_nonzero(pencil.mass) == 2
    assert np.trace(pencil.mass) == pytest.approx(3.0)


def test_atom_off_mesh_raises_assembly_error():
    """Atoms must coincide with mesh nodes."""
    measure = dirac_measure([circle_point(0.1)], [1.0])
    mesh = build_mesh(arc_domain(-HALF_PI, HALF_PI), 16)
    with pytest.raises(AssemblyError):
        assemble(mesh, measure)


def test_atom_on_dirichlet_end_rejected():
    """An atom on a Dirichlet endpoint carries no free mass."""
    measure = dirac_measure([circle_point(-HALF_PI)], [1.0])
    mesh = build_mesh(arc_domain(-HALF_PI, HALF_PI), 16)
    with pytest.raises(DomainError):
        assemble(mesh, measure)


def test_assembly_needs_circle_measure():
    """Only circle measures assemble into a 1-D pencil."""
    measure = dirac_measure([torus_point(0.1, 0.1)], [1.0])
    with pytest.raises(DomainError):
        assemble(build_mesh(full_circle_domain(), 8), measure)


# ------------------------------------------------------------------
# Eigensolve
# ------------------------------------------------------------------


def test_half_circle_single_atom_eigenvalue(half_circle_basis):
    """Unit atom at 0 on (-pi/2, pi/2): the only finite eigenvalue is 4/pi."""
    assert half_circle_basis.count == 1
    assert half_circle_basis.eigenvalues[0] == pytest.approx(TENT_EIGENVALUE, abs=1e-12)


def test_full_circle_two_atoms_eigenvalues(full_circle_basis):
    """Atoms at 0 and pi on the full circle: eigenvalues {0, 4/pi}."""
    expected = [0.0, TENT_EIGENVALUE]
    assert full_circle_basis.eigenvalues == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("resolution", [2, 8, 64])
def test_eigenvalue_independent_of_resolution(resolution):
    """Piecewise-linear eigenfunctions are exact on any mesh containing the atoms."""
    basis = circle_basis(arc_domain(-HALF_PI, HALF_PI), [0.0], resolution=resolution)
    assert basis.eigenvalues[0] == pytest.approx(TENT_EIGENVALUE, abs=1e-10)


@pytest.mark.parametrize("shift", [0.1, 1.0, 25.0])
def test_eigenvalues_independent_of_shift(shift):
    """The shift only conditions the reduction."""
    basis = circle_basis(full_circle_domain(), [0.0, math.pi], shift=shift)
    assert basis.eigenvalues == pytest.approx([0.0, TENT_EIGENVALUE], abs=1e-9)


def test_repeated_eigenvalue_is_m_orthonormalized():
    """Four equally spaced atoms: spectrum {0, 4/pi, 4/pi, 8/pi}, X^T M X = I."""
    basis = circle_basis(full_circle_domain(), [0.0, HALF_PI, math.pi, -HALF_PI])
    expected = [0.0, TENT_EIGENVALUE, TENT_EIGENVALUE, 2 * TENT_EIGENVALUE]
    assert basis.eigenvalues == pytest.approx(expected, abs=1e-9)
    X, M = basis.vectors, basis.pencil.mass
    assert np.allclose(X.T @ M @ X, np.eye(4), atol=1e-10)


def test_pencil_residual_and_orthonormality(full_circle_basis):
    """K X = M X Lambda and X^T M X = I."""
    X = full_circle_basis.vectors
    K, M = full_circle_basis.pencil.stiffness, full_circle_basis.pencil.mass
    lam = full_circle_basis.eigenvalues
    assert np.allclose(K @ X, (M @ X) * lam, atol=1e-10)
    assert np.allclose(X.T @ M @ X, np.eye(2), atol=1e-12)
    assert full_circle_basis.max_residual <= 1e-9


def test_sign_convention(full_circle_basis):
    """The largest-magnitude entry of every eigenvector is positive."""
    for k in range(full_circle_basis.count):
        v = full_circle_basis.vectors[:, k]
        assert np.array_equal(fix_sign(v), v)


def test_fix_sign_ties_use_first_entry():
    """Among entries of equal magnitude the first decides."""
    assert list(fix_sign(np.array([-1.0, 1.0]))) == [1.0, -1.0]


def test_nonpositive_shift_rejected():
    """The shifted pencil needs shift > 0."""
    measure = dirac_measure([circle_point(0.0)], [1.0])
    mesh = build_mesh(arc_domain(-HALF_PI, HALF_PI), 8, [0.0])
    with pytest.raises(ConfigurationError):
        solve_pencil(assemble(mesh, measure), shift=0.0)


def test_rank_mismatch_raises_diagnostic():
    """A pencil whose declared rank disagrees with M is reported."""
    K = np.array([[2.0, -1.0], [-1.0, 2.0]])
    M = np.diag([1.0, 0.0])
    with pytest.raises(SpectralDiagnosticError):
        solve_pencil(PencilMatrices(stiffness=K, mass=M, rank=2))


def test_hand_built_pencil_eigenpair():
    """K = [[2, -1], [-1, 2]], M = diag(1, 0): one finite eigenvalue 3/2."""
    K = np.array([[2.0, -1.0], [-1.0, 2.0]])
    M = np.diag([1.0, 0.0])
    basis = solve_pencil(PencilMatrices(stiffness=K, mass=M, rank=1))
    assert basis.count == 1
    assert basis.eigenvalues[0] == pytest.approx(1.5, abs=1e-12)
    assert list(basis.vectors[:, 0]) == pytest.approx([1.0, 0.5], abs=1e-12)


@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
def test_finite_eigenvalue_count_equals_mass_rank(seed):
    """Random atom sets: as many finite eigenvalues as rank(M)."""
    rng = np.random.default_rng(seed)
    count = int(rng.integers(1, 7))
    thetas = sorted(rng.choice(np.linspace(-1.4, 1.4, 29), count, replace=False))
    weights = list(rng.uniform(0.5, 2.0, count))
    for domain in (arc_domain(-HALF_PI, HALF_PI), full_circle_domain()):
        basis = circle_basis(domain, thetas, weights=weights)
        assert np.linalg.matrix_rank(basis.pencil.mass) == count
        assert basis.count == count
        assert np.all(np.isfinite(basis.eigenvalues))


# ------------------------------------------------------------------
# Basis operations
# ------------------------------------------------------------------


def test_project_reconstruct_round_trip(full_circle_basis):
    """Projecting a reconstructed coefficient vector recovers it."""
    coef = unit_coefficients(full_circle_basis, 1).scaled(0.5 - 0.25j)
    nodal = reconstruct(full_circle_basis, coef)
    assert np.allclose(project(full_circle_basis, nodal).values, coef.values)


def test_reconstruct_zero_on_dirichlet_nodes(half_circle_basis):
    """Dirichlet endpoints carry zero."""
    nodal = reconstruct(half_circle_basis, unit_coefficients(half_circle_basis, 0))
    assert nodal[0] == 0 and nodal[-1] == 0


def test_shifted_basis_moves_eigenvalues_only(full_circle_basis):
    """Shifting changes eigenvalues, not eigenvectors."""
    shifted = shifted_basis(full_circle_basis, -0.1)
    assert shifted.eigenvalues == pytest.approx(full_circle_basis.eigenvalues - 0.1)
    assert shifted.vectors is full_circle_basis.vectors


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
