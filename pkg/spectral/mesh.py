"""
Uniform 1-D meshes on a Dirichlet arc or the periodic circle, refined to
contain prescribed nodes (the measure atoms).
"""

import math
from typing import Iterable

import numpy as np

from models import TWO_PI, Domain1D, Mesh1D
from utils.errors import DomainError

NODE_MERGE_TOL = 1e-12


def arc_domain(theta_lo: float, theta_hi: float) -> Domain1D:
    if not theta_lo < theta_hi:
        raise DomainError(f"arc needs theta_lo < theta_hi, got {theta_lo}, {theta_hi}")
    if theta_hi - theta_lo >= TWO_PI:
        raise DomainError("arc must be shorter than the full circle")
    return Domain1D("arc", float(theta_lo), float(theta_hi))


def full_circle_domain() -> Domain1D:
    return Domain1D("full_circle", -math.pi, math.pi)


def _canonical_required(domain: Domain1D, theta: float) -> float:
    if domain.periodic:
        wrapped = (theta + math.pi) % TWO_PI - math.pi
        if wrapped >= math.pi - NODE_MERGE_TOL:
            wrapped = -math.pi
        return wrapped
    lo, hi = domain.theta_lo - NODE_MERGE_TOL, domain.theta_hi + NODE_MERGE_TOL
    if theta < lo or theta > hi:
        raise DomainError(
            f"required node {theta} outside arc [{domain.theta_lo}, {domain.theta_hi}]"
        )
    return min(max(theta, domain.theta_lo), domain.theta_hi)


def build_mesh(
    domain: Domain1D, resolution: int, required_nodes: Iterable[float] = ()
) -> Mesh1D:
    """
    Uniform mesh with `resolution` elements, refined to contain every
    required node exactly.

    Args:
        domain: arc (endpoints are nodes) or full circle (nodes in [-pi, pi))
        resolution: number of uniform elements, >= 2
        required_nodes: theta values that must be mesh nodes

    Returns:
        Mesh1D with strictly increasing nodes
    """
    if resolution < 2:
        raise DomainError(f"resolution must be >= 2, got {resolution}")

    if domain.periodic:
        nodes = list(np.linspace(-math.pi, math.pi, resolution + 1)[:-1])
    else:
        nodes = list(np.linspace(domain.theta_lo, domain.theta_hi, resolution + 1))

    for theta in required_nodes:
        theta = _canonical_required(domain, float(theta))
        gaps = np.abs(np.asarray(nodes) - theta)
        nearest = int(np.argmin(gaps))
        if gaps[nearest] <= NODE_MERGE_TOL:
            nodes[nearest] = theta
        else:
            nodes.append(theta)

    nodes = np.sort(np.asarray(nodes, dtype=float))
    mesh = Mesh1D(domain=domain, nodes=nodes)
    if np.any(mesh.spacings <= 0):
        raise DomainError("mesh nodes must be strictly increasing")
    return mesh
