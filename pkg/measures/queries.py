"""
Ball-mass queries on discrete measures.

Membership is strict (distance < radius), matching open balls. Distance
matrices are built in chunks of centers so deep IFS/GIFS approximations
stay within memory.
"""

from typing import Iterable, Optional, Sequence

import numpy as np

from geometry.manifolds import pairwise_distances
from models import BallQuery, ChartPoint, DiscreteMeasure, Manifold
from utils.errors import DomainError

COINCIDENCE_TOL = 1e-12
CENTER_CHUNK = 256


def _center_array(m: DiscreteMeasure, centers: Iterable[ChartPoint]) -> np.ndarray:
    centers = list(centers)
    if not centers:
        raise DomainError("at least one center is required")
    for c in centers:
        if c.manifold is not m.manifold:
            raise DomainError(
                f"center on {c.manifold.value}, measure on {m.manifold.value}"
            )
    return np.array([c.coords for c in centers], dtype=float)


def ball_mass(m: DiscreteMeasure, q: BallQuery) -> float:
    """Total weight of atoms at distance < radius from the center."""
    centers = _center_array(m, [q.center])
    d = pairwise_distances(m.manifold, centers, m.coords)[0]
    return float(m.weights[d < q.radius].sum())


def sup_ball_mass_ladder(
    m: DiscreteMeasure,
    radii: Sequence[float],
    centers: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    max over centers of mu(B(x, r)) for every r in radii.

    centers defaults to the distinct atom locations.
    """
    radii = np.asarray(radii, dtype=float)
    if np.any(~(radii > 0)):
        raise DomainError("radii must be positive")
    if centers is None:
        centers = distinct_atoms(m).coords
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if m.manifold is Manifold.CIRCLE:
        centers = centers.reshape(-1, 1)
    if centers.shape[0] == 0:
        raise DomainError("at least one center is required")

    best = np.zeros(radii.shape[0])
    for start in range(0, centers.shape[0], CENTER_CHUNK):
        block = centers[start : start + CENTER_CHUNK]
        d = pairwise_distances(m.manifold, block, m.coords)
        for k, r in enumerate(radii):
            masses = (d < r) @ m.weights
            best[k] = max(best[k], float(masses.max()))
    return best


def sup_ball_mass(
    m: DiscreteMeasure, radius: float, centers: Optional[Iterable[ChartPoint]] = None
) -> float:
    """sup of ball_mass over candidate centers (default: atom locations)."""
    array = None if centers is None else _center_array(m, centers)
    return float(sup_ball_mass_ladder(m, [radius], array)[0])


def _representatives(m: DiscreteMeasure, tol: float) -> np.ndarray:
    n = len(m)
    reps = np.arange(n)
    for start in range(0, n, CENTER_CHUNK):
        block = m.coords[start : start + CENTER_CHUNK]
        d = pairwise_distances(m.manifold, block, m.coords)
        # first atom within tol of each row (the row itself at worst)
        reps[start : start + block.shape[0]] = np.argmax(d <= tol, axis=1)
    return reps


def distinct_atoms(m: DiscreteMeasure, tol: float = COINCIDENCE_TOL) -> DiscreteMeasure:
    """Merge atoms closer than tol, summing their weights."""
    reps = _representatives(m, tol)
    keep, inverse = np.unique(reps, return_inverse=True)
    weights = np.zeros(keep.shape[0])
    np.add.at(weights, inverse, m.weights)
    return DiscreteMeasure(
        manifold=m.manifold,
        coords=m.coords[keep],
        weights=weights,
        provenance=m.provenance,
        depth=m.depth,
        mass_before_normalization=m.mass_before_normalization,
    )


def minimum_atom_gap(m: DiscreteMeasure, tol: float = COINCIDENCE_TOL) -> float:
    """Smallest distance between distinct atoms; inf for a single location."""
    merged = distinct_atoms(m, tol)
    n = len(merged)
    if n < 2:
        return float("inf")
    gap = float("inf")
    for start in range(0, n, CENTER_CHUNK):
        block = merged.coords[start : start + CENTER_CHUNK]
        d = pairwise_distances(merged.manifold, block, merged.coords)
        rows = np.arange(block.shape[0])
        d[rows, start + rows] = np.inf
        gap = min(gap, float(d.min()))
    return gap
