"""
Distances, charts and maps on the three model manifolds.

Scalar operations take ChartPoints; the array variants take (n, d) chart
coordinate arrays and are what the measure builders and ball queries use.
Both go through the same formulas so they agree bit for bit.
"""

import math
from typing import Tuple

import numpy as np

from models import CHART_TOL, TWO_PI, ChartPoint, Manifold, SphereAngles
from utils.errors import DomainError, OutOfChartError

HALF_PI = math.pi / 2

# Overlapping torus IFS h_m(x) = x/2 + t_m mod 1
TORUS_MAP_TRANSLATIONS = {
    1: (0.0, 0.25),
    2: (0.25, 0.25),
    3: (0.5, 0.25),
    4: (0.25, 0.75),
}

_TORUS_SHIFTS = (-1.0, 0.0, 1.0)


def _require(manifold: Manifold, *points: ChartPoint) -> None:
    for p in points:
        if p.manifold is not manifold:
            raise DomainError(
                f"expected points on {manifold.value}, got {p.manifold.value}"
            )


# ------------------------------------------------------------------
# Array kernels
# ------------------------------------------------------------------


def sphere_to_cartesian(coords: np.ndarray) -> np.ndarray:
    """(n, 2) polar/azimuth angles -> (n, 3) unit vectors."""
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    phi, theta = coords[:, 0], coords[:, 1]
    sin_phi = np.sin(phi)
    return np.column_stack(
        (sin_phi * np.cos(theta), sin_phi * np.sin(theta), np.cos(phi))
    )


def cartesian_to_sphere(vectors: np.ndarray) -> np.ndarray:
    """(n, 3) vectors -> (n, 2) chart angles; raises when any z < 0."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    unit = vectors / norms
    z = unit[:, 2]
    if np.any(z < -CHART_TOL):
        worst = float(z.min())
        raise OutOfChartError(
            f"image leaves the upper hemisphere (z = {worst:.3e})", {"z": worst}
        )
    z = np.clip(z, 0.0, 1.0)
    phi = np.arccos(z)
    theta = np.mod(np.arctan2(unit[:, 1], unit[:, 0]), TWO_PI)
    theta = np.where(theta >= TWO_PI, 0.0, theta)
    theta = np.where(phi == 0.0, 0.0, theta)
    return np.column_stack((phi, theta))


def sphere_distance_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Geodesic distances between rows of a and rows of b.

    Evaluated through the chord length, 2 arcsin(|p - q| / 2), which is the
    same quantity as the arccos law-of-cosines form but keeps full precision
    for nearby points.
    """
    va = sphere_to_cartesian(a)
    vb = sphere_to_cartesian(b)
    diff = va[:, None, :] - vb[None, :, :]
    chord = np.sqrt(np.sum(diff * diff, axis=-1))
    return 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))


def sphere_distance_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Geodesic distance between a[i] and b[i] for every row i."""
    diff = sphere_to_cartesian(a) - sphere_to_cartesian(b)
    chord = np.sqrt(np.sum(diff * diff, axis=-1))
    return 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))


def torus_distance_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Flat-torus distances: min over shifts k in {-1, 0, 1}^2.

    The squared distance separates by coordinate, so the minimum over the
    nine shifts is taken one coordinate at a time.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    total = np.zeros((a.shape[0], b.shape[0]))
    for axis in range(2):
        diff = a[:, None, axis] - b[None, :, axis]
        best = np.min(
            np.stack([np.abs(diff + k) for k in _TORUS_SHIFTS]), axis=0
        )
        total += best * best
    return np.sqrt(total)


def circle_distance_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    gap = np.mod(np.abs(a[:, None] - b[None, :]), TWO_PI)
    return np.minimum(gap, TWO_PI - gap)


def pairwise_distances(manifold: Manifold, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance matrix between two coordinate arrays on one manifold."""
    manifold = Manifold(manifold)
    if manifold is Manifold.UPPER_SPHERE:
        return sphere_distance_matrix(a, b)
    if manifold is Manifold.TORUS:
        return torus_distance_matrix(a, b)
    return circle_distance_matrix(a, b)


def halve_polar_angles(coords: np.ndarray) -> np.ndarray:
    out = np.array(coords, dtype=float, copy=True).reshape(-1, 2)
    out[:, 0] *= 0.5
    out[:, 1] = np.where(out[:, 0] == 0.0, 0.0, out[:, 1])
    return out


def rotation_matrix(axis: str, angle: float) -> np.ndarray:
    """R_x / R_y acting on column vectors of R^3."""
    c, s = math.cos(angle), math.sin(angle)
    axis = axis.lower()
    if axis == "x":
        return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    if axis == "y":
        return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
    raise DomainError(f"unknown rotation axis {axis!r}")


def rotate_coords(coords: np.ndarray, axis: str, angle: float) -> np.ndarray:
    vectors = sphere_to_cartesian(coords) @ rotation_matrix(axis, angle).T
    return cartesian_to_sphere(vectors)


# ------------------------------------------------------------------
# Point operations
# ------------------------------------------------------------------


def sphere_distance(p: ChartPoint, q: ChartPoint) -> float:
    """Geodesic distance on the upper hemisphere, in [0, pi]."""
    _require(Manifold.UPPER_SPHERE, p, q)
    if p.coords == q.coords:
        return 0.0
    return float(sphere_distance_matrix([p.coords], [q.coords])[0, 0])


def sphere_distance_arccos(p: ChartPoint, q: ChartPoint) -> float:
    """arccos(sin a sin b + cos a cos b cos alpha) with the argument clamped."""
    _require(Manifold.UPPER_SPHERE, p, q)
    a = HALF_PI - p.coords[0]
    b = HALF_PI - q.coords[0]
    alpha = p.coords[1] - q.coords[1]
    cosine = math.sin(a) * math.sin(b) + math.cos(a) * math.cos(b) * math.cos(alpha)
    return math.acos(min(1.0, max(-1.0, cosine)))


def composite_sphere_distance(angles: SphereAngles) -> float:
    """
    arccos((sin^2 a + cos^2 a cos alpha) cos(b - a)).

    Coincides with the geodesic distance when a = 0, a = b or alpha = 0 and
    differs from it elsewhere.
    """
    a, b, alpha = angles.a, angles.b, angles.alpha
    cosine = (math.sin(a) ** 2 + math.cos(a) ** 2 * math.cos(alpha)) * math.cos(b - a)
    return math.acos(min(1.0, max(-1.0, cosine)))


def torus_distance(p: ChartPoint, q: ChartPoint) -> float:
    _require(Manifold.TORUS, p, q)
    return float(torus_distance_matrix([p.coords], [q.coords])[0, 0])


def circle_distance(p: ChartPoint, q: ChartPoint) -> float:
    _require(Manifold.CIRCLE, p, q)
    return float(circle_distance_matrix([p.coords[0]], [q.coords[0]])[0, 0])


def distance(p: ChartPoint, q: ChartPoint) -> float:
    """Dispatch on the manifold of p."""
    if p.manifold is Manifold.UPPER_SPHERE:
        return sphere_distance(p, q)
    if p.manifold is Manifold.TORUS:
        return torus_distance(p, q)
    return circle_distance(p, q)


def sphere_halving_map(p: ChartPoint) -> ChartPoint:
    """(phi, theta) -> (phi / 2, theta)."""
    _require(Manifold.UPPER_SPHERE, p)
    return ChartPoint(Manifold.UPPER_SPHERE, (p.coords[0] / 2.0, p.coords[1]))


def to_cartesian(p: ChartPoint) -> np.ndarray:
    _require(Manifold.UPPER_SPHERE, p)
    return sphere_to_cartesian([p.coords])[0]


def from_cartesian(vector: np.ndarray) -> ChartPoint:
    phi, theta = cartesian_to_sphere([vector])[0]
    return ChartPoint(Manifold.UPPER_SPHERE, (float(phi), float(theta)))


def rotate(p: ChartPoint, axis: str, angle: float) -> ChartPoint:
    """Rotate about the X or Y axis; the image must stay in z >= 0."""
    _require(Manifold.UPPER_SPHERE, p)
    return from_cartesian(rotation_matrix(axis, angle) @ to_cartesian(p))


def torus_map(m: int, p: ChartPoint) -> ChartPoint:
    """h_m(x) = x / 2 + t_m reduced mod 1."""
    _require(Manifold.TORUS, p)
    tx, ty = TORUS_MAP_TRANSLATIONS[m]
    return ChartPoint(Manifold.TORUS, (p.coords[0] / 2 + tx, p.coords[1] / 2 + ty))


def sphere_pair(a: float, b: float, alpha: float) -> Tuple[ChartPoint, ChartPoint]:
    """Points with latitudes a, b (from the equator) and azimuth gap alpha."""
    return (
        ChartPoint(Manifold.UPPER_SPHERE, (HALF_PI - a, 0.0)),
        ChartPoint(Manifold.UPPER_SPHERE, (HALF_PI - b, alpha)),
    )
