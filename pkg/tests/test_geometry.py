#!/usr/bin/env python3
"""
Unit tests for chart points and manifold distances.

Covers:
- chart canonicalization (circle wrap, sphere pole, torus mod 1)
- geodesic distance on the upper hemisphere (chord and arccos forms)
- composite law-of-cosines distance and where it agrees with the geodesic
- the triangle inequality on random triples
- flat torus distance, halving map, rotations and torus maps
"""

import math
import os
import sys

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from geometry.manifolds import (  # noqa: E402
    circle_distance,
    composite_sphere_distance,
    distance,
    rotate,
    rotation_matrix,
    sphere_distance,
    sphere_distance_arccos,
    sphere_halving_map,
    sphere_pair,
    to_cartesian,
    torus_distance,
    torus_map,
)
from models import (  # noqa: E402
    SphereAngles,
    circle_point,
    sphere_point,
    torus_point,
)
from utils.errors import DomainError, OutOfChartError  # noqa: E402

HALF_PI = math.pi / 2

# ------------------------------------------------------------------
# Charts
# ------------------------------------------------------------------


def test_circle_point_wraps_into_range():
    """Angles outside [-pi, pi] are reduced modulo 2 pi."""
    p = circle_point(3 * math.pi / 2)
    assert p.coords[0] == pytest.approx(-math.pi / 2)


def test_sphere_pole_has_zero_azimuth():
    """The pole is one point whatever azimuth it was given."""
    assert sphere_point(0.0, 1.3).coords == (0.0, 0.0)


def test_sphere_point_below_equator_rejected():
    """Polar angles beyond pi/2 leave the chart."""
    with pytest.raises(OutOfChartError):
        sphere_point(HALF_PI + 0.1, 0.0)


def test_torus_point_reduced_mod_one():
    """Torus coordinates live in [0, 1)."""
    p = torus_point(1.25, -0.25)
    assert p.coords == pytest.approx((0.25, 0.75))


def test_wrong_coordinate_count_rejected():
    """A circle point carries exactly one coordinate."""
    from models import ChartPoint, Manifold

    with pytest.raises(DomainError):
        ChartPoint(Manifold.CIRCLE, (0.0, 1.0))


# ------------------------------------------------------------------
# Sphere distance
# ------------------------------------------------------------------


def test_sphere_distance_pole_to_equator():
    """Pole to equator is a quarter great circle."""
    d = sphere_distance(sphere_point(0.0, 0.0), sphere_point(HALF_PI, 0.7))
    assert d == pytest.approx(HALF_PI, abs=1e-14)


def test_sphere_distance_antipodal_equator_points():
    """Opposite points on the equator are pi apart."""
    d = sphere_distance(sphere_point(HALF_PI, 0.0), sphere_point(HALF_PI, math.pi))
    assert d == pytest.approx(math.pi, abs=1e-12)


def test_sphere_distance_is_symmetric_and_zero_on_diagonal():
    """d(p, q) = d(q, p) and d(p, p) = 0."""
    p, q = sphere_point(0.3, 0.2), sphere_point(1.1, 2.5)
    assert sphere_distance(p, q) == pytest.approx(sphere_distance(q, p), abs=1e-15)
    assert sphere_distance(p, p) == 0.0


def test_chord_and_arccos_forms_agree_away_from_small_distances():
    """Both evaluations of the geodesic distance agree on well-separated pairs."""
    rng = np.random.default_rng(3)
    for _ in range(50):
        phi1, phi2 = rng.uniform(0, HALF_PI, 2)
        th1, th2 = rng.uniform(0, 2 * math.pi, 2)
        p, q = sphere_point(phi1, th1), sphere_point(phi2, th2)
        if sphere_distance(p, q) < 1e-3:
            continue
        assert sphere_distance(p, q) == pytest.approx(
            sphere_distance_arccos(p, q), abs=1e-10
        )


def test_chord_form_keeps_precision_for_nearby_points():
    """Meridian neighbours 1e-9 apart are resolved to high relative accuracy."""
    p, q = sphere_point(0.5, 0.0), sphere_point(0.5 + 1e-9, 0.0)
    assert sphere_distance(p, q) == pytest.approx(1e-9, rel=1e-6)


def test_mixed_manifolds_rejected():
    """Distance between points of different manifolds is a DomainError."""
    with pytest.raises(DomainError):
        distance(sphere_point(0.1, 0.0), torus_point(0.1, 0.0))


# ------------------------------------------------------------------
# Composite distance
# ------------------------------------------------------------------


@pytest.mark.parametrize(
    "a,b,alpha",
    [
        (0.0, 0.7, 1.9),  # a = 0
        (0.4, 0.4, 2.2),  # a = b
        (0.2, 1.1, 0.0),  # alpha = 0
    ],
)
def test_composite_distance_agrees_on_special_families(a, b, alpha):
    """The composite form is exact when a = 0, a = b or alpha = 0."""
    p, q = sphere_pair(a, b, alpha)
    composite = composite_sphere_distance(SphereAngles(a, b, alpha))
    assert composite == pytest.approx(sphere_distance(p, q), abs=1e-12)


def test_composite_distance_differs_in_general():
    """a = pi/4, b = pi/2, alpha = pi: composite and geodesic distances differ."""
    a, b, alpha = math.pi / 4, HALF_PI, math.pi
    p, q = sphere_pair(a, b, alpha)
    composite = composite_sphere_distance(SphereAngles(a, b, alpha))
    assert abs(composite - sphere_distance(p, q)) > 1e-3


def test_sphere_angles_validate_ordering():
    """SphereAngles requires 0 <= a <= b <= pi/2."""
    with pytest.raises(DomainError):
        SphereAngles(0.8, 0.2, 0.0)
    with pytest.raises(DomainError):
        SphereAngles(0.1, 0.2, 2 * math.pi)


@pytest.mark.parametrize("manifold", ["sphere", "torus", "circle"])
def test_triangle_inequality_on_random_triples(manifold):
    """d(p, r) <= d(p, q) + d(q, r) on 300 random triples."""
    rng = np.random.default_rng(11)

    def draw():
        if manifold == "sphere":
            phi, theta = rng.uniform(0.0, HALF_PI), rng.uniform(0.0, 2 * math.pi)
            return sphere_point(phi, theta)
        if manifold == "torus":
            return torus_point(*rng.uniform(0.0, 1.0, size=2))
        return circle_point(rng.uniform(-math.pi, math.pi))

    for _ in range(300):
        p, q, r = draw(), draw(), draw()
        assert distance(p, r) <= distance(p, q) + distance(q, r) + 1e-12


# ------------------------------------------------------------------
# Torus and circle
# ------------------------------------------------------------------


def test_torus_distance_wraps_around():
    """Points near opposite edges are close on the torus."""
    d = torus_distance(torus_point(0.05, 0.5), torus_point(0.95, 0.5))
    assert d == pytest.approx(0.1, abs=1e-12)


def test_torus_distance_diagonal_wrap():
    """Both coordinates wrap independently."""
    d = torus_distance(torus_point(0.9, 0.9), torus_point(0.1, 0.1))
    assert d == pytest.approx(math.sqrt(0.08), abs=1e-12)


def test_torus_distance_bounded_by_lifted_distance():
    """The torus distance is the least Euclidean distance over integer lifts."""
    rng = np.random.default_rng(5)
    for _ in range(100):
        a, b = rng.uniform(0.0, 1.0, size=2), rng.uniform(0.0, 1.0, size=2)
        d = torus_distance(torus_point(*a), torus_point(*b))
        lifted = [
            float(np.linalg.norm(a - b - np.array([i - 3, j - 3])))
            for i, j in np.ndindex(7, 7)
        ]
        assert all(d <= value + 1e-12 for value in lifted)
        assert d == pytest.approx(min(lifted), abs=1e-12)


def test_circle_distance_wraps_around():
    """Arc-length distance takes the shorter way round."""
    d = circle_distance(circle_point(-3.0), circle_point(3.0))
    assert d == pytest.approx(2 * math.pi - 6.0, abs=1e-12)


# ------------------------------------------------------------------
# Maps
# ------------------------------------------------------------------


def test_halving_map_halves_polar_angle():
    """f(phi, theta) = (phi / 2, theta)."""
    image = sphere_halving_map(sphere_point(1.2, 0.4))
    assert image.coords == pytest.approx((0.6, 0.4))


def test_rotation_preserves_distance():
    """Rotations are isometries while images stay in the chart."""
    p, q = sphere_point(0.2, 0.3), sphere_point(0.4, 1.0)
    rp, rq = rotate(p, "y", math.pi / 4), rotate(q, "y", math.pi / 4)
    assert sphere_distance(rp, rq) == pytest.approx(sphere_distance(p, q), abs=1e-12)


def test_rotation_out_of_chart_raises():
    """A rotation that pushes a point below the equator raises OutOfChartError."""
    with pytest.raises(OutOfChartError):
        rotate(sphere_point(HALF_PI, 0.0), "y", math.pi / 4)


def test_torus_map_contracts_by_half():
    """h_m halves distances between nearby points."""
    p, q = torus_point(0.1, 0.2), torus_point(0.2, 0.25)
    d = torus_distance(torus_map(2, p), torus_map(2, q))
    assert d == pytest.approx(torus_distance(p, q) / 2, abs=1e-12)


def test_rotating_the_pole_about_y():
    """R_y(pi/4) takes the pole to (pi/4, 0)."""
    image = rotate(sphere_point(0.0, 0.0), "y", math.pi / 4)
    assert image.coords == pytest.approx((math.pi / 4, 0.0), abs=1e-12)


def test_rotated_halved_equator():
    """R_y(pi/4) of the halved equator point at theta is (cos/2 + 1/2, ...)."""
    r_y = rotation_matrix("y", math.pi / 4)
    r_x = rotation_matrix("x", -math.pi / 4)
    for theta in np.linspace(0.0, HALF_PI, 9):
        h = to_cartesian(sphere_halving_map(sphere_point(HALF_PI, theta)))
        c, s = math.cos(theta), math.sin(theta)
        assert list(r_y @ h) == pytest.approx(
            [c / 2 + 0.5, math.sqrt(2) / 2 * s, -c / 2 + 0.5], abs=1e-12
        )
        assert list(r_x @ h) == pytest.approx(
            [math.sqrt(2) / 2 * c, s / 2 + 0.5, -s / 2 + 0.5], abs=1e-12
        )


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
