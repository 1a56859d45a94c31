#!/usr/bin/env python3
"""
Unit tests for measure construction and ball queries.

Covers:
- Dirac combinations and their validation
- the three-map hemisphere IFS (atom count, mass, words, region)
- exact cylinder masses of the hemisphere IFS
- the torus GIFS table (exact probability rows, containment, translations)
- probability and edge overrides of the GIFS table
- GIFS invariant measures and edge removal
- ball masses, coincident-atom merging and the minimum atom gap
- ball mass monotonicity and agreement with a brute-force scan
"""

import math
import os
import sys
from fractions import Fraction

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from analysis.dimension import radius_ladder  # noqa: E402
from analysis.graphs import gifs_graph, walk_is_covering, walk_is_valid  # noqa: E402
from geometry.manifolds import TORUS_MAP_TRANSLATIONS, to_cartesian  # noqa: E402
from measures.builders import (  # noqa: E402
    dirac_measure,
    example_sphere_ifs,
    gifs_invariant_measure,
    ifs_invariant_measure,
    ifs_region_check,
)
from measures.queries import (  # noqa: E402
    ball_mass,
    distinct_atoms,
    minimum_atom_gap,
    sup_ball_mass,
)
from measures.tables import (  # noqa: E402
    as_fraction,
    containment_violations,
    load_gifs_table,
    probability_row_violations,
    read_table,
    torus_maps,
    validate_gifs,
)
from models import (  # noqa: E402
    BallQuery,
    ChartPoint,
    GIFSEdge,
    Manifold,
    circle_point,
    sphere_point,
    torus_point,
)
from pipeline.analyze import REFERENCE_WALK  # noqa: E402
from utils.errors import DomainError, MeasureValidationError  # noqa: E402

POLE = sphere_point(0.0, 0.0)


@pytest.fixture(scope="module")
def gifs_spec():
    """Fixture: the torus GIFS with translations induced by the torus maps."""
    return load_gifs_table()


# ------------------------------------------------------------------
# Dirac measures
# ------------------------------------------------------------------


def test_dirac_measure_keeps_atoms_and_weights():
    """Atoms and weights are stored exactly as given."""
    m = dirac_measure([circle_point(0.0), circle_point(math.pi)], [1.0, 2.0])
    assert len(m) == 2
    assert m.total_mass == pytest.approx(3.0)
    assert m.provenance == "atomic"


def test_dirac_measure_rejects_nonpositive_weight():
    """Weights must be strictly positive."""
    with pytest.raises(MeasureValidationError):
        dirac_measure([circle_point(0.0)], [0.0])


def test_dirac_measure_rejects_mixed_manifolds():
    """All atoms of one measure share a manifold."""
    with pytest.raises(DomainError):
        dirac_measure([circle_point(0.0), torus_point(0.1, 0.1)], [1.0, 1.0])


def test_dirac_measure_rejects_length_mismatch():
    """One weight per atom."""
    with pytest.raises(MeasureValidationError):
        dirac_measure([circle_point(0.0)], [1.0, 1.0])


# ------------------------------------------------------------------
# Hemisphere IFS
# ------------------------------------------------------------------


@pytest.mark.parametrize("depth", [0, 1, 3, 5])
def test_ifs_atom_count_and_mass(depth):
    """Depth L carries 3^L atoms of total mass 1."""
    m = ifs_invariant_measure(example_sphere_ifs(), POLE, depth)
    assert len(m) == 3**depth
    assert m.total_mass == pytest.approx(1.0, abs=1e-12)
    assert m.words.shape == (3**depth, depth)


def test_ifs_weights_are_products_of_probabilities():
    """Each atom weighs the product of the probabilities along its word."""
    probabilities = [0.5, 0.3, 0.2]
    m = ifs_invariant_measure(example_sphere_ifs(probabilities), POLE, 3)
    for word, weight in zip(m.words, m.weights):
        expected = np.prod([probabilities[i] for i in word])
        assert weight == pytest.approx(expected, rel=1e-12)


def test_ifs_maps_keep_the_quarter_region():
    """Every map sends the quarter region into itself."""
    assert ifs_region_check(example_sphere_ifs()) == []


def test_ifs_rejects_bad_probabilities():
    """Probabilities must be positive and sum to 1."""
    with pytest.raises(MeasureValidationError):
        ifs_invariant_measure(example_sphere_ifs([0.5, 0.5, 0.5]), POLE, 2)


def test_ifs_rejects_seed_outside_region():
    """The seed must lie in the IFS region."""
    with pytest.raises(DomainError):
        ifs_invariant_measure(example_sphere_ifs(), sphere_point(1.0, math.pi), 2)


def test_ifs_cylinder_masses_are_exact():
    """Summed over its extensions, a depth-2 cylinder weighs p_a p_b exactly."""
    exact = [Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)]
    m = ifs_invariant_measure(example_sphere_ifs([float(p) for p in exact]), POLE, 4)
    cylinders = {}
    for word, weight in zip(m.words, m.weights):
        product = math.prod((exact[i] for i in word), start=Fraction(1))
        assert weight == pytest.approx(float(product), rel=1e-14)
        key = tuple(int(i) for i in word[:2])
        cylinders[key] = cylinders.get(key, Fraction(0)) + product
    assert len(cylinders) == 9
    for (a, b), total in cylinders.items():
        assert total == exact[a] * exact[b]
    assert sum(cylinders.values()) == 1


# ------------------------------------------------------------------
# GIFS table
# ------------------------------------------------------------------


def test_gifs_table_shape(gifs_spec):
    """Twelve vertices and 48 edges, all ratios 1/2."""
    assert len(gifs_spec.vertex_sets) == 12
    assert len(gifs_spec.edges) == 48
    assert all(e.ratio == Fraction(1, 2) for e in gifs_spec.edges)


def test_gifs_probability_rows_sum_to_one_exactly(gifs_spec):
    """Uniform out-edge probabilities sum to exactly 1 per vertex."""
    assert probability_row_violations(gifs_spec) == []
    for vertex in gifs_spec.vertex_sets:
        total = sum(
            gifs_spec.edge_probabilities[e.edge_id]
            for e in gifs_spec.out_edges(vertex)
        )
        assert total == Fraction(1)


def test_gifs_induced_translations_satisfy_containment(gifs_spec):
    """S_e(W_dst) lies inside W_src for every edge with induced translations."""
    assert containment_violations(gifs_spec) == []
    assert validate_gifs(gifs_spec) == []


PRINTED_CONTAINMENT_FAILURES = (
    list(range(4, 25))
    + [30, 31, 33, 36, 37]
    + list(range(39, 43))
    + list(range(44, 49))
)


def test_gifs_printed_translations_fail_containment():
    """The printed translation column breaks containment on exactly 35 edges."""
    printed = load_gifs_table(translations="printed")
    failing = [v["edge"] for v in containment_violations(printed)]
    assert len(failing) == 35
    assert failing == PRINTED_CONTAINMENT_FAILURES


def test_gifs_torus_maps_match_geometry():
    """The table's torus maps are the ones the geometry layer applies."""
    maps = torus_maps(read_table())
    for m, (tx, ty) in maps.items():
        assert (float(tx), float(ty)) == TORUS_MAP_TRANSLATIONS[m]


def test_gifs_unknown_translation_table_rejected():
    """Only induced and printed translations exist."""
    with pytest.raises(MeasureValidationError):
        load_gifs_table(translations="guessed")


def test_gifs_edge_removal_breaks_probability_row():
    """Dropping an out-edge of vertex 1 leaves its row summing to 2/3."""
    spec = load_gifs_table(remove_edges=[1])
    violations = probability_row_violations(spec)
    assert [v["vertex"] for v in violations] == [1]
    assert violations[0]["row_sum"] == "2/3"
    with pytest.raises(MeasureValidationError):
        gifs_invariant_measure(spec, 2)


def test_gifs_probability_overrides_merge_over_uniform_rows():
    """Overrides replace single entries; the other edges keep 1 / out-degree."""
    spec = load_gifs_table(
        edge_probabilities={1: Fraction(1, 2), 2: Fraction(1, 4), 3: Fraction(1, 4)}
    )
    assert spec.edge_probabilities[1] == Fraction(1, 2)
    assert spec.edge_probabilities[3] == Fraction(1, 4)
    assert spec.edge_probabilities[4] == Fraction(1, 6)
    assert probability_row_violations(spec) == []
    vertices, _ = gifs_invariant_measure(spec, 2)
    assert vertices[1].total_mass == pytest.approx(1.0, abs=1e-12)


def test_gifs_probability_for_unknown_edge_rejected():
    """Overrides must name table edges."""
    with pytest.raises(MeasureValidationError):
        load_gifs_table(edge_probabilities={99: Fraction(1, 2)})


def test_gifs_edges_replace_the_table(gifs_spec):
    """Edge overrides keep the vertex sets and get uniform rows."""
    edges = [e for e in gifs_spec.edges if e.src == 1] + [
        GIFSEdge(100, 7, 1, (Fraction(0), Fraction(0)))
    ]
    spec = load_gifs_table(edges=edges)
    assert len(spec.edges) == 4
    assert spec.vertex_sets == gifs_spec.vertex_sets
    assert spec.edge_probabilities[100] == 1
    with pytest.raises(MeasureValidationError):
        load_gifs_table(edges=[GIFSEdge(1, 1, 13, (Fraction(0), Fraction(0)))])


@pytest.mark.parametrize(
    "value, expected",
    [
        ("3/8", Fraction(3, 8)),
        ([3, 8], Fraction(3, 8)),
        (0.375, Fraction(3, 8)),
        (2, Fraction(2)),
    ],
)
def test_as_fraction(value, expected):
    """Pairs, strings, decimals and ints all give the exact rational."""
    assert as_fraction(value) == expected


def test_as_fraction_rejects_zero_denominator():
    """[1, 0] is not a rational."""
    with pytest.raises(MeasureValidationError):
        as_fraction([1, 0])


def test_reference_walk_uses_table_edges(gifs_spec):
    """The bundled closed walk follows table edges through all twelve vertices."""
    assert walk_is_valid(gifs_spec, REFERENCE_WALK)
    assert walk_is_covering(gifs_graph(gifs_spec), REFERENCE_WALK)


# ------------------------------------------------------------------
# GIFS measures
# ------------------------------------------------------------------


def test_gifs_measure_depth_zero_has_vertex_centers(gifs_spec):
    """Depth 0 places one unit atom at the center of each vertex set."""
    vertex_measures, combined = gifs_invariant_measure(gifs_spec, 0)
    assert len(vertex_measures) == 12
    assert len(combined) == 12
    assert combined.mass_before_normalization == pytest.approx(12.0)


def test_gifs_measure_depth_one_follows_out_edges(gifs_spec):
    """Depth 1 has one atom per edge and every vertex keeps mass 1."""
    vertex_measures, combined = gifs_invariant_measure(gifs_spec, 1)
    assert len(combined) == 48
    for measure in vertex_measures.values():
        assert measure.total_mass == pytest.approx(1.0, abs=1e-12)
    assert combined.total_mass == pytest.approx(1.0, abs=1e-12)


def test_gifs_vertex_atoms_stay_in_vertex_sets(gifs_spec):
    """Atoms of mu_i lie in W_i (modulo the torus identification)."""
    vertex_measures, _ = gifs_invariant_measure(gifs_spec, 3)
    for vertex, measure in vertex_measures.items():
        rect = gifs_spec.vertex_sets[vertex]
        for x, y in measure.coords:
            assert any(
                float(rect.x_lo) - 1e-12 <= x + kx <= float(rect.x_hi) + 1e-12
                for kx in (-1, 0, 1)
            )
            assert any(
                float(rect.y_lo) - 1e-12 <= y + ky <= float(rect.y_hi) + 1e-12
                for ky in (-1, 0, 1)
            )


# ------------------------------------------------------------------
# Ball queries
# ------------------------------------------------------------------


def test_ball_mass_is_strict():
    """An atom exactly at distance r is outside the open ball B(x, r)."""
    m = dirac_measure([circle_point(0.0), circle_point(1.0)], [1.0, 1.0])
    assert ball_mass(m, BallQuery(circle_point(0.0), 1.0)) == pytest.approx(1.0)
    assert ball_mass(m, BallQuery(circle_point(0.0), 1.0 + 1e-9)) == pytest.approx(2.0)


def test_ball_query_rejects_nonpositive_radius():
    """Radius must be positive."""
    with pytest.raises(DomainError):
        BallQuery(circle_point(0.0), 0.0)


def test_ball_mass_rejects_foreign_center():
    """Centers must lie on the measure's manifold."""
    m = dirac_measure([circle_point(0.0)], [1.0])
    with pytest.raises(DomainError):
        ball_mass(m, BallQuery(torus_point(0.0, 0.0), 0.5))


def test_sup_ball_mass_over_atoms():
    """The sup over atom-centred balls finds the heaviest cluster."""
    m = dirac_measure(
        [circle_point(0.0), circle_point(0.1), circle_point(2.0)], [0.2, 0.3, 0.4]
    )
    assert sup_ball_mass(m, 0.2) == pytest.approx(0.5)
    assert sup_ball_mass(m, 0.05) == pytest.approx(0.4)


def test_ball_mass_monotone_along_radius_ladder():
    """Growing the radius never loses mass."""
    m = ifs_invariant_measure(example_sphere_ifs(), POLE, 5)
    radii = sorted(radius_ladder(0.8, 0.6, 10))
    for index in (0, 17, 100, 242):
        center = ChartPoint(Manifold.UPPER_SPHERE, tuple(m.coords[index]))
        masses = [ball_mass(m, BallQuery(center, r)) for r in radii]
        assert all(b >= a for a, b in zip(masses, masses[1:]))
        assert masses[-1] <= m.total_mass + 1e-12


def test_ball_mass_matches_brute_force_scan():
    """Depth-6 hemisphere IFS: ball masses agree with an atom-by-atom arccos scan."""
    m = ifs_invariant_measure(example_sphere_ifs(), POLE, 6)
    atoms = [ChartPoint(Manifold.UPPER_SPHERE, tuple(c)) for c in m.coords]
    vectors = [to_cartesian(p) for p in atoms]
    rng = np.random.default_rng(3)
    centers = [POLE] + [atoms[i] for i in rng.choice(len(atoms), 6, replace=False)]
    for center in centers:
        x = to_cartesian(center)
        for radius in (0.05, 0.17, 0.4):
            scanned = sum(
                w
                for v, w in zip(vectors, m.weights)
                if math.acos(max(-1.0, min(1.0, float(np.dot(x, v))))) < radius
            )
            assert ball_mass(m, BallQuery(center, radius)) == pytest.approx(
                scanned, abs=1e-12
            )


def test_coincident_atoms_are_merged():
    """Atoms within 1e-12 are one location carrying the summed weight."""
    m = dirac_measure(
        [torus_point(0.5, 0.5), torus_point(0.5, 0.5), torus_point(0.1, 0.1)],
        [0.25, 0.25, 0.5],
    )
    merged = distinct_atoms(m)
    assert len(merged) == 2
    assert sorted(merged.weights) == pytest.approx([0.5, 0.5])


def test_minimum_atom_gap():
    """Smallest distance between distinct locations; inf for a single one."""
    m = dirac_measure(
        [circle_point(0.0), circle_point(0.0), circle_point(0.3), circle_point(1.0)],
        [1.0, 1.0, 1.0, 1.0],
    )
    assert minimum_atom_gap(m) == pytest.approx(0.3)
    single = dirac_measure([circle_point(0.0)], [1.0])
    assert minimum_atom_gap(single) == float("inf")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
