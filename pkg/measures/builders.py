"""
Measure builders: Dirac combinations, IFS and GIFS invariant measures.

IFS and GIFS measures are approximated by deterministic word expansion:
depth L carries one atom per word of length L (per path of length L for the
graph-directed case) with the product of the probabilities as weight.
"""

import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from geometry.manifolds import halve_polar_angles, rotate_coords
from measures.tables import containment_lift, validate_gifs
from models import (
    ChartPoint,
    ContractionMap,
    DiscreteMeasure,
    GIFSSpec,
    IFSSpec,
    Manifold,
)
from utils.errors import DomainError, MeasureValidationError
from utils.logging import log_event

PROBABILITY_TOL = 1e-12
MASS_TOL = 1e-12
REGION_TOL = 1e-9


def dirac_measure(
    points: Sequence[ChartPoint], weights: Sequence[float]
) -> DiscreteMeasure:
    """Finite combination of point masses, atoms exactly as given."""
    points = list(points)
    weights = np.asarray(list(weights), dtype=float)
    if not points:
        raise MeasureValidationError("dirac measure needs at least one atom")
    if len(points) != weights.shape[0]:
        raise MeasureValidationError(
            f"{len(points)} points but {weights.shape[0]} weights"
        )
    if np.any(~(weights > 0)):
        raise MeasureValidationError("dirac weights must be positive")
    manifold = points[0].manifold
    if any(p.manifold is not manifold for p in points):
        raise DomainError("all atoms must lie on the same manifold")

    return DiscreteMeasure(
        manifold=manifold,
        coords=np.array([p.coords for p in points], dtype=float),
        weights=weights,
        provenance="atomic",
    )


# ------------------------------------------------------------------
# IFS on the upper hemisphere
# ------------------------------------------------------------------


def sphere_ifs(
    maps: Optional[Sequence[ContractionMap]] = None,
    probabilities: Optional[Sequence[float]] = None,
) -> IFSSpec:
    """IFS on the quarter region; maps default to the three-map system below."""
    maps = list(maps) if maps is not None else [
        ContractionMap(),
        ContractionMap("y", math.pi / 4),
        ContractionMap("x", -math.pi / 4),
    ]
    if probabilities is None:
        probabilities = [1.0 / len(maps)] * len(maps)
    return IFSSpec(maps=maps, probabilities=list(probabilities), region="quarter")


def example_sphere_ifs(probabilities: Optional[Sequence[float]] = None) -> IFSSpec:
    """
    Three-map IFS on the quarter region theta in [0, pi/2].

    f1 = halving map, f2 = R_y(pi/4) o f1, f3 = R_x(-pi/4) o f1.
    """
    return sphere_ifs(None, probabilities)


def validate_ifs_spec(spec: IFSSpec) -> None:
    if not spec.maps:
        raise MeasureValidationError("IFS needs at least one map")
    p = np.asarray(spec.probabilities, dtype=float)
    if p.shape[0] != len(spec.maps):
        raise MeasureValidationError(
            f"{len(spec.maps)} maps but {p.shape[0]} probabilities"
        )
    if np.any(~(p > 0)) or abs(p.sum() - 1.0) > PROBABILITY_TOL:
        raise MeasureValidationError(
            "IFS probabilities must be positive and sum to 1",
            {"probabilities": p.tolist()},
        )


def apply_contraction(coords: np.ndarray, cmap: ContractionMap) -> np.ndarray:
    """Halving map, then the optional rotation."""
    image = halve_polar_angles(coords)
    if cmap.rotation_axis is None:
        return image
    return rotate_coords(image, cmap.rotation_axis, cmap.rotation_angle)


def in_region(coords: np.ndarray, region: Optional[str]) -> np.ndarray:
    """Mask of atoms inside the IFS region (azimuth window for "quarter")."""
    coords = np.atleast_2d(coords)
    if region is None:
        return np.ones(coords.shape[0], dtype=bool)
    theta = coords[:, 1]
    return (
        (theta <= math.pi / 2 + REGION_TOL) | (theta >= 2 * math.pi - REGION_TOL)
    ) & (coords[:, 0] <= math.pi / 2 + REGION_TOL)


def ifs_region_check(spec: IFSSpec, samples: int = 17) -> List[dict]:
    """Images f_i(D) of a sample grid of D that fall outside D."""
    phis = np.linspace(0.0, math.pi / 2, samples)
    thetas = np.linspace(0.0, math.pi / 2, samples)
    grid = np.array([(phi, th) for phi in phis for th in thetas])
    violations = []
    for index, cmap in enumerate(spec.maps, start=1):
        image = apply_contraction(grid, cmap)
        outside = ~in_region(image, spec.region)
        if np.any(outside):
            violations.append({"map": index, "outside": int(outside.sum())})
    return violations


def ifs_invariant_measure(
    spec: IFSSpec, seed: ChartPoint, depth: int
) -> DiscreteMeasure:
    """
    Depth-L approximation: atoms f_tau(seed) for all words |tau| = L.

    Words are recorded outermost map first, so prefixes of length k
    identify the cylinder cells f_tau(D) of depth k.
    """
    validate_ifs_spec(spec)
    if depth < 0:
        raise DomainError(f"depth must be >= 0, got {depth}")
    if seed.manifold is not Manifold.UPPER_SPHERE:
        raise DomainError("IFS seed must lie on the upper hemisphere")
    if not in_region(np.array([seed.coords]), spec.region)[0]:
        raise DomainError(f"seed {seed.coords} outside the IFS region")

    coords = np.array([seed.coords], dtype=float)
    weights = np.ones(1)
    words = np.zeros((1, 0), dtype=int)
    probabilities = np.asarray(spec.probabilities, dtype=float)

    for _ in range(depth):
        blocks, block_weights, block_words = [], [], []
        for index, cmap in enumerate(spec.maps):
            blocks.append(apply_contraction(coords, cmap))
            block_weights.append(weights * probabilities[index])
            block_words.append(
                np.column_stack((np.full(len(weights), index, dtype=int), words))
            )
        coords = np.vstack(blocks)
        weights = np.concatenate(block_weights)
        words = np.vstack(block_words)

    outside = ~in_region(coords, spec.region)
    if np.any(outside):
        raise MeasureValidationError(
            f"{int(outside.sum())} atoms left the IFS region",
            {"outside": int(outside.sum())},
        )

    measure = DiscreteMeasure(
        manifold=Manifold.UPPER_SPHERE,
        coords=coords,
        weights=weights,
        provenance="ifs",
        depth=depth,
        words=words,
    )
    log_event(
        "MEASURE_BUILT",
        {"provenance": "ifs", "depth": depth, "atoms": len(measure)},
    )
    return measure


# ------------------------------------------------------------------
# GIFS on the torus
# ------------------------------------------------------------------


def gifs_invariant_measure(
    spec: GIFSSpec, depth: int
) -> Tuple[Dict[int, DiscreteMeasure], DiscreteMeasure]:
    """
    Per-vertex measures mu_i and the normalised union.

    Atoms are kept in lifted coordinates inside their vertex rectangle while
    recursing and reduced mod 1 on output.

    Returns:
        (vertex measures keyed by vertex id, combined probability measure)
    """
    violations = validate_gifs(spec)
    if violations:
        raise MeasureValidationError(
            f"GIFS spec invalid: {len(violations)} violation(s)",
            {"violations": violations},
        )
    if depth < 0:
        raise DomainError(f"depth must be >= 0, got {depth}")

    lifts = {e.edge_id: containment_lift(spec, e) for e in spec.edges}
    vertices = sorted(spec.vertex_sets)

    coords: Dict[int, np.ndarray] = {}
    weights: Dict[int, np.ndarray] = {}
    for i in vertices:
        cx, cy = spec.vertex_sets[i].center()
        coords[i] = np.array([[float(cx), float(cy)]])
        weights[i] = np.ones(1)

    for level in range(1, depth + 1):
        next_coords, next_weights = {}, {}
        for i in vertices:
            blocks, block_weights = [], []
            for e in spec.out_edges(i):
                kx, ky = lifts[e.edge_id]
                shift = np.array(
                    [float(e.translation[0]) + kx, float(e.translation[1]) + ky]
                )
                blocks.append(coords[e.dst] * float(e.ratio) + shift)
                block_weights.append(
                    weights[e.dst] * float(spec.edge_probabilities[e.edge_id])
                )
            next_coords[i] = np.vstack(blocks)
            next_weights[i] = np.concatenate(block_weights)
            mass = float(next_weights[i].sum())
            if abs(mass - 1.0) > MASS_TOL:
                raise MeasureValidationError(
                    f"vertex {i} lost mass at level {level}: {mass}",
                    {"vertex": i, "level": level, "mass": mass},
                )
        coords, weights = next_coords, next_weights
        log_event(
            "GIFS_LEVEL",
            {"level": level, "atoms": int(sum(len(w) for w in weights.values()))},
        )

    vertex_measures = {
        i: DiscreteMeasure(
            manifold=Manifold.TORUS,
            coords=np.mod(coords[i], 1.0),
            weights=weights[i],
            provenance="gifs",
            depth=depth,
        )
        for i in vertices
    }
    raw_mass = float(sum(weights[i].sum() for i in vertices))
    combined = DiscreteMeasure(
        manifold=Manifold.TORUS,
        coords=np.vstack([vertex_measures[i].coords for i in vertices]),
        weights=np.concatenate([weights[i] for i in vertices]) / raw_mass,
        provenance="gifs",
        depth=depth,
        mass_before_normalization=raw_mass,
    )
    log_event(
        "MEASURE_BUILT",
        {
            "provenance": "gifs",
            "depth": depth,
            "atoms": len(combined),
            "mass_before_normalization": raw_mass,
        },
    )
    return vertex_measures, combined
