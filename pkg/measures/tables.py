"""
GIFS table loading and validation.

Provides:
- Loader for the versioned torus GIFS data file (rational entries)
- Uniform per-vertex edge probabilities
- Derivation of edge translations from the overlapping torus IFS {h_m}
- Probability-row and image-containment checks
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from models import GIFSEdge, GIFSSpec, Rectangle
from utils.errors import MeasureValidationError
from utils.logging import log_event

DEFAULT_TABLE_PATH = (
    Path(__file__).resolve().parent.parent / "data" / "gifs" / "torus_gifs_v1.json"
)

CONTAINMENT_TOL = 1e-12
_LIFTS = [(kx, ky) for kx in (0, -1, 1) for ky in (0, -1, 1)]


def _fraction(pair) -> Fraction:
    return Fraction(int(pair[0]), int(pair[1]))


RationalLike = Union[int, float, str, Sequence[int]]


def as_fraction(value: RationalLike) -> Fraction:
    """
    Exact rational from a [numerator, denominator] pair, an int, a decimal
    or a "p/q" string. Floats go through their repr, so 0.25 is 1/4.
    """
    if isinstance(value, (list, tuple)):
        if len(value) != 2 or int(value[1]) == 0:
            raise MeasureValidationError(f"not a rational pair: {value!r}")
        return _fraction(value)
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as e:
        raise MeasureValidationError(f"not a rational: {value!r}") from e


def read_table(path: Path = DEFAULT_TABLE_PATH) -> dict:
    with open(path) as f:
        return json.load(f)


def torus_maps(table: dict) -> Dict[int, Tuple[Fraction, Fraction]]:
    """Translations t_m of h_m(x) = x/2 + t_m."""
    return {
        int(m): (_fraction(t[0]), _fraction(t[1]))
        for m, t in table["torus_maps"].items()
    }


def uniform_edge_probabilities(edges: Iterable[GIFSEdge]) -> Dict[int, Fraction]:
    """p_e = 1 / out-degree(src(e))."""
    edges = list(edges)
    degree: Dict[int, int] = {}
    for e in edges:
        degree[e.src] = degree.get(e.src, 0) + 1
    return {e.edge_id: Fraction(1, degree[e.src]) for e in edges}


def load_gifs_table(
    path: Path = DEFAULT_TABLE_PATH,
    translations: str = "induced",
    edge_probabilities: Optional[Dict[int, Fraction]] = None,
    remove_edges: Iterable[int] = (),
    edges: Optional[Sequence[GIFSEdge]] = None,
) -> GIFSSpec:
    """
    Build a GIFSSpec from the data file.

    Args:
        translations: "induced" (default, derived from {h_m}) or "printed"
        edge_probabilities: per-edge overrides on top of the uniform
            per-out-edge default
        remove_edges: edge ids dropped after probabilities are assigned
        edges: replaces the table edges (vertex sets stay those of the table)

    Returns:
        GIFSSpec (not validated; see validate_gifs)
    """
    if translations not in ("induced", "printed"):
        raise MeasureValidationError(f"unknown translation table {translations!r}")

    table = read_table(path)
    ratio = _fraction(table["ratio"])
    key = "translation" if translations == "induced" else "printed_translation"

    vertex_sets = {
        int(i): Rectangle(*(_fraction(v) for v in bounds))
        for i, bounds in table["vertex_sets"].items()
    }
    table_edges = [
        GIFSEdge(
            edge_id=int(row["id"]),
            src=int(row["src"]),
            dst=int(row["dst"]),
            translation=(_fraction(row[key][0]), _fraction(row[key][1])),
            ratio=ratio,
            map_index=int(row["map"]),
        )
        for row in table["edges"]
    ]
    edges = list(edges) if edges is not None else table_edges
    unknown_vertices = sorted(
        {v for e in edges for v in (e.src, e.dst)} - set(vertex_sets)
    )
    if unknown_vertices:
        raise MeasureValidationError(
            f"edges reference unknown vertices {unknown_vertices}",
            {"vertices": unknown_vertices},
        )

    probabilities = uniform_edge_probabilities(edges)
    overrides = {int(k): Fraction(v) for k, v in (edge_probabilities or {}).items()}
    unknown = sorted(set(overrides) - set(probabilities))
    if unknown:
        raise MeasureValidationError(
            f"probabilities given for unknown edges {unknown}", {"edges": unknown}
        )
    probabilities.update(overrides)
    removed = set(int(e) for e in remove_edges)
    if removed:
        edges = [e for e in edges if e.edge_id not in removed]
        probabilities = {k: v for k, v in probabilities.items() if k not in removed}

    spec = GIFSSpec(
        vertex_sets=vertex_sets,
        edges=edges,
        edge_probabilities=probabilities,
        version=f"{table['version']}:{translations}",
    )
    log_event(
        "GIFS_TABLE_LOADED",
        {"version": spec.version, "vertices": len(vertex_sets), "edges": len(edges)},
    )
    return spec


def image_rectangle(edge: GIFSEdge, rect: Rectangle) -> Rectangle:
    tx, ty = edge.translation
    return Rectangle(
        rect.x_lo * edge.ratio + tx,
        rect.x_hi * edge.ratio + tx,
        rect.y_lo * edge.ratio + ty,
        rect.y_hi * edge.ratio + ty,
    )


def containment_lift(spec: GIFSSpec, edge: GIFSEdge) -> Optional[Tuple[int, int]]:
    """
    Integer shift k with S_e(W_dst) + k inside W_src, corner by corner.

    Returns None when no shift in {-1, 0, 1}^2 works.
    """
    image = image_rectangle(edge, spec.vertex_sets[edge.dst])
    target = spec.vertex_sets[edge.src]
    for kx, ky in _LIFTS:
        inside = all(
            float(target.x_lo) - CONTAINMENT_TOL <= float(x) + kx
            <= float(target.x_hi) + CONTAINMENT_TOL
            and float(target.y_lo) - CONTAINMENT_TOL <= float(y) + ky
            <= float(target.y_hi) + CONTAINMENT_TOL
            for x, y in image.corners()
        )
        if inside:
            return (kx, ky)
    return None


def containment_violations(spec: GIFSSpec) -> List[dict]:
    return [
        {"check": "containment", "edge": e.edge_id, "src": e.src, "dst": e.dst}
        for e in spec.edges
        if containment_lift(spec, e) is None
    ]


def probability_row_violations(spec: GIFSSpec) -> List[dict]:
    """Rows sum_{e out of i} p_e = 1, checked in exact rationals."""
    violations = []
    for vertex in sorted(spec.vertex_sets):
        out = spec.out_edges(vertex)
        total = sum((Fraction(spec.edge_probabilities.get(e.edge_id, 0)) for e in out),
                    Fraction(0))
        nonpositive = [
            e.edge_id for e in out if not spec.edge_probabilities.get(e.edge_id, 0) > 0
        ]
        if total != 1 or nonpositive:
            violations.append(
                {
                    "check": "probability_row",
                    "vertex": vertex,
                    "row_sum": str(total),
                    "nonpositive_edges": nonpositive,
                }
            )
    return violations


def validate_gifs(spec: GIFSSpec) -> List[dict]:
    """All violations of the probability rows and the image containment."""
    return probability_row_violations(spec) + containment_violations(spec)


def induced_gifs_translations(
    vertex_sets: Dict[int, Rectangle],
    edges: Iterable[Tuple[int, int, int]],
    maps: Dict[int, Tuple[Fraction, Fraction]],
    ratio: Fraction = Fraction(1, 2),
) -> Dict[int, Tuple[int, Tuple[Fraction, Fraction]]]:
    """
    Translation of each edge (id, src, dst) induced by the torus IFS.

    For every edge exactly one h_m must map W_dst into W_src modulo Z^2;
    the returned translation is lifted so the containment holds in R^2.
    """
    induced = {}
    for edge_id, src, dst in edges:
        hits = []
        for m, (tx, ty) in sorted(maps.items()):
            for kx, ky in _LIFTS:
                candidate = GIFSEdge(edge_id, src, dst, (tx + kx, ty + ky), ratio)
                candidate_spec = GIFSSpec(vertex_sets=vertex_sets, edges=[candidate])
                if containment_lift(candidate_spec, candidate) == (0, 0):
                    hits.append((m, candidate.translation))
                    break
        if len(hits) != 1:
            raise MeasureValidationError(
                f"edge {edge_id} is realised by {len(hits)} torus maps",
                {"edge": edge_id, "maps": [m for m, _ in hits]},
            )
        induced[edge_id] = hits[0]
    return induced
