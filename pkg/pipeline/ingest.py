"""
Ingestion: read a problem spec and turn its sections into domain objects.

Spec problems (missing file, malformed JSON, schema violations, referenced
files that do not exist) raise SpecValidationError with a machine-readable
list of the offending fields.
"""

import json
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from evolution.forcing import constant_forcing, zero_forcing
from measures.builders import (
    dirac_measure,
    gifs_invariant_measure,
    ifs_invariant_measure,
    sphere_ifs,
)
from measures.tables import DEFAULT_TABLE_PATH, as_fraction, load_gifs_table
from models import (
    ChartPoint,
    CoefVec,
    ContractionMap,
    DiscreteMeasure,
    Domain1D,
    Equation,
    ForcingTerm,
    GIFSEdge,
    GIFSSpec,
    IFSSpec,
    Manifold,
    Nonlinearity,
    PicardConfig,
    ProblemContext,
    SpectralBasis,
)
from oracle.closed_forms import oracle_eigen, oracle_forcing, oracle_initial_data
from pipeline.schemas import (
    DomainSpec,
    ForcingSpec,
    MeasureSpec,
    PicardSpec,
    ProblemSpec,
)
from semilinear.nonlinearity import make_nonlinearity
from spectral.basis import project
from spectral.mesh import arc_domain, full_circle_domain
from utils.errors import DomainError, SpecValidationError
from utils.logging import log_event


def _schema_errors(error: ValidationError) -> List[dict]:
    return [
        {
            "loc": [str(part) for part in err["loc"]],
            "msg": err["msg"],
            "type": err["type"],
        }
        for err in error.errors()
    ]


def load_problem_spec(path: str) -> ProblemSpec:
    """Read and validate a problem spec JSON file."""
    spec_file = Path(path)
    if not spec_file.is_file():
        raise SpecValidationError(f"spec file not found: {path}", {"path": str(path)})
    try:
        with open(spec_file, "r") as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise SpecValidationError(
            f"spec is not valid JSON: {e.msg}",
            {"path": str(path), "line": e.lineno, "column": e.colno},
        ) from e

    try:
        spec = ProblemSpec.model_validate(raw)
    except ValidationError as e:
        raise SpecValidationError(
            f"spec failed validation with {e.error_count()} error(s)",
            {"path": str(path), "errors": _schema_errors(e)},
        ) from e

    if spec.measure is not None and spec.measure.table is not None:
        table = resolve_path(spec.measure.table, spec_file)
        if not table.is_file():
            raise SpecValidationError(
                f"GIFS table not found: {spec.measure.table}",
                {"path": str(path), "table": str(table)},
            )
    return spec


def resolve_path(reference: str, spec_file: Path) -> Path:
    """Relative references resolve against the spec file's directory first."""
    candidate = Path(reference)
    if candidate.is_absolute() or candidate.exists():
        return candidate
    return spec_file.parent / candidate


# ------------------------------------------------------------------
# Measures
# ------------------------------------------------------------------


def build_ifs_spec(mspec: MeasureSpec) -> IFSSpec:
    maps = None
    if mspec.maps is not None:
        maps = [ContractionMap(m.rotation_axis, m.rotation_angle) for m in mspec.maps]
    return sphere_ifs(maps, mspec.probabilities)


def build_gifs_spec(
    mspec: Optional[MeasureSpec],
    spec_path: Optional[str] = None,
    extra_remove: Iterable[int] = (),
) -> GIFSSpec:
    """
    GIFSSpec for a gifs measure section; the default table when mspec is not
    a gifs section. Edge overrides, probability overrides and removals are
    applied in that order.
    """
    removed = set(int(e) for e in extra_remove)
    if mspec is None or mspec.type != "gifs":
        return load_gifs_table(remove_edges=sorted(removed))

    table = DEFAULT_TABLE_PATH
    if mspec.table is not None:
        base = Path(spec_path) if spec_path else Path(".")
        table = resolve_path(mspec.table, base)
    edges = None
    if mspec.edges is not None:
        edges = [
            GIFSEdge(
                edge_id=row.id,
                src=row.src,
                dst=row.dst,
                translation=(
                    as_fraction(row.translation[0]),
                    as_fraction(row.translation[1]),
                ),
                ratio=as_fraction(row.ratio),
                map_index=row.map,
            )
            for row in mspec.edges
        ]
    return load_gifs_table(
        table,
        translations=mspec.translations,
        edge_probabilities={
            k: as_fraction(v) for k, v in mspec.edge_probabilities.items()
        },
        remove_edges=sorted(removed | set(mspec.remove_edges)),
        edges=edges,
    )


def build_measure(
    mspec: MeasureSpec, spec_path: Optional[str] = None
) -> Tuple[DiscreteMeasure, Optional[GIFSSpec]]:
    """DiscreteMeasure for the measure section (plus the GIFS spec when used)."""
    if mspec.type == "dirac":
        manifold = Manifold(mspec.manifold)
        points = [ChartPoint(manifold, tuple(coords)) for coords in mspec.atoms]
        weights = mspec.weights or [1.0] * len(points)
        return dirac_measure(points, weights), None

    if mspec.type == "ifs":
        seed = ChartPoint(Manifold.UPPER_SPHERE, tuple(mspec.seed_point))
        return ifs_invariant_measure(build_ifs_spec(mspec), seed, mspec.depth), None

    gifs = build_gifs_spec(mspec, spec_path)
    _, combined = gifs_invariant_measure(gifs, mspec.depth)
    return combined, gifs


def build_domain(dspec: DomainSpec) -> Domain1D:
    if dspec.kind == "full_circle":
        return full_circle_domain()
    return arc_domain(dspec.theta_lo, dspec.theta_hi)


# ------------------------------------------------------------------
# Initial data and forcing
# ------------------------------------------------------------------


def _equation(spec: ProblemSpec) -> Equation:
    return Equation(spec.equation.kind) if spec.equation else Equation.WAVE


def _check_oracle_domain(setting: str, basis: SpectralBasis) -> None:
    expected = oracle_eigen(setting).domain
    domain = basis.mesh.domain
    if (expected.kind, expected.theta_lo, expected.theta_hi) != (
        domain.kind,
        domain.theta_lo,
        domain.theta_hi,
    ):
        raise DomainError(
            f"oracle setting {setting} needs the {expected.kind} domain "
            f"[{expected.theta_lo}, {expected.theta_hi}]"
        )


def _nodal_vector(basis: SpectralBasis, real: List[float], imag: List[float]):
    nodes = len(basis.mesh.nodes)
    if len(real) != nodes:
        raise DomainError(f"nodal data has {len(real)} values, mesh has {nodes} nodes")
    values = np.asarray(real, dtype=complex)
    if imag:
        values = values + 1j * np.asarray(imag, dtype=float)
    return values


def _coefficient_vector(
    basis: SpectralBasis, real: List[float], imag: List[float]
) -> CoefVec:
    values = np.asarray(real, dtype=complex)
    if imag:
        values = values + 1j * np.asarray(imag, dtype=float)
    return CoefVec(values, basis)


def build_initial_data(
    spec: ProblemSpec, basis: SpectralBasis
) -> Tuple[CoefVec, CoefVec]:
    """(g, h) as eigen-coefficients; h is zero unless given."""
    data = spec.initial_data
    zero = CoefVec(np.zeros(basis.count, dtype=complex), basis)

    if data.kind == "zero":
        return zero, zero
    if any(v != 0 for v in data.g_imag) and _equation(spec) is not Equation.SCHRODINGER:
        raise SpecValidationError(
            "complex initial data is only meaningful for the Schrodinger equation",
            {"field": "initial_data.g_imag", "equation": _equation(spec).value},
        )
    if data.kind == "oracle":
        _check_oracle_domain(data.setting, basis)
        nodal = oracle_initial_data(
            data.setting, _equation(spec), data.params, basis.mesh.nodes
        )
        return project(basis, nodal), zero
    if data.kind == "nodal":
        g = project(basis, _nodal_vector(basis, data.g, data.g_imag))
        h = project(basis, _nodal_vector(basis, data.h, [])) if data.h else zero
        return g, h
    g = _coefficient_vector(basis, data.g, data.g_imag)
    h = _coefficient_vector(basis, data.h, []) if data.h else zero
    return g, h


def build_forcing(spec: ProblemSpec, basis: SpectralBasis) -> ForcingTerm:
    fspec: ForcingSpec = spec.forcing
    if fspec.kind == "zero":
        return zero_forcing()
    if fspec.kind == "oracle":
        data = spec.initial_data
        nodal = oracle_forcing(data.setting, data.params, basis.mesh.nodes)
        return constant_forcing(project(basis, nodal), f"oracle {data.setting}")
    if fspec.kind == "nodal":
        nodal = _nodal_vector(basis, fspec.values, [])
        return constant_forcing(project(basis, nodal), "nodal")
    return constant_forcing(
        _coefficient_vector(basis, fspec.values, []), "coefficients"
    )


def build_nonlinearity(spec: ProblemSpec) -> Optional[Nonlinearity]:
    if spec.nonlinearity is None:
        return None
    return make_nonlinearity(spec.nonlinearity.kind, spec.nonlinearity.scale)


def build_picard_config(pspec: PicardSpec) -> PicardConfig:
    return PicardConfig(
        tol=pspec.tol,
        max_iter=pspec.max_iter,
        time_slices=pspec.time_slices,
        steps_per_slice=pspec.steps_per_slice,
        max_bisections=pspec.max_bisections,
    )


# ------------------------------------------------------------------
# Stages
# ------------------------------------------------------------------


def ingest_stage(ctx: ProblemContext) -> ProblemContext:
    """Load and validate the spec; the CLI seed, when given, wins."""
    ctx.spec = load_problem_spec(ctx.spec_path)
    if ctx.seed is None:
        ctx.seed = ctx.spec.seed
    log_event(
        "SPEC_LOADED",
        {
            "name": ctx.spec.name,
            "command": ctx.command,
            "measure": ctx.spec.measure.type if ctx.spec.measure else None,
            "equation": ctx.spec.equation.kind if ctx.spec.equation else None,
            "seed": ctx.seed,
        },
    )
    return ctx


def measure_stage(ctx: ProblemContext) -> ProblemContext:
    if ctx.spec.measure is None:
        raise SpecValidationError(
            f"command {ctx.command} needs a measure section", {"field": "measure"}
        )
    ctx.measure, ctx.gifs = build_measure(ctx.spec.measure, ctx.spec_path)
    return ctx
