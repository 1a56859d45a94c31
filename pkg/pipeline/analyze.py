"""
Analysis stages: dimension ladder, halving-map scan and GIFS table checks.
"""

from typing import Optional

from analysis.bilipschitz import bilipschitz_scan
from analysis.dimension import estimate_dim_infinity
from analysis.graphs import gifs_graph, gifs_strongly_connected, walk_is_covering
from analysis.regularity import s_regularity_check
from measures.tables import containment_violations, probability_row_violations
from models import BiLipschitzReport, CheckResult, ProblemContext
from pipeline.ingest import build_gifs_spec
from utils.logging import log_event

CHECKPOINT_TARGET = 0.5
CHECKPOINT_TOL = 1e-3
SYMMETRY_TOL = 1e-12

# Closed walk through all twelve vertices of the torus GIFS
REFERENCE_WALK = (1, 8, 12, 2, 9, 11, 3, 4, 5, 6, 2, 9, 7, 8, 10, 12, 5, 1)


def dimension_stage(ctx: ProblemContext) -> ProblemContext:
    dspec = ctx.spec.dimension
    estimate = estimate_dim_infinity(
        ctx.measure, dspec.delta0, dspec.rho, dspec.levels, dspec.manifold_dim
    )
    ctx.reports["dimension"] = estimate
    rspec = ctx.spec.regularity
    if rspec is not None:
        ctx.reports["regularity"] = s_regularity_check(
            ctx.measure, rspec.c, rspec.p, rspec.t, estimate.radii, rspec.r0
        )
    return ctx


def bilipschitz_check(
    scan_spec, report: Optional[BiLipschitzReport] = None
) -> CheckResult:
    """Scan verdict: 0 < min <= max < 1, checkpoints near 1/2, mirror symmetry."""
    if report is None:
        report = bilipschitz_scan(tuple(scan_spec.grid), scan_spec.cutoff)
    checkpoints_ok = all(
        abs(value - CHECKPOINT_TARGET) <= CHECKPOINT_TOL
        for value in report.checkpoints.values()
    )
    symmetric = report.symmetry_defect <= SYMMETRY_TOL
    return CheckResult(
        "bilipschitz",
        report.passed and checkpoints_ok and symmetric,
        {
            "min_ratio": report.min_ratio,
            "max_ratio": report.max_ratio,
            "checkpoints": report.checkpoints,
            "symmetry_defect": report.symmetry_defect,
        },
    )


def bilipschitz_stage(ctx: ProblemContext) -> ProblemContext:
    report = bilipschitz_scan(tuple(ctx.spec.scan.grid), ctx.spec.scan.cutoff)
    ctx.reports["bilipschitz"] = report
    ctx.checks.append(bilipschitz_check(ctx.spec.scan, report))
    return ctx


def gifs_table_report(mspec, spec_path=None, remove_edges=()) -> dict:
    """Exact row sums, corner containment and strong connectivity of a table."""
    removed = set(int(e) for e in remove_edges)
    if mspec is not None and mspec.type == "gifs":
        removed |= set(mspec.remove_edges)
    removed = sorted(removed)
    spec = build_gifs_spec(mspec, spec_path, removed)

    rows = probability_row_violations(spec)
    containment = containment_violations(spec)
    connectivity = gifs_strongly_connected(spec)
    graph = gifs_graph(spec)
    report = {
        "version": spec.version,
        "vertices": len(spec.vertex_sets),
        "edges": len(spec.edges),
        "removed_edges": removed,
        "probability_violations": rows,
        "containment_violations": containment,
        "strongly_connected": connectivity.strongly_connected,
        "witness": connectivity.witness,
        "witness_covers_all": bool(
            connectivity.witness and walk_is_covering(graph, connectivity.witness)
        ),
        "reference_walk_valid": walk_is_covering(graph, REFERENCE_WALK),
    }
    report["passed"] = (
        not rows
        and not containment
        and connectivity.strongly_connected
        and report["witness_covers_all"]
    )
    log_event(
        "GIFS_CHECKED",
        {
            "version": spec.version,
            "probability_violations": len(rows),
            "containment_violations": len(containment),
            "strongly_connected": connectivity.strongly_connected,
        },
    )
    return report


def gifs_check_stage(ctx: ProblemContext) -> ProblemContext:
    report = gifs_table_report(ctx.spec.measure, ctx.spec_path)
    ctx.reports["gifs_check"] = report
    ctx.checks.append(
        CheckResult(
            "gifs_table",
            report["passed"],
            {k: v for k, v in report.items() if k != "witness"},
        )
    )
    return ctx
