"""
Spectral and evolution stages, plus the closed-form comparison.
"""

from typing import List

import numpy as np

from evolution.forcing import is_zero
from evolution.linear import evolve
from models import CheckResult, Equation, ProblemContext, Trajectory
from oracle.closed_forms import oracle_solution
from pipeline.ingest import (
    build_domain,
    build_forcing,
    build_initial_data,
    build_nonlinearity,
    build_picard_config,
)
from semilinear.picard import picard_solve
from spectral.basis import reconstruct
from spectral.mesh import build_mesh
from spectral.pencil import assemble, solve_pencil
from utils.errors import DomainError, SpecValidationError
from utils.logging import log_event

SAMPLE_TIME_TOL = 1e-9
ORACLE_TOL = 1e-8


def eigen_stage(ctx: ProblemContext) -> ProblemContext:
    """Mesh containing every atom, pencil assembly and solve."""
    dspec = ctx.spec.domain
    domain = build_domain(dspec)
    atoms = ctx.measure.coords[:, 0] if ctx.measure.coords.ndim == 2 else []
    mesh = build_mesh(domain, dspec.resolution, [float(t) for t in atoms])
    ctx.basis = solve_pencil(assemble(mesh, ctx.measure), shift=dspec.shift)
    return ctx


def sample_indices(times: np.ndarray, sample_times: List[float]) -> List[int]:
    """Grid indices of the requested sample times; each must be a grid time."""
    scale = max(float(times[-1]), 1.0)
    indices = []
    for t in sample_times:
        index = int(np.argmin(np.abs(times - t)))
        if abs(times[index] - t) > SAMPLE_TIME_TOL * scale:
            raise DomainError(
                f"sample time {t} is not a grid time; choose steps so it is",
                {"sample_time": t, "nearest": float(times[index])},
            )
        indices.append(index)
    return indices


def evolve_stage(ctx: ProblemContext) -> ProblemContext:
    """Linear evolution, or Picard iteration when a nonlinearity is given."""
    spec = ctx.spec
    if spec.equation is None:
        raise SpecValidationError(
            f"command {ctx.command} needs an equation section", {"field": "equation"}
        )
    equation = Equation(spec.equation.kind)
    ctx.initial, ctx.initial_velocity = build_initial_data(spec, ctx.basis)
    ctx.forcing = build_forcing(spec, ctx.basis)
    F = build_nonlinearity(spec)
    h = ctx.initial_velocity if equation is Equation.WAVE else None

    if F is None:
        ctx.trajectory = evolve(
            equation, ctx.initial, h, ctx.forcing, spec.equation.T, spec.equation.steps
        )
    else:
        if not is_zero(ctx.forcing):
            raise DomainError("semilinear runs take no external forcing")
        ctx.trajectory, ctx.picard_report = picard_solve(
            equation,
            ctx.initial,
            h,
            F,
            spec.equation.T,
            build_picard_config(spec.picard),
        )
    ctx.reports["snapshot_indices"] = sample_indices(
        ctx.trajectory.times, spec.equation.sample_times
    )
    return ctx


def oracle_errors(setting: str, params: dict, traj: Trajectory) -> dict:
    """Max nodal deviation from the closed form, real and imaginary parts."""
    nodes = traj.basis.mesh.nodes
    worst_re, worst_im, worst_t = 0.0, 0.0, 0.0
    for index, t in enumerate(traj.times):
        exact = oracle_solution(setting, traj.equation, params, float(t), nodes)
        computed = reconstruct(traj.basis, traj.state(index))
        err_re = float(np.max(np.abs(computed.real - exact.real)))
        err_im = float(np.max(np.abs(computed.imag - exact.imag)))
        if max(err_re, err_im) > max(worst_re, worst_im):
            worst_t = float(t)
        worst_re, worst_im = max(worst_re, err_re), max(worst_im, err_im)
    return {
        "setting": setting,
        "equation": traj.equation.value,
        "times": len(traj.times),
        "max_error_real": worst_re,
        "max_error_imag": worst_im,
        "worst_time": worst_t,
        "tolerance": ORACLE_TOL,
    }


def oracle_stage(ctx: ProblemContext) -> ProblemContext:
    data = ctx.spec.initial_data
    if data.kind != "oracle":
        raise SpecValidationError(
            "oracle-compare needs oracle initial data", {"field": "initial_data.kind"}
        )
    if ctx.picard_report is not None:
        raise DomainError("oracle-compare covers the linear equations only")
    report = oracle_errors(data.setting, data.params, ctx.trajectory)
    passed = max(report["max_error_real"], report["max_error_imag"]) <= ORACLE_TOL
    ctx.reports["oracle_compare"] = report
    ctx.checks.append(CheckResult("oracle_compare", passed, report))
    log_event("ORACLE_COMPARED", report)
    return ctx
