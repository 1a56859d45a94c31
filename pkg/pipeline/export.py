"""
Artifact writers: JSON reports and CSV series.

Floats are written with repr (shortest round-trip decimal), non-finite
values become null, and nothing time- or host-dependent is recorded, so a
rerun with the same spec and seed reproduces every file byte for byte.
"""

import csv
import json
import math
from dataclasses import is_dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np

from evolution.linear import ealpha_trace, norms, wave_energy_bound
from models import CoefVec, Equation, ProblemContext, SpectralBasis, Trajectory
from spectral.basis import reconstruct
from utils.errors import DomainError
from utils.logging import log_event

TRACE_ORDER = ("mu", "dom_e", "e_alpha_2", "velocity_mu", "velocity_dual", "energy")


def to_jsonable(value: Any) -> Any:
    """Recursively convert reports to JSON-safe values."""
    if is_dataclass(value) and not isinstance(value, type):
        return {
            k: to_jsonable(v)
            for k, v in ((f, getattr(value, f)) for f in value.__dataclass_fields__)
        }
    if isinstance(value, dict):
        return {str(_key(k)): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(value.real), to_jsonable(value.imag)]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def _key(key: Any) -> Any:
    return key.value if isinstance(key, Enum) else key


def write_json(path: Path, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(to_jsonable(payload), indent=2, allow_nan=False)
    path.write_text(text + "\n")
    return path


def _cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


# ------------------------------------------------------------------
# Spectral
# ------------------------------------------------------------------


def eigenbasis_payload(name: str, basis: SpectralBasis) -> Dict[str, Any]:
    mesh = basis.mesh
    return {
        "name": name,
        "domain": {
            "kind": mesh.domain.kind,
            "theta_lo": mesh.domain.theta_lo,
            "theta_hi": mesh.domain.theta_hi,
        },
        "nodes": mesh.nodes,
        "free_indices": mesh.free_indices,
        "mass_rank": basis.pencil.rank,
        "shift": basis.shift,
        "max_residual": basis.max_residual,
        "eigenvalues": basis.eigenvalues,
        "eigenvectors": [basis.vectors[:, k] for k in range(basis.count)],
    }


# ------------------------------------------------------------------
# Trajectories
# ------------------------------------------------------------------


def trajectory_columns(traj: Trajectory, alphas: Sequence[float] = ()) -> List[str]:
    count = traj.basis.count
    header = ["t"]
    for k in range(count):
        header += [f"re_{k}", f"im_{k}"]
    if traj.velocities is not None:
        for k in range(count):
            header += [f"vre_{k}", f"vim_{k}"]
    header += [name for name in TRACE_ORDER if name in traj.traces]
    header += [f"e_alpha_{a!r}" for a in alphas]
    return header


def trajectory_rows(traj: Trajectory, alphas: Sequence[float] = ()) -> List[List[Any]]:
    lam = traj.basis.eigenvalues
    extra = [ealpha_trace(lam, traj.states, a) for a in alphas]
    traces = [traj.traces[name] for name in TRACE_ORDER if name in traj.traces]
    rows = []
    for j, t in enumerate(traj.times):
        row: List[Any] = [float(t)]
        for value in traj.states[j]:
            row += [float(value.real), float(value.imag)]
        if traj.velocities is not None:
            for value in traj.velocities[j]:
                row += [float(value.real), float(value.imag)]
        row += [float(trace[j]) for trace in traces]
        row += [float(trace[j]) for trace in extra]
        rows.append(row)
    return rows


def write_trajectory_csv(
    path: Path, traj: Trajectory, alphas: Sequence[float] = ()
) -> Path:
    header = trajectory_columns(traj, alphas)
    return write_csv(path, header, trajectory_rows(traj, alphas))


def read_trajectory_csv(path: Path, basis: SpectralBasis) -> Dict[str, Any]:
    """
    Parse a trajectory CSV back into times, states, velocities and the
    recorded norm columns.
    """
    with open(path, "r", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        table = np.array([[float(v) for v in row] for row in reader])
    column = {name: i for i, name in enumerate(header)}
    count = basis.count

    def _complex(prefix_re: str, prefix_im: str) -> np.ndarray:
        re = table[:, [column[f"{prefix_re}_{k}"] for k in range(count)]]
        im = table[:, [column[f"{prefix_im}_{k}"] for k in range(count)]]
        return re + 1j * im

    if f"re_{count - 1}" not in column or f"re_{count}" in column:
        raise DomainError(f"trajectory file does not match a basis of size {count}")
    velocities = _complex("vre", "vim") if "vre_0" in column else None
    return {
        "times": table[:, column["t"]],
        "states": _complex("re", "im"),
        "velocities": velocities,
        "columns": {
            name: table[:, column[name]] for name in TRACE_ORDER if name in column
        },
    }


def snapshot_rows(traj: Trajectory, indices: Sequence[int]) -> List[List[Any]]:
    """(t, theta, re u, im u) for every mesh node at each sampled grid time."""
    nodes = traj.basis.mesh.nodes
    rows = []
    for index in indices:
        values = reconstruct(traj.basis, traj.state(index))
        t = float(traj.times[index])
        rows += [
            [t, float(theta), float(v.real), float(v.imag)]
            for theta, v in zip(nodes, values)
        ]
    return rows


def manifest_payload(ctx: ProblemContext) -> Dict[str, Any]:
    spec, traj = ctx.spec, ctx.trajectory
    payload: Dict[str, Any] = {
        "name": spec.name,
        "command": ctx.command,
        "equation": traj.equation.value,
        "T": float(traj.times[-1]),
        "steps": traj.steps,
        "semilinear": ctx.picard_report is not None,
        "seed": ctx.seed,
        "eigenvalues": traj.basis.eigenvalues,
        "initial_norms": norms(ctx.initial, spec.equation.alphas),
        "final_norms": norms(traj.state(traj.steps), spec.equation.alphas),
        "forcing": ctx.forcing.description if ctx.forcing else "zero",
        "sample_times": [float(traj.times[i]) for i in ctx.reports["snapshot_indices"]],
    }
    if traj.equation is Equation.WAVE:
        h = ctx.initial_velocity or CoefVec(
            np.zeros(traj.basis.count, dtype=complex), traj.basis
        )
        payload["wave_energy_bound"] = wave_energy_bound(ctx.initial, h)
    payload["artifacts"] = sorted(ctx.artifacts)
    return payload


# ------------------------------------------------------------------
# Analysis
# ------------------------------------------------------------------


def ladder_rows(estimate) -> List[List[float]]:
    return [
        [float(r), float(s), math.log(r), math.log(s)]
        for r, s in zip(estimate.radii, estimate.sup_masses)
    ]


def dimension_payload(ctx: ProblemContext) -> Dict[str, Any]:
    estimate = ctx.reports["dimension"]
    payload = {
        "name": ctx.spec.name,
        "measure": ctx.spec.measure.type,
        "atoms": len(ctx.measure),
        "estimate": estimate,
        "min_pointwise_slope": (
            float(np.min(estimate.pointwise_slopes))
            if len(estimate.pointwise_slopes)
            else None
        ),
    }
    if "regularity" in ctx.reports:
        payload["regularity"] = ctx.reports["regularity"]
    return payload


# ------------------------------------------------------------------
# Stage
# ------------------------------------------------------------------


def report_stage(ctx: ProblemContext) -> ProblemContext:
    """Write the artifacts of the command into ctx.out_dir."""
    if ctx.out_dir is None:
        return ctx
    out = Path(ctx.out_dir)
    written: Dict[str, Path] = {}

    if ctx.command == "eig":
        written["eigenbasis"] = write_json(
            out / "eigenbasis.json", eigenbasis_payload(ctx.spec.name, ctx.basis)
        )

    if ctx.command in ("solve", "oracle-compare"):
        alphas = [a for a in ctx.spec.equation.alphas if a not in (0.0, 1.0, 2.0)]
        written["trajectory"] = write_trajectory_csv(
            out / "trajectory.csv", ctx.trajectory, alphas
        )
        if ctx.picard_report is not None:
            written["iterations"] = write_json(
                out / "iterations.json", ctx.picard_report
            )
        if ctx.reports.get("snapshot_indices"):
            written["snapshots"] = write_csv(
                out / "snapshots.csv",
                ["t", "theta", "re", "im"],
                snapshot_rows(ctx.trajectory, ctx.reports["snapshot_indices"]),
            )

    if ctx.command == "oracle-compare":
        written["oracle_compare"] = write_json(
            out / "oracle_compare.json", ctx.reports["oracle_compare"]
        )

    if ctx.command == "dim":
        written["dimension"] = write_json(
            out / "dimension.json", dimension_payload(ctx)
        )
        written["dimension_ladder"] = write_csv(
            out / "dimension_ladder.csv",
            ["radius", "sup_mass", "ln_radius", "ln_sup_mass"],
            ladder_rows(ctx.reports["dimension"]),
        )

    if ctx.command == "bilip":
        written["bilipschitz"] = write_json(
            out / "bilipschitz.json", ctx.reports["bilipschitz"]
        )

    if ctx.command == "gifs-check":
        written["gifs_check"] = write_json(
            out / "gifs_check.json", ctx.reports["gifs_check"]
        )

    if ctx.command == "verify":
        written["verify_report"] = write_json(
            out / "verify_report.json", ctx.reports["verify"]
        )

    ctx.artifacts.update({name: str(path) for name, path in written.items()})
    if ctx.command in ("solve", "oracle-compare"):
        ctx.artifacts["manifest"] = str(out / "manifest.json")
        write_json(out / "manifest.json", manifest_payload(ctx))

    log_event("ARTIFACTS_WRITTEN", {"artifacts": sorted(ctx.artifacts)})
    return ctx
