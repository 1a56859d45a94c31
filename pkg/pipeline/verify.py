"""
Invariant suite behind the verify command.

Each check is a function of a SuiteInputs record returning a CheckResult.
Checks run on a thread pool and are reported in declared order.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from analysis.dimension import radius_ladder
from analysis.graphs import build_graph, strongly_connected, walk_is_covering
from analysis.regularity import s_regularity_check
from evolution.forcing import zero_forcing
from evolution.linear import evolve, heat_evolve, schrodinger_evolve, wave_evolve
from evolution.residual import weak_residual
from models import (
    CheckResult,
    CoefVec,
    DiscreteMeasure,
    Equation,
    PicardConfig,
    ProblemContext,
    SpectralBasis,
)
from pipeline.analyze import bilipschitz_check, gifs_table_report
from pipeline.ingest import build_initial_data
from pipeline.schemas import ProblemSpec, RegularitySpec
from semilinear.nonlinearity import make_nonlinearity
from semilinear.picard import picard_solve, sup_dom_e_metric
from spectral.basis import free_nodal_rows, shifted_basis
from utils.errors import SpecValidationError
from utils.logging import log_event

REFINEMENT_LEVELS = 4
ORDER_RANGE = (3.5, 4.5)
RESIDUAL_FLOOR = 1e-11
CONTRACTION_TOL = 1e-12
SEMILINEAR_EPSILON = 0.1
SEMILINEAR_T = 1.0
SEMILINEAR_TOL = 1e-6
SEMILINEAR_MAX_ITER = 20
MAX_RANDOM_VERTICES = 8
RANDOM_EDGE_PROBABILITY = 0.3


@dataclass
class SuiteInputs:
    """
    Shared, read-only inputs of the checks.

    basis carries the injected fault (if any); the pencil matrices inside it
    are the assembled ones, so energy measured through them exposes a wrong
    eigenvalue.
    """

    spec: ProblemSpec
    spec_path: Optional[str]
    seed: int
    basis: Optional[SpectralBasis] = None
    g: Optional[CoefVec] = None
    measure: Optional[DiscreteMeasure] = None


# ------------------------------------------------------------------
# Inputs
# ------------------------------------------------------------------


def inject_fault(
    basis: SpectralBasis, index: Optional[int], scale: float
) -> SpectralBasis:
    """Copy of basis with eigenvalue `index` multiplied by scale."""
    if index is None or scale == 1.0:
        return basis
    if not 0 <= index < basis.count:
        raise SpecValidationError(
            f"fault_index {index} outside basis of size {basis.count}",
            {"field": "verify.fault_index"},
        )
    eigenvalues = basis.eigenvalues.copy()
    eigenvalues[index] *= scale
    log_event("FAULT_INJECTED", {"index": index, "scale": scale})
    return SpectralBasis(
        eigenvalues=eigenvalues,
        vectors=basis.vectors,
        pencil=basis.pencil,
        shift=basis.shift,
        max_residual=basis.max_residual,
    )


def default_initial_data(spec: ProblemSpec, basis: SpectralBasis) -> CoefVec:
    """The spec's g, or equal weight on every mode when the spec has none."""
    g, _ = build_initial_data(spec, basis)
    if np.any(g.values != 0):
        return g
    return CoefVec(np.ones(basis.count, dtype=complex) / math.sqrt(basis.count), basis)


def _requires_basis(name: str, inputs: SuiteInputs) -> Optional[CheckResult]:
    if inputs.basis is None:
        return CheckResult(name, True, {"skipped": "spec has no circle measure"})
    return None


def _mu_norms(basis: SpectralBasis, states: np.ndarray) -> np.ndarray:
    nodal = free_nodal_rows(basis, states)
    M = basis.pencil.mass
    return np.sqrt(np.real(np.einsum("ti,ij,tj->t", nodal.conj(), M, nodal)))


# ------------------------------------------------------------------
# Evolution checks
# ------------------------------------------------------------------


def check_energy_conservation(inputs: SuiteInputs) -> CheckResult:
    """Wave energy 1/2 (|d_t u|_M^2 + u^T K u) constant, measured nodally."""
    skipped = _requires_basis("energy_conservation", inputs)
    if skipped:
        return skipped
    vspec = inputs.spec.verify
    basis, g = inputs.basis, inputs.g
    h = CoefVec(np.zeros(basis.count, dtype=complex), basis)
    traj = wave_evolve(g, h, zero_forcing(), vspec.T, vspec.steps)

    U = free_nodal_rows(basis, traj.states)
    V = free_nodal_rows(basis, traj.velocities)
    K, M = basis.pencil.stiffness, basis.pencil.mass
    kinetic = np.real(np.einsum("ti,ij,tj->t", V.conj(), M, V))
    potential = np.real(np.einsum("ti,ij,tj->t", U.conj(), K, U))
    energy = 0.5 * (kinetic + potential)
    scale = max(abs(energy[0]), 1e-300)
    drift = float(np.max(np.abs(energy - energy[0])) / scale)
    return CheckResult(
        "energy_conservation",
        drift <= vspec.tolerance,
        {"initial_energy": float(energy[0]), "relative_drift": drift},
    )


def check_heat_contraction(inputs: SuiteInputs) -> CheckResult:
    """||u(t)||_mu nonincreasing for the unforced heat equation."""
    skipped = _requires_basis("heat_contraction", inputs)
    if skipped:
        return skipped
    vspec = inputs.spec.verify
    traj = heat_evolve(inputs.g, zero_forcing(), vspec.T, vspec.steps)
    norms = _mu_norms(inputs.basis, traj.states)
    increase = float(np.max(np.diff(norms), initial=0.0))
    return CheckResult(
        "heat_contraction",
        increase <= CONTRACTION_TOL * max(norms[0], 1.0),
        {
            "initial_norm": float(norms[0]),
            "final_norm": float(norms[-1]),
            "max_increase": increase,
        },
    )


def check_schrodinger_unitarity(inputs: SuiteInputs) -> CheckResult:
    skipped = _requires_basis("schrodinger_unitarity", inputs)
    if skipped:
        return skipped
    vspec = inputs.spec.verify
    traj = schrodinger_evolve(inputs.g, zero_forcing(), vspec.T, vspec.steps)
    norms = _mu_norms(inputs.basis, traj.states)
    deviation = float(np.max(np.abs(norms - norms[0])))
    return CheckResult(
        "schrodinger_unitarity",
        deviation <= vspec.tolerance * max(norms[0], 1.0),
        {"initial_norm": float(norms[0]), "max_deviation": deviation},
    )


def _test_index(basis: SpectralBasis, g: CoefVec) -> Optional[int]:
    weight = np.abs(g.values) * (basis.eigenvalues > 0)
    return int(np.argmax(weight)) if np.any(weight > 0) else None


def check_weak_residual_refinement(inputs: SuiteInputs) -> CheckResult:
    """Residual ratio per time-grid doubling within the second-order band."""
    skipped = _requires_basis("weak_residual_refinement", inputs)
    if skipped:
        return skipped
    vspec = inputs.spec.verify
    basis, g = inputs.basis, inputs.g
    k = _test_index(basis, g)
    if k is None:
        return CheckResult(
            "weak_residual_refinement", True, {"skipped": "no positive mode in g"}
        )
    h = CoefVec(np.zeros(basis.count, dtype=complex), basis)
    details: Dict[str, Dict[str, List[float]]] = {}
    passed = True
    for equation in Equation:
        residuals = []
        for level in range(REFINEMENT_LEVELS):
            steps = vspec.refinement_steps * 2**level
            traj = evolve(equation, g, h, zero_forcing(), vspec.T, steps)
            residuals.append(weak_residual(traj, equation, zero_forcing(), k))
        ratios = [
            residuals[i] / residuals[i + 1]
            for i in range(len(residuals) - 1)
            if residuals[i + 1] > RESIDUAL_FLOOR
        ]
        passed = passed and all(ORDER_RANGE[0] <= r <= ORDER_RANGE[1] for r in ratios)
        details[equation.value] = {"residuals": residuals, "ratios": ratios}
    return CheckResult("weak_residual_refinement", passed, {"test_index": k, **details})


def check_semilinear_consistency(inputs: SuiteInputs) -> CheckResult:
    """
    F = eps u reproduces the linear flow with shifted eigenvalues: heat
    with l - eps, Schrodinger with l + eps (modulus preserved).
    """
    skipped = _requires_basis("semilinear_consistency", inputs)
    if skipped:
        return skipped
    basis, g = inputs.basis, inputs.g
    F = make_nonlinearity("linear", SEMILINEAR_EPSILON)
    config = PicardConfig(steps_per_slice=inputs.spec.verify.refinement_steps)

    heat, heat_report = picard_solve(Equation.HEAT, g, None, F, SEMILINEAR_T, config)
    shifted = shifted_basis(basis, -SEMILINEAR_EPSILON)
    exact = heat_evolve(
        CoefVec(g.values, shifted), zero_forcing(), SEMILINEAR_T, config.steps_per_slice
    )
    heat_error = sup_dom_e_metric(basis.eigenvalues, heat.states - exact.states)

    schr, schr_report = picard_solve(
        Equation.SCHRODINGER, g, None, F, SEMILINEAR_T, config
    )
    norms = _mu_norms(basis, schr.states)
    modulus_error = float(np.max(np.abs(norms - norms[0])))

    passed = (
        heat_error <= SEMILINEAR_TOL
        and heat_report.iterations <= SEMILINEAR_MAX_ITER
        and modulus_error <= SEMILINEAR_TOL
    )
    return CheckResult(
        "semilinear_consistency",
        passed,
        {
            "epsilon": SEMILINEAR_EPSILON,
            "heat_error": heat_error,
            "heat_iterations": heat_report.iterations,
            "schrodinger_modulus_error": modulus_error,
            "schrodinger_iterations": schr_report.iterations,
        },
    )


# ------------------------------------------------------------------
# Geometry and measure checks
# ------------------------------------------------------------------


def check_bilipschitz(inputs: SuiteInputs) -> CheckResult:
    return bilipschitz_check(inputs.spec.scan)


def check_gifs_connectivity(inputs: SuiteInputs) -> CheckResult:
    report = gifs_table_report(
        inputs.spec.measure, inputs.spec_path, inputs.spec.verify.remove_edges
    )
    details = {k: v for k, v in report.items() if k not in ("witness", "passed")}
    return CheckResult("gifs_connectivity", report["passed"], details)


def check_s_regularity(inputs: SuiteInputs) -> CheckResult:
    """Bound holds on the ladder, or is flagged vacuous."""
    if inputs.measure is None:
        return CheckResult("s_regularity", True, {"skipped": "spec has no measure"})
    rspec = inputs.spec.regularity or RegularitySpec()
    dspec = inputs.spec.dimension
    radii = radius_ladder(dspec.delta0, dspec.rho, dspec.levels)
    report = s_regularity_check(
        inputs.measure, rspec.c, rspec.p, rspec.t, radii, rspec.r0
    )
    return CheckResult(
        "s_regularity",
        report.vacuous or not report.violations,
        {
            "s": report.s,
            "C": report.C,
            "vacuous": report.vacuous,
            "violations": report.violations,
        },
    )


def _transitive_closure_connected(n: int, edges: List[tuple]) -> bool:
    reach = np.eye(n, dtype=bool)
    for u, v in edges:
        reach[u, v] = True
    for _ in range(n):
        reach = reach | ((reach.astype(int) @ reach.astype(int)) > 0)
    return bool(reach.all())


def check_random_connectivity(inputs: SuiteInputs) -> CheckResult:
    """networkx strong connectivity against a boolean transitive closure."""
    rng = np.random.default_rng(inputs.seed)
    mismatches = []
    bad_witnesses = 0
    for trial in range(inputs.spec.verify.random_graphs):
        n = int(rng.integers(1, MAX_RANDOM_VERTICES + 1))
        mask = rng.random((n, n)) < RANDOM_EDGE_PROBABILITY
        edges = [(int(u), int(v)) for u, v in zip(*np.nonzero(mask))]
        result = strongly_connected(range(n), edges)
        expected = _transitive_closure_connected(n, edges)
        if result.strongly_connected != expected:
            mismatches.append({"trial": trial, "vertices": n, "edges": edges})
        if result.strongly_connected and not walk_is_covering(
            build_graph(range(n), edges), result.witness or []
        ):
            bad_witnesses += 1
    return CheckResult(
        "random_connectivity",
        not mismatches and bad_witnesses == 0,
        {
            "graphs": inputs.spec.verify.random_graphs,
            "seed": inputs.seed,
            "mismatches": mismatches,
            "bad_witnesses": bad_witnesses,
        },
    )


CHECKS: Dict[str, Callable[[SuiteInputs], CheckResult]] = {
    "energy_conservation": check_energy_conservation,
    "heat_contraction": check_heat_contraction,
    "schrodinger_unitarity": check_schrodinger_unitarity,
    "weak_residual_refinement": check_weak_residual_refinement,
    "semilinear_consistency": check_semilinear_consistency,
    "bilipschitz": check_bilipschitz,
    "gifs_connectivity": check_gifs_connectivity,
    "s_regularity": check_s_regularity,
    "random_connectivity": check_random_connectivity,
}


def selected_checks(names: List[str]) -> List[str]:
    if not names:
        return list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise SpecValidationError(
            f"unknown verify checks: {unknown}",
            {"field": "verify.checks", "known": list(CHECKS)},
        )
    return list(names)


def run_checks(
    inputs: SuiteInputs, names: List[str], threads: int
) -> List[CheckResult]:
    """Run the named checks on `threads` workers; results keep the given order."""
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        futures = [pool.submit(CHECKS[name], inputs) for name in names]
        return [future.result() for future in futures]


def verify_stage(ctx: ProblemContext) -> ProblemContext:
    spec = ctx.spec
    names = selected_checks(spec.verify.checks)
    inputs = SuiteInputs(spec=spec, spec_path=ctx.spec_path, seed=ctx.seed or 0)
    inputs.measure = ctx.measure
    if ctx.basis is not None:
        inputs.basis = inject_fault(
            ctx.basis, spec.verify.fault_index, spec.verify.fault_scale
        )
        g = default_initial_data(spec, ctx.basis)
        inputs.g = CoefVec(g.values, inputs.basis)

    results = run_checks(inputs, names, ctx.threads)
    ctx.checks.extend(results)
    ctx.reports["verify"] = {
        "passed": all(r.passed for r in results),
        "checks": [
            {"name": r.name, "passed": r.passed, "details": r.details} for r in results
        ],
    }
    log_event("VERIFY_COMPLETE", {r.name: r.passed for r in results})
    return ctx
