"""
Pipeline orchestrator for Krein-Feller problem runs.

Executes the stages a command needs, in order:
1. Ingest: read and validate the problem spec
2. Measure: build the discrete measure (Dirac, sphere IFS or torus GIFS)
3. Eigen: mesh, pencil assembly and generalized eigensolve
4. Evolve: linear evolution or Picard iteration
5. Analysis stages of the command (dimension, scan, GIFS checks, verify, oracle)
6. Report: write the command's artifacts

Each stage receives and returns a ProblemContext. The first failing stage
stops the run; its error is recorded on the context and in error.json.
"""

from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from models import Manifold, ProblemContext, ProblemResult
from pipeline.analyze import bilipschitz_stage, dimension_stage, gifs_check_stage
from pipeline.export import report_stage, write_json
from pipeline.ingest import ingest_stage, measure_stage
from pipeline.solve import eigen_stage, evolve_stage, oracle_stage
from pipeline.verify import verify_stage
from utils.errors import KreinFellerError
from utils.logging import log_error, log_event, log_stage_end, log_stage_start

Stage = Tuple[str, Callable[[ProblemContext], ProblemContext]]


def _has_measure(ctx: ProblemContext) -> bool:
    return ctx.spec.measure is not None


def _has_circle_measure(ctx: ProblemContext) -> bool:
    return ctx.measure is not None and ctx.measure.manifold is Manifold.CIRCLE


# Optional stages run only when their predicate holds
STAGE_CONDITIONS: Dict[str, Callable[[ProblemContext], bool]] = {
    "VERIFY_MEASURE": _has_measure,
    "VERIFY_EIGEN": _has_circle_measure,
}

COMMAND_STAGES: Dict[str, List[Stage]] = {
    "eig": [
        ("INGEST", ingest_stage),
        ("MEASURE", measure_stage),
        ("EIGEN", eigen_stage),
        ("REPORT", report_stage),
    ],
    "solve": [
        ("INGEST", ingest_stage),
        ("MEASURE", measure_stage),
        ("EIGEN", eigen_stage),
        ("EVOLVE", evolve_stage),
        ("REPORT", report_stage),
    ],
    "dim": [
        ("INGEST", ingest_stage),
        ("MEASURE", measure_stage),
        ("DIMENSION", dimension_stage),
        ("REPORT", report_stage),
    ],
    "verify": [
        ("INGEST", ingest_stage),
        ("VERIFY_MEASURE", measure_stage),
        ("VERIFY_EIGEN", eigen_stage),
        ("VERIFY", verify_stage),
        ("REPORT", report_stage),
    ],
    "bilip": [
        ("INGEST", ingest_stage),
        ("BILIPSCHITZ", bilipschitz_stage),
        ("REPORT", report_stage),
    ],
    "gifs-check": [
        ("INGEST", ingest_stage),
        ("GIFS_CHECK", gifs_check_stage),
        ("REPORT", report_stage),
    ],
    "oracle-compare": [
        ("INGEST", ingest_stage),
        ("MEASURE", measure_stage),
        ("EIGEN", eigen_stage),
        ("EVOLVE", evolve_stage),
        ("ORACLE", oracle_stage),
        ("REPORT", report_stage),
    ],
}

COMMANDS = tuple(COMMAND_STAGES)


def _exit_code(ctx: ProblemContext) -> int:
    if ctx.failure is not None:
        return int(ctx.failure.get("exit_code", 1))
    if any(not check.passed for check in ctx.checks):
        return 1
    return 0


def run_pipeline(
    spec_path: str,
    command: str = "solve",
    out_dir: Optional[str] = None,
    seed: Optional[int] = None,
    threads: int = 1,
) -> ProblemResult:
    """
    Execute one command on a problem spec.

    Args:
        spec_path: path to the problem spec JSON
        command: one of COMMANDS
        out_dir: artifact directory (nothing is written when None)
        seed: overrides the spec's seed when given
        threads: worker count for the verify suite

    Returns:
        ProblemResult with artifacts, check outcomes, errors and exit code
    """
    if command not in COMMAND_STAGES:
        raise ValueError(f"unknown command {command!r}; expected one of {COMMANDS}")

    ctx = ProblemContext(
        spec_path=spec_path,
        command=command,
        out_dir=out_dir,
        seed=seed,
        threads=threads,
    )

    for name, stage in COMMAND_STAGES[command]:
        condition = STAGE_CONDITIONS.get(name)
        if condition is not None and not condition(ctx):
            log_event("STAGE_SKIPPED", {"stage": name})
            continue
        try:
            log_stage_start(name)
            ctx = stage(ctx)
            log_stage_end(name)
        except KreinFellerError as e:
            log_error(f"{name} failed for {spec_path}", e)
            ctx.errors.append(f"{name}: {e}")
            ctx.failure = {**e.to_dict(), "stage": name, "exit_code": e.exit_code}
            break
        except Exception as e:
            log_error(f"{name} failed for {spec_path}", e)
            ctx.errors.append(f"{name}: {e}")
            ctx.failure = {
                "kind": "internal",
                "message": str(e),
                "details": {"type": type(e).__name__},
                "stage": name,
                "exit_code": 1,
            }
            break

    if ctx.failure is not None and out_dir is not None:
        error_path = write_json(Path(out_dir) / "error.json", ctx.failure)
        ctx.artifacts["error"] = str(error_path)

    return ProblemResult(
        spec_path=spec_path,
        command=command,
        name=ctx.spec.name if ctx.spec is not None else Path(spec_path).stem,
        exit_code=_exit_code(ctx),
        eigenvalues=(
            [float(v) for v in ctx.basis.eigenvalues] if ctx.basis is not None else []
        ),
        checks=ctx.checks,
        artifacts=ctx.artifacts,
        errors=ctx.errors,
        failure=ctx.failure,
    )
