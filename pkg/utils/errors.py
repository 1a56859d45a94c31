"""
Exception hierarchy for the toolkit.

Every error raised by library code derives from KreinFellerError so the CLI
can map failures to exit codes in one place.
"""

from typing import Any, Dict, Optional


class KreinFellerError(Exception):
    """Root of all toolkit errors."""

    kind = "error"
    # CLI exit status: 2 for invalid input, 1 for numeric failures
    exit_code = 2

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "message": str(self), "details": self.details}


class DomainError(KreinFellerError):
    """Argument outside an operation's domain (e.g. mixed manifolds)."""

    kind = "domain"


class OutOfChartError(KreinFellerError):
    """A map sent a point outside the upper-hemisphere chart."""

    kind = "out_of_chart"


class MeasureValidationError(KreinFellerError):
    """Invalid weights, probability rows or edge containment."""

    kind = "measure_validation"


class AssemblyError(KreinFellerError):
    """Measure atom not located at a mesh node."""

    kind = "assembly"


class ConfigurationError(KreinFellerError):
    """Solver configuration is unusable (e.g. shifted pencil not SPD)."""

    kind = "configuration"


class SpectralDiagnosticError(KreinFellerError):
    """Retained eigenpair count disagrees with the mass-matrix rank."""

    kind = "spectral_diagnostic"
    exit_code = 1


class NonConvergenceError(KreinFellerError):
    """Picard iteration failed on the smallest allowed time slice."""

    kind = "non_convergence"
    exit_code = 1


class SpecValidationError(KreinFellerError):
    """Problem spec could not be read or failed schema validation."""

    kind = "spec_validation"
