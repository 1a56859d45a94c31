"""
Upper s-regularity scan: mu(B(x, r)) <= C r^s on a radius ladder, with
s = ln(t - t p) / ln c and C = r0^(-s).
"""

import math
from typing import Optional, Sequence

import numpy as np

from measures.queries import distinct_atoms, sup_ball_mass_ladder
from models import DiscreteMeasure, RegularityReport
from utils.errors import DomainError
from utils.logging import log_event

REGULARITY_TOL = 1e-12


def regularity_exponent(c: float, p: float, t: int) -> float:
    if not 0 < c < 1:
        raise DomainError(f"contraction ratio c must lie in (0, 1), got {c}")
    if not 0 < p < 1:
        raise DomainError(f"probability p must lie in (0, 1), got {p}")
    if t < 1:
        raise DomainError(f"t must be >= 1, got {t}")
    return math.log(t - t * p) / math.log(c)


def s_regularity_check(
    m: DiscreteMeasure,
    c: float,
    p: float,
    t: int,
    radii: Sequence[float],
    r0: Optional[float] = None,
) -> RegularityReport:
    """
    Scan atom-centred balls on the ladder for mu(B(x, r)) > C r^s.

    When t (1 - p) >= 1 the exponent is not positive and the bound says
    nothing; the report is flagged vacuous and no scan is made.
    """
    s = regularity_exponent(c, p, t)
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0 or np.any(~(radii > 0)):
        raise DomainError("radii must be a non-empty ladder of positive values")
    r0 = float(radii.max()) if r0 is None else float(r0)
    if not r0 > 0:
        raise DomainError(f"r0 must be positive, got {r0}")

    vacuous = t * (1 - p) >= 1
    if vacuous:
        report = RegularityReport(s=s, C=float("nan"), r0=r0, vacuous=True)
        log_event("S_REGULARITY", {"s": s, "vacuous": True})
        return report

    C = r0 ** (-s)
    sup_masses = sup_ball_mass_ladder(m, radii, distinct_atoms(m).coords)
    bounds = C * radii**s
    violations = [
        {"radius": float(r), "sup_mass": float(mass), "bound": float(bound)}
        for r, mass, bound in zip(radii, sup_masses, bounds)
        if mass > bound * (1 + REGULARITY_TOL)
    ]
    report = RegularityReport(s=s, C=C, r0=r0, vacuous=False, violations=violations)
    log_event(
        "S_REGULARITY",
        {"s": s, "C": C, "r0": r0, "violations": len(violations)},
    )
    return report
