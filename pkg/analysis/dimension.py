"""
Finite-scale estimate of the L-infinity dimension of a discrete measure.

The sup ball mass S(delta) = sup_x mu(B(x, delta)) is sampled on a
geometric ladder and ln S regressed on ln delta. Radii below the minimum
distinct inter-atom gap only see single atoms and are dropped.
"""

from typing import Optional

import numpy as np
import scipy.stats

from measures.queries import minimum_atom_gap, sup_ball_mass_ladder
from models import MANIFOLD_DIMENSION, DimensionEstimate, DiscreteMeasure
from utils.errors import DomainError
from utils.logging import log_event

MIN_LEVELS = 3


def radius_ladder(delta0: float, rho: float, levels: int) -> np.ndarray:
    if not delta0 > 0:
        raise DomainError(f"delta0 must be positive, got {delta0}")
    if not 0 < rho < 1:
        raise DomainError(f"rho must lie in (0, 1), got {rho}")
    if levels < MIN_LEVELS:
        raise DomainError(f"levels must be >= {MIN_LEVELS}, got {levels}")
    return delta0 * rho ** np.arange(levels)


def estimate_dim_infinity(
    m: DiscreteMeasure,
    delta0: float,
    rho: float,
    levels: int,
    manifold_dim: Optional[int] = None,
    centers: Optional[np.ndarray] = None,
) -> DimensionEstimate:
    """
    Regression slope of ln S(delta) against ln delta, plus the gate
    slope - stderr > n - 2.

    When fewer than MIN_LEVELS radii survive the atom-gap floor the full
    ladder is kept; a ladder whose sup masses are all equal is flagged
    degenerate and reports slope 0.
    """
    n = manifold_dim if manifold_dim is not None else MANIFOLD_DIMENSION[m.manifold]
    radii = radius_ladder(delta0, rho, levels)
    floor = minimum_atom_gap(m)
    above = radii[radii >= floor] if np.isfinite(floor) else radii
    if above.shape[0] >= MIN_LEVELS:
        radii = above

    sup_masses = sup_ball_mass_ladder(m, radii, centers)
    ln_r, ln_s = np.log(radii), np.log(sup_masses)
    pointwise = np.diff(ln_s) / np.diff(ln_r)

    degenerate = bool(np.all(sup_masses == sup_masses[0]))
    if degenerate:
        slope, stderr = 0.0, 0.0
    else:
        fit = scipy.stats.linregress(ln_r, ln_s)
        slope, stderr = float(fit.slope), float(fit.stderr)

    estimate = DimensionEstimate(
        radii=radii,
        sup_masses=sup_masses,
        slope=slope,
        stderr=stderr,
        pointwise_slopes=pointwise,
        gate=bool(slope - stderr > n - 2),
        manifold_dim=n,
        degenerate=degenerate,
        ladder_floor=float(floor),
    )
    log_event(
        "DIMENSION_LADDER",
        {
            "radii": radii,
            "sup_masses": sup_masses,
            "slope": slope,
            "stderr": stderr,
            "gate": estimate.gate,
            "degenerate": degenerate,
        },
    )
    return estimate
