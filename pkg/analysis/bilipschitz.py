"""
Grid verification of the two-sided distortion bounds of the sphere
halving map f(phi, theta) = (phi / 2, theta).

Pairs are parametrised by latitudes a <= b (measured from the equator) and
the azimuth gap alpha: p = (pi/2 - a, 0), q = (pi/2 - b, alpha).
"""

import math
from typing import Dict, Tuple

import numpy as np

from geometry.manifolds import halve_polar_angles, sphere_distance_rows
from models import BiLipschitzReport
from utils.errors import DomainError
from utils.logging import log_event

HALF_PI = math.pi / 2
CHECKPOINT_DELTA = 1e-4
MIN_GRID = 8
MAX_COUNTEREXAMPLES = 20


def halving_ratios(a: np.ndarray, b: np.ndarray, alpha: np.ndarray) -> Tuple:
    """(d(f(p), f(q)) / d(p, q), d(p, q)) elementwise."""
    a, b, alpha = np.broadcast_arrays(
        np.asarray(a, float), np.asarray(b, float), np.asarray(alpha, float)
    )
    p = np.column_stack((HALF_PI - a.ravel(), np.zeros(a.size)))
    q = np.column_stack((HALF_PI - b.ravel(), alpha.ravel()))
    d = sphere_distance_rows(p, q)
    d_image = sphere_distance_rows(halve_polar_angles(p), halve_polar_angles(q))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(d > 0, d_image / np.where(d > 0, d, 1.0), np.nan)
    return ratio.reshape(a.shape), d.reshape(a.shape)


def degenerate_checkpoints(delta: float = CHECKPOINT_DELTA) -> Dict[str, float]:
    """
    Ratios at the three corners where the distortion tends to 1/2:
    along a meridian at the equator, near the pole, and equator-to-pole.
    """
    points = {
        "equator_meridian": (0.0, delta, 0.0),
        "near_pole": (HALF_PI - 2 * delta, HALF_PI - delta, math.pi / 3),
        "equator_to_pole": (0.0, HALF_PI, 0.0),
    }
    return {
        name: float(halving_ratios(*abc)[0].reshape(-1)[0])
        for name, abc in points.items()
    }


def bilipschitz_scan(
    grid: Tuple[int, int, int] = (64, 64, 128), cutoff: float = 1e-3
) -> BiLipschitzReport:
    """
    Min / max of the halving-map distance ratio over a in [0, pi/2],
    b in [a, pi/2], alpha in [0, 2 pi), for pairs farther apart than cutoff.
    """
    na, nb, nalpha = grid
    if min(grid) < MIN_GRID:
        raise DomainError(f"grid resolutions must be >= {MIN_GRID}, got {grid}")
    if not cutoff > 0:
        raise DomainError(f"cutoff must be positive, got {cutoff}")

    a_axis = np.linspace(0.0, HALF_PI, na)
    b_axis = np.linspace(0.0, HALF_PI, nb)
    alpha_axis = np.linspace(0.0, 2 * math.pi, nalpha, endpoint=False)
    A, B, ALPHA = np.meshgrid(a_axis, b_axis, alpha_axis, indexing="ij")

    ratio, d = halving_ratios(A, B, ALPHA)
    mirrored, _ = halving_ratios(A, B, np.mod(2 * math.pi - ALPHA, 2 * math.pi))
    valid = (B >= A) & (d > cutoff)
    if not np.any(valid):
        raise DomainError("no grid pair is farther apart than the cutoff")

    values = np.where(valid, ratio, np.nan)
    i_min = np.unravel_index(np.nanargmin(values), values.shape)
    i_max = np.unravel_index(np.nanargmax(values), values.shape)

    def _point(index) -> Tuple[float, float, float]:
        return (float(A[index]), float(B[index]), float(ALPHA[index]))

    bad = valid & ((ratio >= 1) | (ratio <= 0))
    counterexamples = [
        (float(A[i]), float(B[i]), float(ALPHA[i]), float(ratio[i]))
        for i in zip(*np.nonzero(bad))
    ][:MAX_COUNTEREXAMPLES]

    report = BiLipschitzReport(
        grid=(na, nb, nalpha),
        cutoff=cutoff,
        min_ratio=float(values[i_min]),
        max_ratio=float(values[i_max]),
        argmin=_point(i_min),
        argmax=_point(i_max),
        checkpoints=degenerate_checkpoints(),
        symmetry_defect=float(np.max(np.abs(ratio[valid] - mirrored[valid]))),
        counterexamples=counterexamples,
    )
    log_event(
        "BILIPSCHITZ_SCAN",
        {
            "grid": list(report.grid),
            "min_ratio": report.min_ratio,
            "max_ratio": report.max_ratio,
            "checkpoints": report.checkpoints,
            "counterexamples": len(counterexamples),
        },
    )
    return report
