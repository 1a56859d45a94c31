"""
Closed-form eigenpairs and solutions for Dirac measures on the circle.

half_circle: arc (-pi/2, pi/2), Dirichlet ends, unit atom at 0.
full_circle: whole circle, unit atoms at 0 and pi.

Both share the eigenvalue 4/pi with a tent eigenfunction of slopes +-2/pi;
the full circle also has lambda = 0 with constant eigenfunction.
"""

import math
from typing import Dict, List, Optional

import numpy as np

from models import ClosedFormProblem, Equation, LinearPiece
from spectral.basis import fix_sign
from spectral.mesh import arc_domain, full_circle_domain
from utils.errors import DomainError

HALF_CIRCLE = "half_circle"
FULL_CIRCLE = "full_circle"
SETTINGS = (HALF_CIRCLE, FULL_CIRCLE)

TENT_EIGENVALUE = 4.0 / math.pi
TENT_SLOPE = 2.0 / math.pi

DEFAULT_PARAMS = {"c": 0.0, "c1": 1.0, "c2": 1.0}


def _tent(lo: float, hi: float) -> List[LinearPiece]:
    return [
        LinearPiece(lo, 0.0, 1.0, TENT_SLOPE),
        LinearPiece(0.0, hi, 1.0, -TENT_SLOPE),
    ]


def oracle_eigen(setting: str) -> ClosedFormProblem:
    """Exact eigenvalues and raw piecewise-linear eigenfunctions."""
    if setting == HALF_CIRCLE:
        half = math.pi / 2
        return ClosedFormProblem(
            setting=setting,
            domain=arc_domain(-half, half),
            atoms=[(0.0, 1.0)],
            eigenvalues=[TENT_EIGENVALUE],
            eigenfunctions=[_tent(-half, half)],
        )
    if setting == FULL_CIRCLE:
        return ClosedFormProblem(
            setting=setting,
            domain=full_circle_domain(),
            atoms=[(0.0, 1.0), (math.pi, 1.0)],
            eigenvalues=[0.0, TENT_EIGENVALUE],
            eigenfunctions=[
                [LinearPiece(-math.pi, math.pi, 1.0, 0.0)],
                _tent(-math.pi, math.pi),
            ],
        )
    raise DomainError(f"unknown oracle setting {setting!r}", {"known": SETTINGS})


def _chart_angles(problem: ClosedFormProblem, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if problem.domain.periodic:
        return np.mod(theta + math.pi, 2 * math.pi) - math.pi
    lo, hi = problem.domain.theta_lo, problem.domain.theta_hi
    if np.any((theta < lo - 1e-12) | (theta > hi + 1e-12)):
        raise DomainError(f"angles outside the arc [{lo}, {hi}]")
    return theta


def evaluate_eigenfunction(problem: ClosedFormProblem, index: int, theta) -> np.ndarray:
    """Raw eigenfunction values; at a breakpoint the left piece is used."""
    theta = _chart_angles(problem, theta)
    pieces = problem.eigenfunctions[index]
    last = pieces[-1]
    values = last.intercept + last.slope * theta
    for piece in reversed(pieces[:-1]):
        values = np.where(
            theta <= piece.theta_hi, piece.intercept + piece.slope * theta, values
        )
    return values


def eigenfunction_norm(problem: ClosedFormProblem, index: int) -> float:
    """||phi||_mu = sqrt(sum of weight * phi(atom)^2)."""
    thetas = np.array([a for a, _ in problem.atoms])
    weights = np.array([w for _, w in problem.atoms])
    values = evaluate_eigenfunction(problem, index, thetas)
    return float(math.sqrt(np.sum(weights * values**2)))


def raw_samples(problem: ClosedFormProblem, nodes) -> np.ndarray:
    """(nodes, eigenpairs) raw eigenfunction samples."""
    return np.column_stack(
        [
            evaluate_eigenfunction(problem, k, nodes)
            for k in range(len(problem.eigenvalues))
        ]
    )


def normalized_samples(problem: ClosedFormProblem, nodes) -> np.ndarray:
    """
    mu-normalised samples with the sign convention of the pencil solver
    applied column by column.
    """
    raw = raw_samples(problem, nodes)
    return np.column_stack(
        [
            fix_sign(raw[:, k] / eigenfunction_norm(problem, k))
            for k in range(raw.shape[1])
        ]
    )


def _params(params: Optional[Dict[str, float]]) -> Dict[str, float]:
    merged = dict(DEFAULT_PARAMS)
    merged.update(params or {})
    return merged


def oracle_forcing(
    setting: str, params: Optional[Dict[str, float]], theta
) -> np.ndarray:
    """
    Nodal forcing of the heat examples: the constant c on the half circle,
    c * phi_2 on the full circle.
    """
    c = _params(params)["c"]
    problem = oracle_eigen(setting)
    if setting == HALF_CIRCLE:
        return c * np.ones_like(_chart_angles(problem, theta))
    return c * evaluate_eigenfunction(problem, 1, theta)


def oracle_solution(
    setting: str,
    equation: Equation,
    params: Optional[Dict[str, float]],
    t: float,
    theta,
) -> np.ndarray:
    """
    Exact u(t) at the angles theta.

    wave:         (phi / 4) cos(2 t / sqrt(pi))        from g = phi / 4, h = 0
    heat, half:   (phi / 4)(e^(-lt)(1 - c pi) + c pi)  from g = phi / 4, f = c
    heat, full:   c1 + phi_2(e^(-lt)(c2 - pi c / 4) + pi c / 4)
    schrodinger:  (phi / 4) e^(-i l t)
    """
    equation = Equation(equation)
    problem = oracle_eigen(setting)
    p = _params(params)
    lam = TENT_EIGENVALUE
    tent_index = 0 if setting == HALF_CIRCLE else 1
    phi = evaluate_eigenfunction(problem, tent_index, theta)
    decay = math.exp(-lam * t)

    if equation is Equation.WAVE:
        return (phi / 4 * math.cos(math.sqrt(lam) * t)).astype(complex)
    if equation is Equation.SCHRODINGER:
        return phi / 4 * np.exp(-1j * lam * t)
    if setting == HALF_CIRCLE:
        c = p["c"]
        return (phi / 4 * (decay * (1 - c * math.pi) + c * math.pi)).astype(complex)
    c, c1, c2 = p["c"], p["c1"], p["c2"]
    equilibrium = math.pi * c / 4
    return (c1 + phi * (decay * (c2 - equilibrium) + equilibrium)).astype(complex)


def oracle_initial_data(
    setting: str, equation: Equation, params: Optional[Dict[str, float]], theta
) -> np.ndarray:
    """u(0) of the closed-form solution; the wave velocity is always 0."""
    return oracle_solution(setting, equation, params, 0.0, theta)
