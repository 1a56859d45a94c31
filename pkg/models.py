"""
Core data models for the Krein-Feller toolkit.

These models define the contracts passed between the geometry, measure,
spectral, evolution and analysis layers and the pipeline stages.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from utils.errors import DomainError, OutOfChartError

CHART_TOL = 1e-12
TWO_PI = 2.0 * math.pi


class Manifold(str, Enum):
    CIRCLE = "circle"
    UPPER_SPHERE = "upper_sphere"
    TORUS = "torus"


MANIFOLD_DIMENSION = {Manifold.CIRCLE: 1, Manifold.UPPER_SPHERE: 2, Manifold.TORUS: 2}


class Equation(str, Enum):
    WAVE = "wave"
    HEAT = "heat"
    SCHRODINGER = "schrodinger"


def _canonical_coords(manifold: Manifold, coords: Tuple[float, ...]) -> Tuple:
    if manifold is Manifold.CIRCLE:
        if len(coords) != 1:
            raise DomainError(f"circle point needs 1 coordinate, got {len(coords)}")
        theta = float(coords[0])
        if theta < -math.pi - CHART_TOL or theta > math.pi + CHART_TOL:
            theta = (theta + math.pi) % TWO_PI - math.pi
        return (min(max(theta, -math.pi), math.pi),)

    if manifold is Manifold.UPPER_SPHERE:
        if len(coords) != 2:
            raise DomainError(f"sphere point needs 2 coordinates, got {len(coords)}")
        phi, theta = float(coords[0]), float(coords[1])
        if phi < -CHART_TOL or phi > math.pi / 2 + CHART_TOL:
            raise OutOfChartError(f"polar angle {phi} outside [0, pi/2]")
        phi = min(max(phi, 0.0), math.pi / 2)
        theta = theta % TWO_PI
        if theta >= TWO_PI:
            theta = 0.0
        if phi == 0.0:
            theta = 0.0
        return (phi, theta)

    if len(coords) != 2:
        raise DomainError(f"torus point needs 2 coordinates, got {len(coords)}")
    reduced = []
    for value in coords:
        value = float(value) % 1.0
        reduced.append(0.0 if value >= 1.0 else value)
    return tuple(reduced)


@dataclass(frozen=True)
class ChartPoint:
    """
    A point on one of the model manifolds in chart coordinates.

    Fields:
    - manifold: Circle (theta), UpperSphere (phi, theta) or Torus (x, y)
    - coords: canonicalized chart coordinates
    """

    manifold: Manifold
    coords: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "manifold", Manifold(self.manifold))
        object.__setattr__(
            self, "coords", _canonical_coords(self.manifold, tuple(self.coords))
        )


def circle_point(theta: float) -> ChartPoint:
    return ChartPoint(Manifold.CIRCLE, (theta,))


def sphere_point(phi: float, theta: float) -> ChartPoint:
    return ChartPoint(Manifold.UPPER_SPHERE, (phi, theta))


def torus_point(x: float, y: float) -> ChartPoint:
    return ChartPoint(Manifold.TORUS, (x, y))


@dataclass(frozen=True)
class SphereAngles:
    """
    Latitude / azimuth-gap parametrisation of a pair of sphere points.

    Fields:
    - a: pi/2 - phi of the point nearer the equator
    - b: pi/2 - phi of the other point (b >= a)
    - alpha: azimuth gap in [0, 2 pi)
    """

    a: float
    b: float
    alpha: float

    def __post_init__(self):
        half = math.pi / 2
        if not (-CHART_TOL <= self.a <= self.b + CHART_TOL <= half + 2 * CHART_TOL):
            raise DomainError(f"need 0 <= a <= b <= pi/2, got a={self.a}, b={self.b}")
        if not (0.0 <= self.alpha < TWO_PI):
            raise DomainError(f"azimuth gap {self.alpha} outside [0, 2 pi)")

    @classmethod
    def from_points(cls, p: ChartPoint, q: ChartPoint) -> "SphereAngles":
        if p.manifold is not Manifold.UPPER_SPHERE or q.manifold != p.manifold:
            raise DomainError("SphereAngles needs two UpperSphere points")
        a = math.pi / 2 - p.coords[0]
        b = math.pi / 2 - q.coords[0]
        if b < a:
            a, b = b, a
        alpha = abs(p.coords[1] - q.coords[1])
        return cls(a=a, b=b, alpha=alpha)


# ------------------------------------------------------------------
# Measures
# ------------------------------------------------------------------


@dataclass(frozen=True)
class ContractionMap:
    """Sphere halving map followed by an optional rotation about X or Y."""

    rotation_axis: Optional[str] = None  # "x" | "y" | None
    rotation_angle: float = 0.0


@dataclass
class IFSSpec:
    """
    Iterated function system on the upper hemisphere.

    Fields:
    - maps: contraction descriptors f_1..f_m
    - probabilities: p_1..p_m, positive, summing to 1
    - region: "quarter" restricts seeds/atoms to theta in [0, pi/2]
    """

    maps: List[ContractionMap]
    probabilities: List[float]
    region: Optional[str] = "quarter"


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangle [x_lo, x_hi] x [y_lo, y_hi] with rational corners."""

    x_lo: Fraction
    x_hi: Fraction
    y_lo: Fraction
    y_hi: Fraction

    def center(self) -> Tuple[Fraction, Fraction]:
        return ((self.x_lo + self.x_hi) / 2, (self.y_lo + self.y_hi) / 2)

    def corners(self) -> List[Tuple[Fraction, Fraction]]:
        return [
            (self.x_lo, self.y_lo),
            (self.x_hi, self.y_lo),
            (self.x_lo, self.y_hi),
            (self.x_hi, self.y_hi),
        ]


@dataclass(frozen=True)
class GIFSEdge:
    """Edge e: src -> dst carrying S_e(x) = ratio * x + translation."""

    edge_id: int
    src: int
    dst: int
    translation: Tuple[Fraction, Fraction]
    ratio: Fraction = Fraction(1, 2)
    map_index: Optional[int] = None  # torus map h_m realising the edge


@dataclass
class GIFSSpec:
    """
    Graph-directed IFS on the torus.

    Fields:
    - vertex_sets: rectangle W_i per vertex id
    - edges: directed edges with their similarity maps
    - edge_probabilities: p_e per edge id
    - version: data table version tag
    """

    vertex_sets: Dict[int, Rectangle]
    edges: List[GIFSEdge]
    edge_probabilities: Dict[int, Fraction] = field(default_factory=dict)
    version: str = ""

    def out_edges(self, vertex: int) -> List[GIFSEdge]:
        return [e for e in self.edges if e.src == vertex]


@dataclass
class DiscreteMeasure:
    """
    Weighted atom cloud approximating a finite Borel measure.

    Fields:
    - manifold: manifold of every atom
    - coords: (n, d) chart coordinates
    - weights: (n,) positive weights
    - provenance: "atomic" | "ifs" | "gifs"
    - depth: word depth for IFS/GIFS approximations
    - words: (n, depth) map indices per atom, outermost map first (IFS only)
    - mass_before_normalization: set when the measure was rescaled to mass 1
    """

    manifold: Manifold
    coords: np.ndarray
    weights: np.ndarray
    provenance: str = "atomic"
    depth: Optional[int] = None
    words: Optional[np.ndarray] = None
    mass_before_normalization: Optional[float] = None

    def __len__(self) -> int:
        return int(self.weights.shape[0])

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    @property
    def atoms(self) -> List[Tuple[ChartPoint, float]]:
        return [
            (ChartPoint(self.manifold, tuple(row)), float(w))
            for row, w in zip(self.coords, self.weights)
        ]


@dataclass(frozen=True)
class BallQuery:
    """Open ball B(center, radius)."""

    center: ChartPoint
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"ball radius must be positive, got {self.radius}")


# ------------------------------------------------------------------
# Spectral
# ------------------------------------------------------------------


@dataclass(frozen=True)
class Domain1D:
    """Arc with Dirichlet endpoints, or the full periodic circle."""

    kind: str  # "arc" | "full_circle"
    theta_lo: float = -math.pi
    theta_hi: float = math.pi

    @property
    def periodic(self) -> bool:
        return self.kind == "full_circle"


@dataclass
class Mesh1D:
    """
    Piecewise-linear mesh on an arc or the full circle.

    Arc meshes include both endpoints. Full-circle meshes list nodes in
    [-pi, pi); the closing element runs from the last node to pi == -pi.
    """

    domain: Domain1D
    nodes: np.ndarray

    @property
    def element_count(self) -> int:
        return len(self.nodes) if self.domain.periodic else len(self.nodes) - 1

    @property
    def spacings(self) -> np.ndarray:
        if self.domain.periodic:
            return np.diff(np.append(self.nodes, self.nodes[0] + TWO_PI))
        return np.diff(self.nodes)

    @property
    def free_indices(self) -> np.ndarray:
        if self.domain.periodic:
            return np.arange(len(self.nodes))
        return np.arange(1, len(self.nodes) - 1)


@dataclass
class PencilMatrices:
    """
    Stiffness / measure-mass pencil on the free nodes.

    Fields:
    - stiffness: K, symmetric
    - mass: M, diagonal PSD (atoms sit on nodes)
    - rank: number of free nodes carrying mass
    - mesh: mesh the pencil was assembled on (None for hand-built pencils)
    """

    stiffness: np.ndarray
    mass: np.ndarray
    rank: int
    mesh: Optional[Mesh1D] = None

    @property
    def dimension(self) -> int:
        return int(self.stiffness.shape[0])


@dataclass
class SpectralBasis:
    """
    Finite eigenpairs of the pencil (K, M).

    Fields:
    - eigenvalues: ascending
    - vectors: (free nodes, count) M-orthonormal columns
    - pencil: source pencil
    - shift: sigma used for the reduction
    - max_residual: max_k ||K x_k - lambda_k M x_k||_inf / ||K||_inf
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    pencil: PencilMatrices
    shift: float = 1.0
    max_residual: float = 0.0

    @property
    def count(self) -> int:
        return int(self.eigenvalues.shape[0])

    @property
    def mesh(self) -> Optional[Mesh1D]:
        return self.pencil.mesh


@dataclass
class CoefVec:
    """Complex coefficients a_k of a function in a SpectralBasis."""

    values: np.ndarray
    basis: SpectralBasis

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex).reshape(-1)
        if self.values.shape[0] != self.basis.count:
            raise DomainError(
                f"coefficient length {self.values.shape[0]} != basis count "
                f"{self.basis.count}"
            )

    def __add__(self, other: "CoefVec") -> "CoefVec":
        return CoefVec(self.values + other.values, self.basis)

    def __sub__(self, other: "CoefVec") -> "CoefVec":
        return CoefVec(self.values - other.values, self.basis)

    def scaled(self, factor: complex) -> "CoefVec":
        return CoefVec(self.values * factor, self.basis)


@dataclass
class ForcingTerm:
    """
    Forcing f(t) in coefficient space.

    kind:
    - "zero": f = 0
    - "constant": f(t) = constant for all t
    - "sampled": coefficient rows at strictly increasing times, linear in between
    """

    kind: str = "zero"
    constant: Optional[CoefVec] = None
    times: Optional[np.ndarray] = None
    samples: Optional[np.ndarray] = None
    description: str = "zero"


@dataclass
class NormRecord:
    """Norms of one coefficient vector."""

    mu: float
    dom_e: float
    dual: float
    ealpha: Dict[float, float] = field(default_factory=dict)


@dataclass
class Trajectory:
    """
    Time grid plus coefficient snapshots of an evolution run.

    Fields:
    - equation: wave | heat | schrodinger
    - times: uniform grid 0 = t_0 < ... < t_S = T
    - states: (S+1, count) coefficients of u
    - basis: basis the coefficients refer to
    - velocities: (S+1, count) coefficients of d/dt u (wave only)
    - traces: named norm traces (mu, dom_e, energy, ...)
    """

    equation: Equation
    times: np.ndarray
    states: np.ndarray
    basis: SpectralBasis
    velocities: Optional[np.ndarray] = None
    traces: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return len(self.times) - 1

    def state(self, index: int) -> CoefVec:
        return CoefVec(self.states[index], self.basis)


# ------------------------------------------------------------------
# Semilinear
# ------------------------------------------------------------------


@dataclass(frozen=True)
class Nonlinearity:
    """
    Lipschitz nonlinearity F acting on nodal values at atom nodes.

    Fields:
    - kind: "linear" (scale * u), "sin" (scale * sin u), "tanh" (scale * tanh u)
    - scale: multiplier
    - lipschitz_bound: advisory bound, |scale| when not given
    """

    kind: str = "linear"
    scale: float = 0.0
    lipschitz_bound: Optional[float] = None


@dataclass(frozen=True)
class PicardConfig:
    """Picard iteration controls."""

    tol: float = 1e-10
    max_iter: int = 50
    time_slices: int = 1
    steps_per_slice: int = 64
    max_bisections: int = 8


@dataclass
class PicardReport:
    """
    Iteration history of a Picard run.

    Fields:
    - difference_norms: per-iteration sup-in-t distances, all slices in order
    - contraction_ratios: successive quotients of difference_norms per slice
    - flagged: True when some ratio reached 1
    - slices: one record per converged slice (start, end, iterations)
    - bisections: number of slice bisections performed
    """

    iterations: int = 0
    difference_norms: List[float] = field(default_factory=list)
    contraction_ratios: List[float] = field(default_factory=list)
    flagged: bool = False
    slices: List[Dict[str, Any]] = field(default_factory=list)
    bisections: int = 0


# ------------------------------------------------------------------
# Analysis
# ------------------------------------------------------------------


@dataclass
class DimensionEstimate:
    """
    Finite-scale surrogate for the L-infinity dimension.

    Fields:
    - radii: decreasing ladder actually used
    - sup_masses: sup over centers of mu(B(x, delta)) per radius
    - slope / stderr: regression of ln S on ln delta
    - pointwise_slopes: incremental quotients along the ladder
    - gate: slope - stderr > manifold_dim - 2
    - degenerate: all sup masses equal (ladder carries no scaling information)
    - ladder_floor: minimum distinct inter-atom gap (radii below it dropped)
    """

    radii: np.ndarray
    sup_masses: np.ndarray
    slope: float
    stderr: float
    pointwise_slopes: np.ndarray
    gate: bool
    manifold_dim: int
    degenerate: bool = False
    ladder_floor: float = 0.0


@dataclass
class BiLipschitzReport:
    """Min / max distance ratio of the halving map over a sampling grid."""

    grid: Tuple[int, int, int]
    cutoff: float
    min_ratio: float
    max_ratio: float
    argmin: Tuple[float, float, float]
    argmax: Tuple[float, float, float]
    checkpoints: Dict[str, float] = field(default_factory=dict)
    symmetry_defect: float = 0.0
    counterexamples: List[Tuple[float, float, float, float]] = field(
        default_factory=list
    )

    @property
    def passed(self) -> bool:
        return not self.counterexamples and 0 < self.min_ratio <= self.max_ratio < 1


@dataclass
class ConnectivityResult:
    strongly_connected: bool
    witness: Optional[List[int]] = None


@dataclass
class RegularityReport:
    """Upper s-regularity scan: mu(B(x, r)) <= C r^s on a ladder."""

    s: float
    C: float
    r0: float
    vacuous: bool
    violations: List[Dict[str, float]] = field(default_factory=list)


# ------------------------------------------------------------------
# Oracle
# ------------------------------------------------------------------


@dataclass(frozen=True)
class LinearPiece:
    """value(theta) = intercept + slope * theta on [theta_lo, theta_hi]."""

    theta_lo: float
    theta_hi: float
    intercept: float
    slope: float


@dataclass
class ClosedFormProblem:
    """
    Exact eigen-data of a Dirac-measure problem on the circle.

    Fields:
    - setting: "half_circle" or "full_circle"
    - domain: arc or full circle
    - atoms: (theta, weight) pairs of the measure
    - eigenvalues: exact, ascending
    - eigenfunctions: raw (not mu-normalized) piecewise-linear descriptions
    """

    setting: str
    domain: Domain1D
    atoms: List[Tuple[float, float]]
    eigenvalues: List[float]
    eigenfunctions: List[List[LinearPiece]]


# ------------------------------------------------------------------
# Pipeline
# ------------------------------------------------------------------


@dataclass
class CheckResult:
    """Outcome of one verification check."""

    name: str
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)


@dataclass
class ProblemContext:
    """
    Mutable context passed between pipeline stages.

    Each stage reads what it needs and writes its output into its slot.
    The report slots hold whatever the analysis stages produced, keyed by
    artifact name (dimension, bilipschitz, gifs_check, oracle_compare, ...).
    """

    spec_path: Optional[str] = None
    command: str = "solve"
    out_dir: Optional[str] = None
    seed: Optional[int] = None
    threads: int = 1
    spec: Any = None
    measure: Optional[DiscreteMeasure] = None
    gifs: Optional[GIFSSpec] = None
    basis: Optional[SpectralBasis] = None
    initial: Optional[CoefVec] = None
    initial_velocity: Optional[CoefVec] = None
    forcing: Optional[ForcingTerm] = None
    trajectory: Optional[Trajectory] = None
    picard_report: Optional[PicardReport] = None
    reports: Dict[str, Any] = field(default_factory=dict)
    checks: List[CheckResult] = field(default_factory=list)
    artifacts: Dict[str, str] = field(default_factory=dict)
    errors: List[str] = field(default_factory=list)
    failure: Optional[Dict[str, Any]] = None


@dataclass
class ProblemResult:
    """
    Final result of one command run.

    Fields:
    - exit_code: 0 ok, 1 numeric acceptance failure, 2 validation error
    - failure: machine-readable error record of the failing stage, if any
    """

    spec_path: Optional[str]
    command: str
    name: str
    exit_code: int = 0
    eigenvalues: List[float] = field(default_factory=list)
    checks: List[CheckResult] = field(default_factory=list)
    artifacts: Dict[str, str] = field(default_factory=dict)
    errors: List[str] = field(default_factory=list)
    failure: Optional[Dict[str, Any]] = None
