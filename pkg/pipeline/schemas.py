"""
Pydantic schemas for problem spec files.

A problem spec is a JSON document naming the measure, the spectral domain,
the equation and its data, plus the parameters of the analysis commands.
Every model rejects unknown fields.
"""

from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


Rational = Union[int, float, str, List[int]]


class ContractionSpec(StrictModel):
    """One hemisphere contraction: halving map, then an optional axis rotation."""

    rotation_axis: Optional[Literal["x", "y"]] = None
    rotation_angle: float = 0.0


class EdgeSpec(StrictModel):
    """A GIFS edge: x -> ratio * x + translation from vertex set src into dst."""

    id: int = Field(ge=1)
    src: int
    dst: int
    translation: Tuple[Rational, Rational]
    ratio: Rational = "1/2"
    map: Optional[int] = None


class MeasureSpec(StrictModel):
    """
    type:
    - dirac: atoms (chart coordinates) with positive weights on `manifold`
    - ifs: hemisphere IFS at `depth`, seeded at `seed_point`; `maps` default
      to the three-map system and `probabilities` to uniform
    - gifs: torus GIFS at `depth`; `edges` default to the versioned table,
      `edge_probabilities` override the uniform per-vertex row entries
    """

    type: Literal["dirac", "ifs", "gifs"] = "dirac"
    manifold: Literal["circle", "upper_sphere", "torus"] = "circle"
    atoms: List[List[float]] = Field(default_factory=list)
    weights: Optional[List[float]] = None
    depth: int = Field(default=6, ge=0, le=14)
    seed_point: List[float] = Field(default_factory=lambda: [0.0, 0.0])
    maps: Optional[List[ContractionSpec]] = None
    probabilities: Optional[List[float]] = None
    table: Optional[str] = None
    translations: Literal["induced", "printed"] = "induced"
    edges: Optional[List[EdgeSpec]] = None
    edge_probabilities: Dict[int, Rational] = Field(default_factory=dict)
    remove_edges: List[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_atoms(self):
        if self.type == "dirac":
            if not self.atoms:
                raise ValueError("a dirac measure needs at least one atom")
            if self.weights is not None and len(self.weights) != len(self.atoms):
                raise ValueError("weights and atoms differ in length")
        if self.type == "ifs" and self.maps is not None and not self.maps:
            raise ValueError("an ifs measure needs at least one map")
        if self.type == "gifs" and self.edges is not None and not self.edges:
            raise ValueError("a gifs measure needs at least one edge")
        return self


class DomainSpec(StrictModel):
    kind: Literal["arc", "full_circle"] = "arc"
    theta_lo: float = -1.5707963267948966
    theta_hi: float = 1.5707963267948966
    resolution: int = Field(default=16, ge=2)
    shift: float = Field(default=1.0, gt=0)


class EquationSpec(StrictModel):
    kind: Literal["wave", "heat", "schrodinger"]
    T: float = Field(gt=0)
    steps: int = Field(ge=1)
    sample_times: List[float] = Field(default_factory=list)
    alphas: List[float] = Field(default_factory=lambda: [0.0, 1.0, 2.0])

    @field_validator("alphas")
    @classmethod
    def _non_negative(cls, value: List[float]) -> List[float]:
        if any(a < 0 for a in value):
            raise ValueError("alpha must be >= 0")
        return value


class InitialDataSpec(StrictModel):
    """
    kind:
    - oracle: closed-form data of `setting` with `params` (c, c1, c2)
    - nodal: values on the mesh nodes (`g`, `g_imag`, `h`)
    - coefficients: eigen-coefficients (`g`, `g_imag`, `h`)
    - zero: g = h = 0
    """

    kind: Literal["oracle", "nodal", "coefficients", "zero"] = "zero"
    setting: Optional[Literal["half_circle", "full_circle"]] = None
    params: Dict[str, float] = Field(default_factory=dict)
    g: List[float] = Field(default_factory=list)
    g_imag: List[float] = Field(default_factory=list)
    h: List[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_setting(self):
        if self.kind == "oracle" and self.setting is None:
            raise ValueError("oracle initial data needs a setting")
        if self.g_imag and len(self.g_imag) != len(self.g):
            raise ValueError("g_imag and g differ in length")
        return self


class ForcingSpec(StrictModel):
    """
    kind:
    - zero
    - oracle: the forcing of the oracle setting (uses the initial data params)
    - nodal: time-independent nodal values on the mesh
    - coefficients: time-independent eigen-coefficients
    """

    kind: Literal["zero", "oracle", "nodal", "coefficients"] = "zero"
    values: List[float] = Field(default_factory=list)


class NonlinearitySpec(StrictModel):
    kind: Literal["linear", "sin", "tanh"] = "linear"
    scale: float = 0.0


class PicardSpec(StrictModel):
    tol: float = Field(default=1e-10, gt=0)
    max_iter: int = Field(default=50, ge=1)
    time_slices: int = Field(default=1, ge=1)
    steps_per_slice: int = Field(default=64, ge=2)
    max_bisections: int = Field(default=8, ge=0)


class DimensionSpec(StrictModel):
    delta0: float = Field(default=0.4, gt=0)
    rho: float = Field(default=0.6, gt=0, lt=1)
    levels: int = Field(default=8, ge=3)
    manifold_dim: Optional[int] = Field(default=None, ge=1)


class RegularitySpec(StrictModel):
    c: float = Field(default=0.5, gt=0, lt=1)
    p: float = Field(default=0.25, gt=0, lt=1)
    t: int = Field(default=12, ge=1)
    r0: Optional[float] = Field(default=None, gt=0)


class ScanSpec(StrictModel):
    grid: Tuple[int, int, int] = (64, 64, 128)
    cutoff: float = Field(default=1e-3, gt=0)


class VerifySpec(StrictModel):
    """
    checks: names to run, in report order (all when empty)
    fault_index / fault_scale: multiply one eigenvalue before evolving
    remove_edges: GIFS edge ids dropped for the connectivity check
    """

    checks: List[str] = Field(default_factory=list)
    fault_index: Optional[int] = Field(default=None, ge=0)
    fault_scale: float = 1.0
    remove_edges: List[int] = Field(default_factory=list)
    T: float = Field(default=2.0, gt=0)
    steps: int = Field(default=256, ge=8)
    tolerance: float = Field(default=1e-10, gt=0)
    refinement_steps: int = Field(default=64, ge=8)
    random_graphs: int = Field(default=50, ge=0)


class ProblemSpec(StrictModel):
    name: str
    measure: Optional[MeasureSpec] = None
    domain: DomainSpec = Field(default_factory=DomainSpec)
    equation: Optional[EquationSpec] = None
    initial_data: InitialDataSpec = Field(default_factory=InitialDataSpec)
    forcing: ForcingSpec = Field(default_factory=ForcingSpec)
    nonlinearity: Optional[NonlinearitySpec] = None
    picard: PicardSpec = Field(default_factory=PicardSpec)
    dimension: DimensionSpec = Field(default_factory=DimensionSpec)
    regularity: Optional[RegularitySpec] = None
    scan: ScanSpec = Field(default_factory=ScanSpec)
    verify: VerifySpec = Field(default_factory=VerifySpec)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_combination(self):
        if self.forcing.kind == "oracle" and self.initial_data.kind != "oracle":
            raise ValueError("oracle forcing needs oracle initial data")
        return self
