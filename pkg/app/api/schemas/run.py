"""
Run configuration schema module.
This module defines the validated configuration shared by the CLI and the
HTTP surface.
"""
import math
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from app.api.models.average import AverageKind
from app.api.schemas.fields import FamilySpec
from app.api.schemas.geometry import BoxDomain, Domain, Point
from app.api.schemas.quadrature import QuadratureConfig
from app.api.schemas.reports import format_exponent
from app.api.utils.settings import DEFAULT_SEED, SAFETY_FACTOR

Command = Literal[
    "check-inequality",
    "sweep-gressman",
    "verify-derivatives",
    "constants",
    "heatball-volume",
    "lifting-check",
    "cov-check",
    "rectangle-demo",
]

COMMANDS: List[str] = list(Command.__args__)

OperatorName = Literal["laplacian", "heat", "dethess"]

def parse_exponent(value) -> float:
    """
    Parse an exponent, accepting "inf" and "∞" for p = ∞.

    Args:
        value: A number or string.

    Returns:
        float: The exponent.
    """
    if isinstance(value, str) and value.strip().lower() in {"inf", "infinity", "∞"}:
        return math.inf
    return float(value)

class RunConfig(BaseModel):
    """
    Schema for one verification run.

    Attributes:
        command (Command): The run to perform.
        field (Optional[FamilySpec]): The field under test.
        fields (List[FamilySpec]): Fields for derivative checks.
        domain (Optional[Domain]): Ω; defaults to the unit box of the field's arity.
        second_domain (Optional[Domain]): Ω₂ of the lifting check.
        p (List[float]): Exponents in [1, ∞].
        operator (Optional[OperatorName]): The hypothesis operator; defaults by field.
        kind (AverageKind): Average family for derivative checks.
        center (Optional[Point]): Average center for derivative checks.
        max_radius (float): R for derivative checks.
        tolerance (Optional[float]): Derivative-check tolerance.
        m (int): Extra dimension count of the heat constant.
        c (Optional[float]): User-supplied constant; derived when absent.
        delta (Optional[float]): Fixed δ for the Laplace constant.
        R (Optional[float]): Fixed R for the heat constant.
        safety (float): Constant safety factor.
        N_min (int): First swept frequency.
        N_max (int): Last swept frequency.
        deltas (List[float]): δ values of the rectangle demo.
        dims (List[int]): Dimensions of the heatball volume table.
        radii (List[float]): Radii of the heatball volume table.
        linear_map (Optional[List[List[float]]]): Matrix of the change of variables.
        sublevel_constant (Optional[float]): C of a sublevel estimate |{|u| <= ε}| <= C ε^δ.
        sublevel_exponent (Optional[float]): δ of that sublevel estimate.
        quadrature (QuadratureConfig): Quadrature settings.
        resolution (Optional[int]): Level-set grid cells per axis.
        seed (int): Seed of the Monte Carlo cross-check.
        out (Optional[str]): Output directory for report files.
    """
    command: Command = Field(..., description="Subcommand to run")
    field: Optional[FamilySpec] = Field(None, description="Field under test")
    fields: List[FamilySpec] = Field(default_factory=list, description="Fields for derivative checks")
    domain: Optional[Domain] = Field(None, description="Domain Ω, shape 'box' or 'ball'")
    second_domain: Optional[Domain] = Field(None, description="Second factor Ω₂ of the lifting check")
    p: List[float] = Field(default_factory=lambda: [1.0, 2.0, 4.0, math.inf], min_length=1, description="Exponents; 'inf' allowed")
    operator: Optional[OperatorName] = Field(None, description="Operator of the hypothesis Du >= 1")
    kind: AverageKind = Field("ball", description="Average family for derivative checks")
    center: Optional[Point] = Field(None, description="Average center for derivative checks")
    max_radius: float = Field(1.0, gt=0, description="Largest radius for derivative checks")
    tolerance: Optional[float] = Field(None, gt=0, description="Derivative-check tolerance")
    m: int = Field(3, ge=3, description="Extra dimension count for modified heatballs")
    c: Optional[float] = Field(None, gt=0, description="User-supplied constant")
    delta: Optional[float] = Field(None, gt=0, description="Fixed δ for the Laplace constant")
    R: Optional[float] = Field(None, gt=0, description="Fixed R for the heat constant")
    safety: float = Field(SAFETY_FACTOR, gt=0, lt=1, description="Safety factor applied to derived constants")
    N_min: int = Field(1, ge=1, description="First swept frequency")
    N_max: int = Field(40, ge=1, description="Last swept frequency")
    deltas: List[float] = Field(default_factory=lambda: [0.1, 0.05, 0.01], min_length=1, description="Rectangle demo δ values")
    dims: List[int] = Field(default_factory=lambda: [1, 2, 3], min_length=1, description="Heatball volume dimensions")
    radii: List[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0], min_length=1, description="Heatball volume radii")
    linear_map: Optional[List[List[float]]] = Field(None, description="Matrix A of φ(x) = A x")
    sublevel_constant: Optional[float] = Field(None, gt=0, description="C of a sublevel estimate")
    sublevel_exponent: Optional[float] = Field(None, gt=0, description="δ of a sublevel estimate")
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig, description="Quadrature settings")
    resolution: Optional[int] = Field(None, ge=8, description="Level-set grid cells per axis")
    seed: int = Field(DEFAULT_SEED, ge=0, description="Monte Carlo seed")
    out: Optional[str] = Field(None, description="Output directory")

    model_config = ConfigDict(extra="forbid")

    @field_validator("p", mode="before")
    def parse_exponents(cls, v):
        if isinstance(v, (int, float, str)):
            v = [v]
        return [parse_exponent(item) for item in v]

    @field_validator("p")
    def check_exponents(cls, v):
        for p in v:
            if not p >= 1:
                raise ValueError(f"every exponent must be at least 1, got {p}")
        return v

    @field_validator("deltas")
    def check_deltas(cls, v):
        for delta in v:
            if not 0 < delta < 0.5:
                raise ValueError(f"rectangle demo δ must lie in (0, 1/2), got {delta}")
        return v

    @field_validator("dims")
    def check_dims(cls, v):
        if any(n < 1 for n in v):
            raise ValueError("dimensions must be positive")
        return v

    @field_validator("radii")
    def check_radii(cls, v):
        if any(r <= 0 for r in v):
            raise ValueError("radii must be positive")
        return v

    @field_serializer("p")
    def serialize_p(self, p: List[float]):
        return [format_exponent(value) for value in p]

    @model_validator(mode="after")
    def check_command(self) -> "RunConfig":
        """
        Validate the inputs each command needs.

        Raises:
            ValueError: If a required input is missing or inconsistent.
        """
        if self.command in {"check-inequality", "lifting-check", "cov-check"} and self.field is None:
            raise ValueError(f"{self.command} needs a field")
        if self.command == "verify-derivatives" and self.field is None and not self.fields:
            raise ValueError("verify-derivatives needs a field or a list of fields")
        if self.command == "sweep-gressman" and self.N_min > self.N_max:
            raise ValueError("N_min must not exceed N_max")
        if self.command == "lifting-check":
            if self.second_domain is None:
                raise ValueError("lifting-check needs a second_domain")
            if not isinstance(self.second_domain, BoxDomain) or (self.domain is not None and not isinstance(self.domain, BoxDomain)):
                raise ValueError("lifting-check works on box domains")
        if self.command == "cov-check":
            if self.linear_map is None:
                raise ValueError("cov-check needs a linear_map")
            size = len(self.linear_map)
            if size == 0 or any(len(row) != size for row in self.linear_map):
                raise ValueError("linear_map must be a square matrix")
        if (self.sublevel_constant is None) != (self.sublevel_exponent is None):
            raise ValueError("sublevel_constant and sublevel_exponent go together")
        return self
