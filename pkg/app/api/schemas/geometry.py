"""
Geometry schema module.
This module defines Pydantic schemas for balls, heatballs, modified heatballs
and the bounded domains on which inequalities are verified.
"""
from typing import Annotated, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.special import gamma

Point = Tuple[float, ...]

class BallSpec(BaseModel):
    """
    Euclidean ball B_r(x).

    Attributes:
        center (Point): The center x in R^n.
        radius (float): The radius r > 0.
    """
    center: Point = Field(..., description="Ball center", min_length=1)
    radius: float = Field(..., gt=0, description="Ball radius")

    model_config = ConfigDict(frozen=True)

    @property
    def dim(self) -> int:
        return len(self.center)

class HeatballSpec(BaseModel):
    """
    Heatball E(x,t;r) = {(y,s): s <= t, Φ(x-y,t-s) >= 1/r^n} ∪ {(x,t)}.

    Attributes:
        center (Point): The center (x, t); the last coordinate is time.
        radius (float): The radius r > 0.
    """
    center: Point = Field(..., description="Center (x..., t)", min_length=2)
    radius: float = Field(..., gt=0, description="Heatball radius")

    model_config = ConfigDict(frozen=True)

    @property
    def spatial_dim(self) -> int:
        return len(self.center) - 1

    @property
    def x(self) -> np.ndarray:
        return np.asarray(self.center[:-1], dtype=float)

    @property
    def t(self) -> float:
        return float(self.center[-1])

    @property
    def time_extent(self) -> float:
        """Maximal depth t - s of a member, r^2 / 4π."""
        return self.radius ** 2 / (4.0 * np.pi)

class ModifiedHeatballSpec(HeatballSpec):
    """
    (n,m)-modified heatball E_m(x,t;r): projection of the (n+m)-dimensional
    heatball onto the last n+1 coordinates.

    Attributes:
        extra_dim (int): The number m of integrated-out spatial variables.
    """
    extra_dim: int = Field(..., ge=1, description="Extra dimension count m")

    @property
    def total_dim(self) -> int:
        return self.spatial_dim + self.extra_dim

class BoxDomain(BaseModel):
    """
    Axis-aligned box prod_i [lower_i, upper_i].
    """
    shape: Literal["box"] = "box"
    lower: Point = Field(..., min_length=1)
    upper: Point = Field(..., min_length=1)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_bounds(self) -> "BoxDomain":
        """
        Validate that every axis interval is nonempty.

        Raises:
            ValueError: If lengths differ or an interval is degenerate.
        """
        if len(self.lower) != len(self.upper):
            raise ValueError("lower and upper must have the same length")
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("every axis needs lower < upper")
        return self

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def is_empty(self) -> bool:
        return False

    def measure(self) -> float:
        return float(np.prod(np.subtract(self.upper, self.lower)))

    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.lower, dtype=float), np.asarray(self.upper, dtype=float)

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        lower, upper = self.bounding_box()
        return np.all((points >= lower) & (points <= upper), axis=-1)

    def contains_domain(self, other: "DomainLike") -> bool:
        if other.is_empty:
            return True
        lower, upper = other.bounding_box()
        return bool(np.all(lower >= np.asarray(self.lower)) and np.all(upper <= np.asarray(self.upper)))

class BallDomain(BaseModel):
    """
    Euclidean ball domain.
    """
    shape: Literal["ball"] = "ball"
    center: Point = Field(..., min_length=1)
    radius: float = Field(..., gt=0)

    model_config = ConfigDict(frozen=True)

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def is_empty(self) -> bool:
        return False

    def measure(self) -> float:
        d = self.dim
        return float(np.pi ** (d / 2.0) / gamma(d / 2.0 + 1.0)) * self.radius ** d

    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        center = np.asarray(self.center, dtype=float)
        return center - self.radius, center + self.radius

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return np.linalg.norm(points - np.asarray(self.center), axis=-1) <= self.radius

    def contains_domain(self, other: "DomainLike") -> bool:
        if other.is_empty:
            return True
        if isinstance(other, BallDomain):
            gap = float(np.linalg.norm(np.subtract(other.center, self.center)))
            return gap + other.radius <= self.radius * (1.0 + 1e-12)
        lower, upper = other.bounding_box()
        corners = np.array(np.meshgrid(*zip(lower, upper), indexing="ij")).reshape(len(lower), -1).T
        return bool(np.all(self.contains(corners)))

class EmptyDomain(BaseModel):
    """
    Marker for a domain shrunk to nothing; its measure is zero.
    """
    shape: Literal["empty"] = "empty"
    dim: int = Field(..., ge=1)

    model_config = ConfigDict(frozen=True)

    @property
    def is_empty(self) -> bool:
        return True

    def measure(self) -> float:
        return 0.0

    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.zeros(self.dim), np.zeros(self.dim)

    def contains(self, points: np.ndarray) -> np.ndarray:
        return np.zeros(np.asarray(points).shape[:-1], dtype=bool)

    def contains_domain(self, other: "DomainLike") -> bool:
        return other.is_empty

DomainLike = Union[BoxDomain, BallDomain, EmptyDomain]
Domain = Annotated[DomainLike, Field(discriminator="shape")]

def unit_box(dim: int) -> BoxDomain:
    """
    Build [0, 1]^dim.

    Args:
        dim (int): The dimension.

    Returns:
        BoxDomain: The unit box.
    """
    return BoxDomain(lower=(0.0,) * dim, upper=(1.0,) * dim)

class Rectangle(BaseModel):
    """
    Closed rectangle [x0, x1] x [t0, t1].
    """
    x0: float
    x1: float
    t0: float
    t1: float

    model_config = ConfigDict(frozen=True)

    @field_validator("x1", "t1")
    def positive_extent(cls, v, info):
        lower = info.data.get("x0" if info.field_name == "x1" else "t0")
        if lower is not None and v <= lower:
            raise ValueError("rectangle sides must have positive length")
        return v

    def area(self) -> float:
        return (self.x1 - self.x0) * (self.t1 - self.t0)
