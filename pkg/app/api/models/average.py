"""
Average family model module.
This module defines the parameterised average family φ:[0,R] → R.
"""
import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.api.models.field import ScalarField
from app.api.schemas.geometry import BoxDomain, DomainLike, Point
from app.api.schemas.quadrature import QuadratureConfig

AverageKind = Literal["ball", "heatball", "modified-heatball"]

class AverageFamily(BaseModel):
    """
    Family of averages of a field about a fixed center.

    Attributes:
        kind (AverageKind): Ball, heatball or modified heatball.
        field (ScalarField): The averaged field.
        center (Point): x, or (x, t) for the parabolic kinds.
        max_radius (float): R; averages are defined for 0 < r <= R.
        extra_dim (int): m for the modified kind.
        domain (Optional[DomainLike]): Where the field is defined; the region at R must fit inside.
        quad (QuadratureConfig): Quadrature settings.
    """
    kind: AverageKind
    field: ScalarField
    center: Point
    max_radius: float = Field(..., gt=0)
    extra_dim: int = Field(3, ge=1)
    domain: Optional[DomainLike] = None
    quad: QuadratureConfig = QuadratureConfig()

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def check_family(self) -> "AverageFamily":
        """
        Validate arity and containment of the largest region.

        Raises:
            ValueError: If the center does not fit the field or the region leaves the domain.
        """
        if len(self.center) != self.field.arity:
            raise ValueError(f"center has {len(self.center)} coordinates, field {self.field.label} takes {self.field.arity}")
        parabolic = self.kind != "ball"
        if parabolic != self.field.is_parabolic:
            raise ValueError(f"{self.kind} averages need a {'parabolic' if parabolic else 'spatial'} field")
        if self.domain is not None and not self.domain.contains_domain(self.bounding_box()):
            raise ValueError("the region at max_radius is not contained in the domain")
        return self

    def bounding_box(self) -> BoxDomain:
        """
        Box containing the region at max_radius.

        Returns:
            BoxDomain: The bounding box.
        """
        R = self.max_radius
        if self.kind == "ball":
            return BoxDomain(lower=tuple(c - R for c in self.center), upper=tuple(c + R for c in self.center))
        n = self.field.spatial_dim
        slice_dim = n + self.extra_dim if self.kind == "modified-heatball" else n
        half = math.sqrt(2.0 * slice_dim * R ** 2 / (4.0 * math.pi * math.e))
        depth = R ** 2 / (4.0 * math.pi)
        x, t = self.center[:-1], self.center[-1]
        return BoxDomain(
            lower=tuple(c - half for c in x) + (t - depth,),
            upper=tuple(c + half for c in x) + (t,),
        )
