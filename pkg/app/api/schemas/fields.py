"""
Field schema module.
This module defines Pydantic schemas for field family requests and the
rectangle family of the Runge construction.
"""
from typing import Dict, List, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.api.schemas.geometry import Rectangle

class FamilySpec(BaseModel):
    """
    Schema for a catalog field request.

    Attributes:
        family (str): Catalog name, e.g. "quadratic" or "gressman".
        params (Dict[str, float]): Numeric parameters such as n, N, c0 or kind.
    """
    family: str = Field(..., min_length=1, description="Catalog family name")
    params: Dict[str, Union[float, str]] = Field(default_factory=dict, description="Family parameters")

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("family")
    def normalise_family(cls, v):
        return v.strip().lower().replace("_", "-")

class RectangleFamily(BaseModel):
    """
    The disjoint rectangles K(δ) inside [0,1]^2 and the quantities reported about them.

    Attributes:
        delta (float): δ in (0, 1/2).
        rectangles (List[Rectangle]): The rectangles, bottom to top.
        count (int): floor((4 - δ^2) / (4δ + δ^2)).
        measure (float): δ (1 - δ/2) count.
        bound (float): 1 - 2δ, which the measure exceeds.
        budget (float): 2δ + δ^2/8, the approximation accuracy a Runge approximant targets.
        gap (float): δ^2/4, the vertical separation.
    """
    delta: float = Field(..., gt=0, lt=0.5)
    rectangles: List[Rectangle]
    count: int = Field(..., ge=1)
    measure: float = Field(..., gt=0)
    bound: float
    budget: float
    gap: float

    model_config = ConfigDict(frozen=True)
