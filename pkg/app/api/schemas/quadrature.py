"""
Quadrature schema module.
This module defines Pydantic schemas for quadrature settings and weighted regions.
"""
from enum import Enum
from typing import Union

from pydantic import BaseModel, ConfigDict, Field

from app.api.schemas.geometry import BallSpec, HeatballSpec, ModifiedHeatballSpec

class Weight(str, Enum):
    """
    Named weight functions for region integrals.
    """
    UNIT = "unit"
    HEATBALL_KERNEL = "heatball-kernel"
    LOG_KERNEL = "log-kernel"
    MODIFIED_KERNEL = "modified-kernel"

class QuadratureConfig(BaseModel):
    """
    Schema for quadrature settings.

    Attributes:
        slice_count (int): Depth nodes per heatball integral.
        radial_points (int): Radial nodes per slice or ball.
        angular_points (int): Angular order of the sphere rule.
        grading_exponent (float): Exponent γ of the graded depth grid d_k = (k/K)^γ r²/4π.
        target_rel_tol (float): Relative change allowed between refinement levels.
        max_refinements (int): Refinement levels tried before giving up.
        scan_points (int): Grid points per axis for maximum scans.
    """
    slice_count: int = Field(24, ge=2, le=512, description="Depth nodes per heatball integral")
    radial_points: int = Field(8, ge=1, le=512, description="Radial nodes per slice")
    angular_points: int = Field(6, ge=1, le=64, description="Angular order of sphere rules")
    grading_exponent: float = Field(2.0, ge=1.0, description="Depth grading exponent for scans")
    target_rel_tol: float = Field(1e-9, gt=0, lt=1, description="Relative refinement tolerance")
    max_refinements: int = Field(3, ge=1, le=8, description="Maximum refinement levels")
    scan_points: int = Field(41, ge=5, le=401, description="Scan grid points per axis")

    model_config = ConfigDict(frozen=True, extra="forbid")

    def refined(self, level: int) -> "QuadratureConfig":
        """
        Get the configuration for a refinement level.

        Slice and radial counts double per level; the angular order grows by 2.

        Args:
            level (int): The refinement level, 0 being the base rule.

        Returns:
            QuadratureConfig: The refined configuration.
        """
        if level == 0:
            return self
        return self.model_copy(update={
            "slice_count": self.slice_count * 2 ** level,
            "radial_points": self.radial_points * 2 ** level,
            "angular_points": self.angular_points + 2 * level,
        })

class WeightedRegion(BaseModel):
    """
    Region paired with a named weight.

    Attributes:
        region: A ball, heatball or modified heatball.
        weight (Weight): The weight integrated against.
    """
    region: Union[ModifiedHeatballSpec, HeatballSpec, BallSpec]
    weight: Weight = Weight.UNIT

    model_config = ConfigDict(frozen=True)
