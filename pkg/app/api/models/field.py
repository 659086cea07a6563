"""
Scalar field model module.
This module defines the evaluable scalar field used by every service.
"""
from typing import Callable, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

PointFunction = Callable[[np.ndarray], np.ndarray]

class ScalarField(BaseModel):
    """
    Real-valued field on R^n (elliptic) or R^n x R (parabolic, time last).

    Evaluators take an array of shape (..., arity) and return shape (...).

    Attributes:
        arity (int): Number of input coordinates, n or n+1.
        spatial_dim (int): The spatial dimension n.
        evaluator (PointFunction): u itself.
        analytic_laplacian (Optional[PointFunction]): Δu over the spatial coordinates.
        analytic_heat (Optional[PointFunction]): Hu = Δ_x u - ∂_t u.
        analytic_dethess (Optional[PointFunction]): Du = (u_xy)^2 - u_xx u_yy.
        label (str): Catalog name and parameters.
    """
    arity: int = Field(..., ge=1)
    spatial_dim: int = Field(..., ge=1)
    evaluator: PointFunction
    analytic_laplacian: Optional[PointFunction] = None
    analytic_heat: Optional[PointFunction] = None
    analytic_dethess: Optional[PointFunction] = None
    label: str = "field"

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @property
    def is_parabolic(self) -> bool:
        return self.arity == self.spatial_dim + 1

    def __call__(self, points: Union[np.ndarray, list, tuple]) -> Union[np.ndarray, float]:
        """
        Evaluate the field.

        Args:
            points: A single point of length arity or an array (..., arity).

        Returns:
            The values; a float for a single point.
        """
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.arity:
            raise ValueError(f"{self.label} expects points with {self.arity} coordinates, got {points.shape[-1]}")
        values = np.broadcast_to(self.evaluator(points), points.shape[:-1])
        if points.ndim == 1:
            return float(values)
        return np.asarray(values, dtype=float)
