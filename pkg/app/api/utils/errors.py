"""
Error module.
This module defines the exception hierarchy raised by the verification services.
"""
from typing import Optional, Sequence

class VerificationError(Exception):
    """
    Base class for every error raised by the toolkit.
    """

class InvalidDimensionError(VerificationError, ValueError):
    """
    Raised when a dimension is outside its valid range (e.g. n = 0).
    """

class InvalidParameterError(VerificationError, ValueError):
    """
    Raised when a numeric parameter violates its documented range.
    """

class RadiusOutOfRangeError(VerificationError, ValueError):
    """
    Raised when an average is requested outside (0, R].
    """

class UnsupportedExtraDimensionError(VerificationError, ValueError):
    """
    Raised when a modified heatball is requested with m < 3 (unbounded kernel).
    """

class SingularMapError(VerificationError, ValueError):
    """
    Raised when a linear change of variables is not invertible.
    """

class QuadratureToleranceError(VerificationError):
    """
    Raised when a quadrature does not reach its target tolerance.

    Attributes:
        achieved (float): The last observed relative change.
        target (float): The requested relative tolerance.
    """
    def __init__(self, message: str, achieved: float, target: float):
        super().__init__(f"{message} (achieved {achieved:.3e}, target {target:.3e})")
        self.achieved = achieved
        self.target = target

class EmptyDomainError(VerificationError):
    """
    Raised when a shrunken domain has no interior but a constant needs one.
    """

class ConstantDerivationError(VerificationError):
    """
    Raised when a derived constant disagrees with its closed form.
    """

class OperatorHypothesisError(VerificationError):
    """
    Raised when the operator lower bound (Δu ≥ 1, Hu ≥ 1, Du ≥ 1) fails on the grid.

    Attributes:
        point (Optional[Sequence[float]]): The violating grid point.
        value (Optional[float]): The operator value there.
    """
    def __init__(self, message: str, point: Optional[Sequence[float]] = None, value: Optional[float] = None):
        super().__init__(message)
        self.point = None if point is None else [float(v) for v in point]
        self.value = value
