"""
Base service module.
This module provides base classes for services with the Strategy pattern.
"""
from abc import ABC, abstractmethod
from typing import Generic, Sequence, TypeVar

from pydantic import BaseModel

from app.api.models.field import ScalarField
from app.api.schemas.quadrature import QuadratureConfig
from app.api.schemas.reports import DerivativeEstimate

# Define a type variable for the region each strategy averages over
SpecType = TypeVar("SpecType", bound=BaseModel)

class ServiceStrategy(ABC, Generic[SpecType]):
    """
    Abstract base class for average strategies.
    Each strategy owns one region family and its derivative formula.
    """
    kind: str = "abstract"

    @abstractmethod
    def region(self, center: Sequence[float], radius: float) -> SpecType:
        """
        Build the region of radius r about a center.

        Returns:
            The region spec.
        """

    @abstractmethod
    def average(self, field: ScalarField, center: Sequence[float], radius: float, quad: QuadratureConfig) -> float:
        """
        Evaluate φ(r).

        Returns:
            The normalised weighted integral of the field.
        """

    @abstractmethod
    def derivative(
        self, field: ScalarField, center: Sequence[float], radius: float, quad: QuadratureConfig
    ) -> DerivativeEstimate:
        """
        Evaluate φ'(r) from the operator-weighted formula.

        Returns:
            The derivative and whether finite differences were used.
        """

class BaseService(Generic[SpecType]):
    """
    Base service class.
    Delegates region-specific work to the current strategy.
    """
    def __init__(self, strategy: ServiceStrategy[SpecType]):
        """
        Initialize with a strategy.

        Args:
            strategy: The strategy to use.
        """
        self._strategy = strategy

    @property
    def strategy(self) -> ServiceStrategy[SpecType]:
        """
        Get the current strategy.

        Returns:
            The strategy.
        """
        return self._strategy

    def set_strategy(self, strategy: ServiceStrategy[SpecType]):
        """
        Set the strategy.

        Args:
            strategy: The strategy to use.
        """
        self._strategy = strategy
