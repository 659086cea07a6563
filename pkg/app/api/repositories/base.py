"""
Base repository module.
This module provides a generic in-memory registry of named factories.
"""
from typing import Callable, Dict, Generic, List, Optional, TypeVar

from app.api.utils.errors import InvalidParameterError

# Define a type variable for the produced objects
ModelType = TypeVar("ModelType")

class BaseRepository(Generic[ModelType]):
    """
    Base repository for named factories.
    Implements lookup, listing and registration.
    """
    def __init__(self, kind: str):
        """
        Initialize an empty registry.

        Args:
            kind: What the registry holds, used in error messages.
        """
        self.kind = kind
        self._factories: Dict[str, Callable[..., ModelType]] = {}

    def register(self, name: str, factory: Callable[..., ModelType]) -> None:
        """
        Register a factory under a name.

        Args:
            name: The lookup name.
            factory: Callable producing the object from keyword parameters.
        """
        self._factories[name] = factory

    def get(self, name: str) -> Optional[Callable[..., ModelType]]:
        """
        Get a factory by name.

        Args:
            name: The lookup name.

        Returns:
            The factory if found, None otherwise.
        """
        return self._factories.get(name)

    def get_all(self) -> List[str]:
        """
        Get all registered names in sorted order.

        Returns:
            List of names.
        """
        return sorted(self._factories)

    def create(self, name: str, **params) -> ModelType:
        """
        Build an object from a registered factory.

        Args:
            name: The lookup name.
            **params: Factory parameters.

        Returns:
            The created object.

        Raises:
            InvalidParameterError: If the name is unknown or the parameters do not fit.
        """
        factory = self.get(name)
        if factory is None:
            raise InvalidParameterError(f"unknown {self.kind} {name!r}; known: {', '.join(self.get_all())}")
        try:
            return factory(**params)
        except TypeError as exc:
            raise InvalidParameterError(f"bad parameters for {self.kind} {name!r}: {exc}") from exc
