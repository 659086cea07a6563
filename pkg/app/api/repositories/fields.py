"""
Field repository module.
This module provides the catalog mapping family names to field factories.
"""
from typing import Dict, Union

from app.api.models.field import ScalarField
from app.api.repositories.base import BaseRepository
from app.api.schemas.fields import FamilySpec
from app.api.services import fields as field_service
from app.api.utils.errors import InvalidParameterError, VerificationError

def _integer(value: Union[float, str], name: str) -> int:
    number = float(value)
    if not number.is_integer():
        raise ValueError(f"{name} must be an integer, got {value}")
    return int(number)

def _quadratic_plus_harmonic(n: float = 2, a: float = 1.0) -> ScalarField:
    n = _integer(n, "n")
    return field_service.add(field_service.make_quadratic(n), field_service.make_harmonic(n, float(a)))

def _drift_plus_caloric(n: float = 1) -> ScalarField:
    n = _integer(n, "n")
    return field_service.add(field_service.make_heat_witness(n, "drift"), field_service.make_heat_witness(n, "caloric"))

class FieldRepository(BaseRepository[ScalarField]):
    """
    Field repository.
    Resolves FamilySpec requests from run configs into ScalarField objects.
    """
    def __init__(self):
        """
        Initialize the catalog with every built-in family.
        """
        super().__init__("field family")
        dimensional = {
            "quadratic": field_service.make_quadratic,
            "exponential": field_service.make_exponential,
            "trig": field_service.make_trig,
            "quartic": field_service.make_quartic,
            "gaussian": field_service.make_gaussian,
            "cubic": field_service.make_cubic,
            "heat-polynomial": field_service.make_heat_polynomial,
            "heat-trig": field_service.make_heat_trig,
        }
        for name, factory in dimensional.items():
            self.register(name, lambda n=2, _factory=factory: _factory(_integer(n, "n")))
        self.register("harmonic", lambda n=2, a=1.0: field_service.make_harmonic(_integer(n, "n"), float(a)))
        self.register("quadratic-harmonic", _quadratic_plus_harmonic)
        self.register("quadratic-shifted", lambda n=2, c0=0.0: field_service.shift(field_service.make_quadratic(_integer(n, "n")), -float(c0)))
        self.register("heat-witness", lambda n=1, kind="drift", c0=0.0: field_service.make_heat_witness(_integer(n, "n"), str(kind), float(c0)))
        self.register("drift", lambda n=1: field_service.make_heat_witness(_integer(n, "n"), "drift"))
        self.register("caloric", lambda n=1: field_service.make_heat_witness(_integer(n, "n"), "caloric"))
        self.register("shifted-drift", lambda n=1, c0=0.0: field_service.make_heat_witness(_integer(n, "n"), "shifted", float(c0)))
        self.register("drift-caloric", _drift_plus_caloric)
        self.register("gressman", lambda N=1: field_service.make_gressman(_integer(N, "N")))
        self.register("constant", lambda value=0.0, n=2, parabolic=0: field_service.make_constant(float(value), _integer(n, "n"), bool(float(parabolic))))

    def resolve(self, spec: FamilySpec) -> ScalarField:
        """
        Build the field a FamilySpec names.

        Args:
            spec (FamilySpec): Family name and parameters.

        Returns:
            ScalarField: The field.
        """
        params: Dict[str, Union[float, str]] = dict(spec.params)
        try:
            return self.create(spec.family, **params)
        except VerificationError:
            raise
        except ValueError as exc:
            raise InvalidParameterError(str(exc)) from exc

# Create instance
field_repository = FieldRepository()
