import pytest

from app.api.schemas.geometry import BallDomain, unit_box
from app.api.schemas.quadrature import QuadratureConfig
from app.api.services.fields import make_quadratic


@pytest.fixture
def quad():
    return QuadratureConfig()


@pytest.fixture
def square():
    return unit_box(2)


@pytest.fixture
def disc():
    return BallDomain(center=(0.0, 0.0), radius=1.0)


@pytest.fixture
def quadratic2():
    return make_quadratic(2)
