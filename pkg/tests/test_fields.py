import math

import numpy as np

from hypothesis import given, settings
from hypothesis.strategies import floats
from pytest import approx, mark, raises

from app.api.repositories.fields import field_repository
from app.api.schemas.fields import FamilySpec
from app.api.services.fields import (
    add,
    compose_linear,
    finite_difference_operator,
    lift,
    make_constant,
    make_gressman,
    make_heat_witness,
    make_quadratic,
    make_rectangle_family,
    operator_function,
    shift,
)
from app.api.utils.errors import InvalidDimensionError, InvalidParameterError

ELLIPTIC = ("quadratic", "exponential", "trig", "quartic", "gaussian", "cubic", "harmonic", "quadratic-harmonic")
PARABOLIC = ("heat-polynomial", "heat-trig", "drift", "caloric", "shifted-drift", "drift-caloric")


def test_quadratic_values():
    assert make_quadratic(2)([1.0, 1.0]) == approx(0.5)
    assert make_quadratic(1)([3.0]) == approx(4.5)
    laplacian, degraded = operator_function(make_quadratic(3), "laplacian")
    assert not degraded
    assert np.all(laplacian(np.zeros((4, 3))) == 1.0)


def test_heat_witnesses():
    point = [0.0, 2.0]
    assert make_heat_witness(1, "drift")(point) == approx(-2.0)
    assert make_heat_witness(1, "shifted", 5.0)(point) == approx(3.0)
    assert operator_function(make_heat_witness(1, "drift"), "heat")[0](np.array([point]))[0] == 1.0
    assert operator_function(make_heat_witness(1, "caloric"), "heat")[0](np.array([point]))[0] == 0.0


def test_unknown_heat_witness_kind():
    with raises(InvalidParameterError):
        make_heat_witness(1, "wave")


def test_gressman_values():
    u = make_gressman(1)
    assert u([0.0, math.pi / 2]) == approx(1.0)
    dethess, _ = operator_function(u, "dethess")
    assert dethess(np.array([[0.0, 0.0]]))[0] == approx(1.0)


def test_gressman_rejects_bad_frequency():
    with raises(InvalidParameterError):
        make_gressman(0)


def test_gressman_grid_maximum():
    axis = np.linspace(0.0, 1.0, 1001)
    grid = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1)
    assert np.max(np.abs(make_gressman(3)(grid))) == approx(math.e / 3, rel=1e-3)


@mark.parametrize("name", ELLIPTIC)
def test_laplacian_matches_finite_differences(name):
    field = field_repository.resolve(FamilySpec(family=name, params={"n": 2}))
    points = np.random.default_rng(11).uniform(-1.0, 1.0, size=(100, 2))
    analytic, degraded = operator_function(field, "laplacian")
    assert not degraded
    assert np.allclose(finite_difference_operator(field, "laplacian", points), analytic(points), rtol=1e-5, atol=1e-5)


@mark.parametrize("name", PARABOLIC)
def test_heat_matches_finite_differences(name):
    field = field_repository.resolve(FamilySpec(family=name, params={"n": 1}))
    points = np.random.default_rng(12).uniform(-1.0, 1.0, size=(100, 2))
    analytic, degraded = operator_function(field, "heat")
    assert not degraded
    assert np.allclose(finite_difference_operator(field, "heat", points), analytic(points), rtol=1e-5, atol=1e-5)


@mark.parametrize("name op n".split(), (
    ("exponential", "laplacian", 2),
    ("trig", "laplacian", 2),
    ("quartic", "laplacian", 2),
    ("gaussian", "laplacian", 2),
    ("trig", "laplacian", 3),
    ("heat-trig", "heat", 1),
    ("heat-trig", "heat", 2),
))
def test_finite_difference_order_under_step_halving(name, op, n):
    field = field_repository.resolve(FamilySpec(family=name, params={"n": n}))
    points = np.random.default_rng(13).uniform(-1.0, 1.0, size=(100, field.arity))
    analytic, _ = operator_function(field, op)
    exact = analytic(points)
    coarse = np.max(np.abs(finite_difference_operator(field, op, points, h=0.02) - exact))
    fine = np.max(np.abs(finite_difference_operator(field, op, points, h=0.01) - exact))
    assert math.log2(coarse / fine) >= 1.9


def test_dethess_finite_difference_order():
    field = make_gressman(2)
    points = np.random.default_rng(14).uniform(0.0, 1.0, size=(100, 2))
    exact = operator_function(field, "dethess")[0](points)
    coarse = np.max(np.abs(finite_difference_operator(field, "dethess", points, h=0.02) - exact))
    fine = np.max(np.abs(finite_difference_operator(field, "dethess", points, h=0.01) - exact))
    assert math.log2(coarse / fine) >= 1.9


def test_dethess_matches_finite_differences():
    field = make_gressman(1)
    assert finite_difference_operator(field, "dethess", [0.0, 0.0], h=1e-3) == approx(1.0, abs=1e-5)


def test_finite_difference_fallback_is_flagged():
    field = make_quadratic(2).model_copy(update={"analytic_laplacian": None})
    func, degraded = operator_function(field, "laplacian")
    assert degraded
    assert func(np.array([[0.3, -0.2]]))[0] == approx(1.0, abs=1e-6)


def test_heat_needs_time_coordinate():
    with raises(InvalidParameterError):
        finite_difference_operator(make_quadratic(2), "heat", [0.0, 0.0])


def test_dethess_needs_plane():
    with raises(InvalidDimensionError):
        finite_difference_operator(make_quadratic(3), "dethess", [0.0, 0.0, 0.0])


@settings(max_examples=30, deadline=None)
@given(floats(min_value=-10.0, max_value=10.0))
def test_shift_keeps_operator(c0):
    field = shift(make_quadratic(2), c0)
    assert field([0.0, 0.0]) == approx(c0)
    assert operator_function(field, "laplacian")[0](np.zeros((1, 2)))[0] == 1.0


def test_add_combines_laplacians():
    total = add(make_quadratic(2), field_repository.resolve(FamilySpec(family="harmonic", params={"n": 2, "a": 3})))
    assert total([1.0, 2.0]) == approx(1.25 + 6.0)
    assert total.analytic_dethess is None
    with raises(InvalidDimensionError):
        add(make_quadratic(2), make_quadratic(3))


def test_lift_prepends_ignored_variables():
    lifted = lift(make_heat_witness(1, "drift"), 3)
    assert (lifted.arity, lifted.spatial_dim) == (5, 4)
    assert lifted([9.0, 9.0, 9.0, 0.0, 2.0]) == approx(-2.0)
    assert lifted.is_parabolic


def test_compose_linear():
    composed = compose_linear(make_quadratic(2), np.diag([2.0, 1.0]))
    assert composed([2.0, 0.0]) == approx(make_quadratic(2)([1.0, 0.0]))


def test_constant_field():
    field = make_constant(3.0, 1, parabolic=True)
    assert field.is_parabolic
    assert field([0.1, 0.2]) == 3.0


def test_field_rejects_wrong_arity():
    with raises(ValueError):
        make_quadratic(2)([1.0, 2.0, 3.0])


@mark.parametrize("delta", (0.1, 0.05, 0.01))
def test_rectangle_family(delta):
    family = make_rectangle_family(delta)
    assert family.measure > 1 - 2 * delta
    assert family.count == math.floor((4 - delta ** 2) / (4 * delta + delta ** 2))
    for rect in family.rectangles:
        assert 0 <= rect.x0 < rect.x1 <= 1 and 0 <= rect.t0 < rect.t1 <= 1
    gaps = [b.t0 - a.t1 for a, b in zip(family.rectangles, family.rectangles[1:])]
    assert all(gap == approx(delta ** 2 / 4) for gap in gaps)


def test_rectangle_budget():
    assert make_rectangle_family(0.05).budget == approx(0.1003125)


@mark.parametrize("delta", (0.0, 0.5, -0.1))
def test_rectangle_family_rejects_bad_delta(delta):
    with raises(InvalidParameterError):
        make_rectangle_family(delta)


def test_repository_unknown_family():
    with raises(InvalidParameterError):
        field_repository.resolve(FamilySpec(family="wave"))


def test_repository_bad_parameters():
    with raises(InvalidParameterError):
        field_repository.resolve(FamilySpec(family="quadratic", params={"n": 1.5}))
    with raises(InvalidParameterError):
        field_repository.resolve(FamilySpec(family="quadratic", params={"N": 3}))


def test_family_names_are_normalised():
    assert FamilySpec(family=" Quadratic_Shifted ").family == "quadratic-shifted"
    shifted = field_repository.resolve(FamilySpec(family="quadratic_shifted", params={"n": 2, "c0": 10}))
    assert shifted([0.0, 0.0]) == approx(-10.0)
