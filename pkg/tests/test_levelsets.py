import math

import numpy as np

from hypothesis import given, settings
from hypothesis.strategies import floats, lists, sampled_from
from pytest import approx, mark, raises

from app.api.models.field import ScalarField
from app.api.schemas.geometry import BallDomain, EmptyDomain, unit_box
from app.api.services.fields import make_constant
from app.api.services.levelsets import (
    check_two_thresholds,
    chebyshev_check,
    conjugate_exponent,
    holder_product_check,
    indicator_norm,
    lp_norm,
    measure_sublevel,
    measure_superlevel,
    monte_carlo_superlevel,
    sup_norm,
    superlevel_product,
)
from app.api.utils.errors import InvalidParameterError

IDENTITY = ScalarField(arity=1, spatial_dim=1, evaluator=lambda p: p[..., 0], label="x")


def _bilinear(coefficients):
    a0, a1, a2, a3 = coefficients
    return ScalarField(
        arity=2,
        spatial_dim=2,
        evaluator=lambda p: a0 + a1 * p[..., 0] + a2 * p[..., 1] + a3 * p[..., 0] * p[..., 1],
        label="bilinear",
    )


coefficients = lists(floats(min_value=-1.0, max_value=1.0), min_size=4, max_size=4)


def test_superlevel_of_identity():
    level = measure_superlevel(IDENTITY, unit_box(1), 0.25)
    assert level.estimate == approx(0.75)
    assert level.inner <= level.estimate <= level.outer
    assert level.resolution == 512


def test_sublevel_of_identity():
    assert measure_sublevel(IDENTITY, unit_box(1), 0.25).estimate == approx(0.25)


def test_norms_of_identity():
    assert lp_norm(IDENTITY, unit_box(1), 2.0).value == approx(1 / math.sqrt(3), rel=1e-5)
    assert lp_norm(IDENTITY, unit_box(1), 1.0).value == approx(0.5, rel=1e-9)
    assert sup_norm(IDENTITY, unit_box(1)).value == approx(1.0)


@mark.parametrize("p q".split(), ((1.0, math.inf), (math.inf, 1.0), (2.0, 2.0), (4.0, 4.0 / 3.0)))
def test_conjugate_exponent(p, q):
    assert conjugate_exponent(p) == approx(q)


def test_conjugate_exponent_rejects_small_p():
    with raises(InvalidParameterError):
        conjugate_exponent(0.5)


def test_indicator_norm():
    assert indicator_norm(0.25, 2.0) == approx(0.5)
    assert indicator_norm(0.25, math.inf) == 1.0
    assert indicator_norm(0.0, math.inf) == 0.0


def test_superlevel_product_uses_inner_bracket():
    norm, level, ind, lhs = superlevel_product(IDENTITY, unit_box(1), 0.25, 2.0)
    assert ind == approx(math.sqrt(level.inner))
    assert lhs == approx(norm.value * ind)


@settings(max_examples=30, deadline=None)
@given(coefficients, floats(min_value=0.01, max_value=2.0))
def test_bracket_contains_estimate(coeffs, c):
    level = measure_superlevel(_bilinear(coeffs), unit_box(2), c, resolution=64)
    assert level.inner <= level.estimate <= level.outer
    sub = measure_sublevel(_bilinear(coeffs), unit_box(2), c, resolution=64)
    assert sub.inner <= sub.estimate <= sub.outer


@settings(max_examples=30, deadline=None)
@given(floats(min_value=0.0, max_value=1.0), floats(min_value=0.0, max_value=1.0),
       floats(min_value=0.0, max_value=1.0), floats(min_value=0.0, max_value=1.0))
def test_lowering_thresholds_keeps_true_verdict(c1, c2, s1, s2):
    holds, _ = check_two_thresholds(IDENTITY, unit_box(1), c1, c2, 2.0, resolution=64)
    if holds:
        assert check_two_thresholds(IDENTITY, unit_box(1), c1 * s1, c2 * s2, 2.0, resolution=64)[0]


@settings(max_examples=50, deadline=None)
@given(coefficients, floats(min_value=0.01, max_value=1.0), sampled_from([1.0, 2.0, 4.0]))
def test_chebyshev_on_random_fields(coeffs, eps, p):
    assert chebyshev_check(_bilinear(coeffs), unit_box(2), eps, p, resolution=128).holds


@settings(max_examples=30, deadline=None)
@given(coefficients, floats(min_value=0.01, max_value=1.0), sampled_from([1.0, 2.0, 4.0, math.inf]))
def test_holder_on_random_fields(coeffs, c, p):
    holds, product, mass = holder_product_check(_bilinear(coeffs), unit_box(2), c, p, resolution=128)
    assert holds


def test_chebyshev_rejects_nonpositive_eps():
    with raises(InvalidParameterError):
        chebyshev_check(IDENTITY, unit_box(1), 0.0, 2.0)


def test_monte_carlo_is_seeded():
    first = monte_carlo_superlevel(IDENTITY, unit_box(1), 0.25, seed=5)
    second = monte_carlo_superlevel(IDENTITY, unit_box(1), 0.25, seed=5)
    assert first == second
    estimate, stderr = first
    assert abs(estimate - 0.75) <= 5 * stderr


def test_ball_domain_measure():
    level = measure_superlevel(make_constant(1.0, 2), BallDomain(center=(0.0, 0.0), radius=1.0), 0.5)
    assert level.estimate == approx(math.pi, rel=1e-2)


def test_empty_domain_has_no_superlevel_set():
    level = measure_superlevel(make_constant(1.0, 2), EmptyDomain(dim=2), 0.5)
    assert level.estimate == 0.0 and level.outer == 0.0
    assert sup_norm(make_constant(1.0, 2), EmptyDomain(dim=2)).value == 0.0


def test_rejects_coarse_resolution():
    with raises(InvalidParameterError):
        measure_superlevel(IDENTITY, unit_box(1), 0.25, resolution=4)


def test_rejects_negative_threshold():
    with raises(InvalidParameterError):
        measure_superlevel(IDENTITY, unit_box(1), -0.1)


def test_grid_values_are_deterministic():
    field = _bilinear([0.1, -0.5, 0.3, 0.9])
    first = lp_norm(field, unit_box(2), 2.0).value
    assert lp_norm(field, unit_box(2), 2.0).value == first
    assert np.isfinite(first)
