import math

import numpy as np

from hypothesis import given, settings
from hypothesis.strategies import floats, lists
from pytest import approx, mark, raises

from app.api.models.field import ScalarField
from app.api.schemas.geometry import BallSpec, HeatballSpec, ModifiedHeatballSpec
from app.api.schemas.quadrature import QuadratureConfig, Weight, WeightedRegion
from app.api.services.constants import kernel_maximum
from app.api.services.fields import lift, make_constant
from app.api.services.geometry import (
    heatball_membership,
    heatball_volume,
    modified_heatball_halfwidth,
    unit_ball_volume,
)
from app.api.services.quadrature import (
    integrate_ball,
    integrate_heatball,
    integrate_modified_heatball,
    integrate_region,
    kernel_bound_shape,
    log_kernel,
    max_on_region,
    modified_kernel,
)
from app.api.utils.errors import (
    InvalidParameterError,
    QuadratureToleranceError,
    UnsupportedExtraDimensionError,
)


def _field(arity, func, spatial_dim=None):
    return ScalarField(arity=arity, spatial_dim=spatial_dim or arity, evaluator=func)


def test_refined_config():
    refined = QuadratureConfig().refined(1)
    assert (refined.slice_count, refined.radial_points, refined.angular_points) == (48, 16, 8)
    assert QuadratureConfig().refined(0) == QuadratureConfig()


@mark.parametrize("n", (1, 2, 3))
def test_ball_integral_of_one_is_volume(n):
    ball = BallSpec(center=(0.3,) * n, radius=0.7)
    assert integrate_ball(make_constant(1.0, n), ball) == approx(unit_ball_volume(n) * 0.7 ** n, rel=1e-12)


def test_ball_integral_of_squared_distance():
    ball = BallSpec(center=(1.0, -1.0), radius=0.5)
    f = _field(2, lambda p: (p[..., 0] - 1.0) ** 2 + (p[..., 1] + 1.0) ** 2)
    assert integrate_ball(f, ball) == approx(math.pi * 0.5 ** 4 / 2, rel=1e-12)


def test_ball_integral_of_odd_field_vanishes():
    f = _field(3, lambda p: p[..., 0] ** 3 - p[..., 2])
    assert integrate_ball(f, BallSpec(center=(0.0, 0.0, 0.0), radius=1.0)) == approx(0.0, abs=1e-12)


def test_ball_integral_of_exponential():
    f = _field(1, lambda p: np.exp(p[..., 0]))
    assert integrate_ball(f, BallSpec(center=(0.0,), radius=1.0)) == approx(math.e - 1 / math.e, rel=1e-12)


@mark.parametrize("n", (1, 2, 3))
@mark.parametrize("r", (0.5, 1.0, 2.0))
def test_heatball_kernel_normalization(n, r):
    spec = HeatballSpec(center=(0.0,) * (n + 1), radius=r)
    one = make_constant(1.0, n, parabolic=True)
    assert integrate_heatball(one, spec, Weight.HEATBALL_KERNEL) / (4 * r ** n) == approx(1.0, abs=1e-6)


@mark.parametrize("n", (1, 2, 3))
def test_unit_weight_gives_heatball_volume(n):
    spec = HeatballSpec(center=(0.5,) * n + (1.0,), radius=0.8)
    one = make_constant(1.0, n, parabolic=True)
    assert integrate_heatball(one, spec, Weight.UNIT) == approx(heatball_volume(spec), rel=1e-10)


@mark.parametrize("n", (1, 2))
def test_log_kernel_integral_bounds_inner_heatball(n):
    r = 1.0
    spec = HeatballSpec(center=(0.0,) * (n + 1), radius=r)
    inner = HeatballSpec(center=(0.0,) * (n + 1), radius=r / math.e)
    one = make_constant(1.0, n, parabolic=True)
    assert integrate_heatball(one, spec, Weight.LOG_KERNEL) >= n * heatball_volume(inner)


def test_log_kernel_nonnegative_inside_heatball():
    spec = HeatballSpec(center=(0.0, 0.0), radius=1.0)
    rng = np.random.default_rng(3)
    points = np.column_stack([rng.uniform(-0.3, 0.3, 5000), -rng.uniform(1e-6, spec.time_extent, 5000)])
    inside = points[heatball_membership(spec, points)]
    values = log_kernel(-inside[:, :1], -inside[:, 1], 1.0, 1)
    assert np.all(values >= -1e-12)


def test_user_weight_field():
    spec = HeatballSpec(center=(0.0, 0.0), radius=1.0)
    one = make_constant(1.0, 1, parabolic=True)
    two = make_constant(2.0, 1, parabolic=True)
    assert integrate_heatball(one, spec, two) == approx(2 * heatball_volume(spec), rel=1e-10)


@mark.parametrize("n m".split(), ((1, 3), (1, 4), (2, 3)))
def test_modified_kernel_integrates_to_one(n, m):
    spec = ModifiedHeatballSpec(center=(0.0,) * (n + 1), radius=1.0, extra_dim=m)
    assert integrate_modified_heatball(make_constant(1.0, n, parabolic=True), spec) == approx(1.0, abs=1e-6)


def test_modified_heatball_rejects_small_extra_dimension():
    spec = ModifiedHeatballSpec(center=(0.0, 0.0), radius=1.0, extra_dim=2)
    with raises(UnsupportedExtraDimensionError):
        integrate_modified_heatball(make_constant(1.0, 1, parabolic=True), spec)


def test_heatball_weight_rejected_on_modified_heatball():
    spec = ModifiedHeatballSpec(center=(0.0, 0.0), radius=1.0, extra_dim=3)
    with raises(InvalidParameterError):
        integrate_modified_heatball(make_constant(1.0, 1, parabolic=True), spec, weight=Weight.LOG_KERNEL)


@settings(max_examples=20, deadline=None)
@given(lists(floats(min_value=-1.0, max_value=1.0), min_size=5, max_size=5))
def test_modified_average_equals_lifted_heatball_average(coefficients):
    a0, a1, a2, a3, a4 = coefficients

    def func(p):
        x, t = p[..., 0], p[..., 1]
        return a0 + a1 * np.sin(x) + a2 * t + a3 * x ** 2 + a4 * np.cos(2 * t)

    f = ScalarField(arity=2, spatial_dim=1, evaluator=func)
    m, r = 3, 1.0
    center = (0.2, 0.5)
    modified = integrate_modified_heatball(f, ModifiedHeatballSpec(center=center, radius=r, extra_dim=m))
    lifted_spec = HeatballSpec(center=(0.0,) * m + center, radius=r)
    lifted = integrate_heatball(lift(f, m), lifted_spec, Weight.HEATBALL_KERNEL) / (4 * r ** (m + 1))
    assert modified == approx(lifted, rel=1e-6, abs=1e-8)


def test_modified_kernel_is_bounded_and_vanishes_at_tip():
    value, delta = kernel_maximum(1.0, 1, 3)
    assert math.isfinite(value) and value > 0 and delta >= 0
    assert modified_kernel(0.0, 1e-16, 1.0, 1, 3) < 1e-3 * value
    assert modified_kernel(0.0, 1e-10, 1.0, 1, 3) < modified_kernel(0.0, 1e-6, 1.0, 1, 3)


def test_bound_shape_dominates_modified_kernel():
    r, n, m = 1.0, 1, 3
    total = n + m
    extent = r ** 2 / (4 * math.pi)
    const = 2 * unit_ball_volume(m) * (2 * total) ** (m / 2) * total / (4 * r ** total)
    s = np.geomspace(1e-10, extent * (1 - 1e-9), 200)
    y = np.linspace(-1.0, 1.0, 201) * modified_heatball_halfwidth(r, n, m)
    ss, yy = np.meshgrid(s, y, indexing="ij")
    kernel = modified_kernel(yy, ss, r, n, m)
    assert np.all(kernel >= 0)
    assert np.all(kernel <= const * kernel_bound_shape(ss, r, m) * (1 + 1e-12))


def test_quadrature_reports_non_convergence():
    f = _field(1, lambda p: np.cos(50.0 * p[..., 0]))
    quad = QuadratureConfig(max_refinements=1, target_rel_tol=1e-12)
    with raises(QuadratureToleranceError) as info:
        integrate_ball(f, BallSpec(center=(0.0,), radius=1.0), quad)
    assert info.value.target == 1e-12
    assert info.value.achieved > 1e-12


def test_integrate_region_dispatch():
    ball = WeightedRegion(region=BallSpec(center=(0.0, 0.0), radius=1.0))
    assert integrate_region(make_constant(1.0, 2), ball) == approx(math.pi, rel=1e-12)
    heat = WeightedRegion(region=HeatballSpec(center=(0.0, 0.0), radius=1.0), weight=Weight.HEATBALL_KERNEL)
    assert integrate_region(make_constant(1.0, 1, parabolic=True), heat) == approx(4.0, abs=1e-6)
    with raises(InvalidParameterError):
        integrate_region(make_constant(1.0, 2), WeightedRegion(region=ball.region, weight=Weight.LOG_KERNEL))


def test_max_of_constant_field_on_ball():
    seven = _field(2, lambda p: np.full(p.shape[:-1], 7.0))
    estimate = max_on_region(seven, WeightedRegion(region=BallSpec(center=(0.0, 0.0), radius=1.0)))
    assert estimate.value == approx(7.0)
    assert estimate.refinement_delta == approx(0.0)


def test_max_of_constant_field_on_heatball():
    seven = make_constant(7.0, 1, parabolic=True)
    estimate = max_on_region(seven, WeightedRegion(region=HeatballSpec(center=(0.0, 0.0), radius=1.0)))
    assert estimate.value == approx(7.0)
    assert estimate.argmax[1] <= 0.0


def test_max_on_ball_finds_corner_value():
    f = _field(2, lambda p: p[..., 0] + p[..., 1])
    estimate = max_on_region(f, WeightedRegion(region=BallSpec(center=(0.0, 0.0), radius=1.0)))
    assert estimate.value <= math.sqrt(2) + 1e-12
    assert estimate.value == approx(math.sqrt(2), rel=1e-3)
