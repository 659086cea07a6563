import math

import numpy as np

from hypothesis import given, settings
from hypothesis.strategies import floats, integers
from pytest import approx, mark, raises
from scipy.integrate import quad as scipy_quad

from app.api.schemas.geometry import BallDomain, BoxDomain, EmptyDomain, HeatballSpec, unit_box
from app.api.services.geometry import (
    heat_kernel,
    heatball_membership,
    heatball_slice_radius,
    heatball_volume,
    modified_heatball_halfwidth,
    modified_slice_radius,
    shrink_domain,
    shrink_domain_heat,
    unit_ball_volume,
    unit_heatball_volume,
    unit_sphere_area,
)
from app.api.utils.errors import InvalidDimensionError, InvalidParameterError


@mark.parametrize("n volume".split(), ((1, 2.0), (2, math.pi), (3, 4 * math.pi / 3), (4, math.pi ** 2 / 2)))
def test_unit_ball_volume(n, volume):
    assert unit_ball_volume(n) == approx(volume, rel=1e-14)


def test_unit_sphere_area_is_n_times_volume():
    assert unit_sphere_area(1) == approx(2.0)
    assert unit_sphere_area(3) == approx(4 * math.pi)


def test_unit_ball_volume_rejects_zero_dimension():
    with raises(InvalidDimensionError):
        unit_ball_volume(0)


def test_heat_kernel_examples():
    assert heat_kernel(0.0, 1.0, 1) == approx(1 / math.sqrt(4 * math.pi))
    assert heat_kernel(np.array([1.0, 0.0]), 0.25, 2) == approx(math.exp(-1) / math.pi)


def test_heat_kernel_rejects_nonpositive_time():
    with raises(InvalidParameterError):
        heat_kernel(0.0, 0.0, 1)


def test_heatball_slice_radius_examples():
    assert heatball_slice_radius(1 / (4 * math.pi * math.e), 1.0, 1) == approx(math.sqrt(1 / (2 * math.pi * math.e)), rel=1e-12)
    assert heatball_slice_radius(1 / (8 * math.pi), 1.0, 2) == approx(math.sqrt(math.log(2) / (2 * math.pi)), rel=1e-12)
    assert heatball_slice_radius(1 / (8 * math.pi), 1.0, 2) == approx(0.3321, abs=1e-4)


def test_heatball_slice_radius_vanishes_at_extent():
    assert heatball_slice_radius(1 / (4 * math.pi), 1.0, 1) == 0.0
    assert heatball_slice_radius(1.0, 1.0, 1) == 0.0


def test_modified_slice_radius_example():
    value = modified_slice_radius(0.0, 1 / (4 * math.pi * math.e), 1.0, 1, 3)
    assert value == approx(math.sqrt(2 / (math.pi * math.e)), rel=1e-12)
    assert value == approx(0.48394, abs=1e-5)


@settings(max_examples=50, deadline=None)
@given(floats(min_value=1e-4, max_value=0.999), floats(min_value=0.2, max_value=3.0), integers(min_value=1, max_value=3))
def test_modified_slice_at_center_matches_total_dimension(fraction, r, n):
    depth = fraction * r ** 2 / (4 * math.pi)
    assert modified_slice_radius(np.zeros(n), depth, r, n, 3) == approx(heatball_slice_radius(depth, r, n + 3), rel=1e-12)


@mark.parametrize("n", (1, 2))
def test_heatball_membership_matches_slice_radius(n):
    rng = np.random.default_rng(7)
    spec = HeatballSpec(center=(0.0,) * (n + 1), radius=1.0)
    extent = spec.time_extent
    points = np.column_stack([rng.uniform(-0.5, 0.5, size=(2000, n)), rng.uniform(-1.2 * extent, 0.1 * extent, 2000)])
    member = heatball_membership(spec, points)
    depth = -points[:, n]
    dist = np.linalg.norm(points[:, :n], axis=1)
    radius = np.where(depth > 0, heatball_slice_radius(np.where(depth > 0, depth, 1.0), 1.0, n), -1.0)
    clear = np.abs(dist - radius) > 1e-9
    assert np.array_equal(member[clear], (dist <= radius)[clear])
    assert member.any() and not member.all()


def test_heatball_membership_includes_center():
    spec = HeatballSpec(center=(0.3, 1.0), radius=0.5)
    assert heatball_membership(spec, np.array([[0.3, 1.0]]))[0]
    assert not heatball_membership(spec, np.array([[0.3, 1.1]]))[0]


@mark.parametrize("n", (1, 2, 3))
def test_unit_heatball_volume_against_depth_integral(n):
    extent = 1 / (4 * math.pi)
    oracle, _ = scipy_quad(
        lambda d: unit_ball_volume(n) * (2 * n * d * math.log(extent / d)) ** (n / 2),
        0.0, extent, epsabs=0.0, epsrel=1e-12, limit=200,
    )
    assert unit_heatball_volume(n) == approx(oracle, rel=1e-8)


@mark.parametrize("n r".split(), ((1, 2.0), (2, 3.0), (3, 0.5)))
def test_heatball_volume_scaling(n, r):
    big = heatball_volume(HeatballSpec(center=(0.0,) * (n + 1), radius=r))
    one = heatball_volume(HeatballSpec(center=(0.0,) * (n + 1), radius=1.0))
    assert big / one == approx(r ** (n + 2), rel=1e-12)


def test_heatball_volume_ratios():
    assert heatball_volume(HeatballSpec(center=(0.0, 0.0), radius=2.0)) / unit_heatball_volume(1) == approx(8.0)
    assert heatball_volume(HeatballSpec(center=(0.0, 0.0, 0.0), radius=3.0)) / unit_heatball_volume(2) == approx(81.0)


def test_shrink_box():
    shrunk = shrink_domain(unit_box(2), 0.25)
    assert shrunk == BoxDomain(lower=(0.25, 0.25), upper=(0.75, 0.75))
    assert shrunk.measure() == approx(0.25)


def test_shrink_box_to_empty():
    shrunk = shrink_domain(unit_box(2), 0.5)
    assert isinstance(shrunk, EmptyDomain)
    assert shrunk.measure() == 0.0


def test_shrink_ball():
    shrunk = shrink_domain(BallDomain(center=(0.0, 0.0), radius=1.0), 0.25)
    assert shrunk.radius == approx(0.75)
    assert isinstance(shrink_domain(BallDomain(center=(0.0,), radius=0.2), 0.2), EmptyDomain)


def test_shrink_rejects_nonpositive_delta():
    with raises(InvalidParameterError):
        shrink_domain(unit_box(1), 0.0)


@settings(max_examples=50, deadline=None)
@given(floats(min_value=0.01, max_value=0.45), floats(min_value=0.01, max_value=0.45))
def test_shrink_is_monotone(a, b):
    small, large = sorted((a, b))
    assert shrink_domain(unit_box(2), large).measure() <= shrink_domain(unit_box(2), small).measure()


def test_shrink_domain_heat_box():
    R = 0.3
    half = modified_heatball_halfwidth(R, 1, 3)
    depth = R ** 2 / (4 * math.pi)
    shrunk = shrink_domain_heat(unit_box(2), R, 1, 3)
    assert shrunk.lower == approx((half, depth))
    assert shrunk.upper == approx((1 - half, 1.0))
    assert shrunk.measure() == approx((1 - 2 * half) * (1 - depth))


def test_shrink_domain_heat_empties_for_large_radius():
    assert shrink_domain_heat(unit_box(2), 2.0, 1, 3).is_empty


def test_shrink_domain_heat_checks_dimension():
    with raises(InvalidDimensionError):
        shrink_domain_heat(unit_box(3), 0.3, 1, 3)
