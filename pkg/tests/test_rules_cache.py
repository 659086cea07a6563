import numpy as np

from pytest import approx, mark, raises

from app.api.utils import cache
from app.api.utils.errors import InvalidDimensionError, InvalidParameterError
from app.api.utils.rules import ball_rule, gauss_legendre, laguerre_rule, radial_rule, sphere_rule


@mark.parametrize("d area".split(), ((1, 2.0), (2, 2 * np.pi), (3, 4 * np.pi), (4, 2 * np.pi ** 2)))
def test_sphere_rule_weights_sum_to_area(d, area):
    _, weights = sphere_rule(d, 6)
    assert weights.sum() == approx(area, rel=1e-13)


def test_sphere_rule_points_lie_on_sphere():
    points, _ = sphere_rule(3, 6)
    assert np.allclose(np.linalg.norm(points, axis=1), 1.0)


def test_sphere_rule_second_moment():
    points, weights = sphere_rule(3, 6)
    assert np.sum(weights * points[:, 0] ** 2) == approx(4 * np.pi / 3, rel=1e-13)


@mark.parametrize("d volume".split(), ((1, 2.0), (2, np.pi), (3, 4 * np.pi / 3)))
def test_ball_rule_weights_sum_to_volume(d, volume):
    _, weights = ball_rule(d, 8, 6)
    assert weights.sum() == approx(volume, rel=1e-13)


def test_radial_rule_nodes_inside_unit_interval():
    nodes, _ = radial_rule(3, 8, 1.5)
    assert np.all((nodes > 0) & (nodes < 1))


def test_laguerre_rule_integrates_weight_exactly():
    # ∫ w^{1/2} e^{-3w/2} dw = Γ(3/2) (3/2)^{-3/2}
    _, weights = laguerre_rule(12, 0.5, 1.5)
    assert weights.sum() == approx(0.5 * np.sqrt(np.pi) * 1.5 ** -1.5, rel=1e-13)


def test_laguerre_rule_rejects_nonpositive_rate():
    with raises(InvalidParameterError):
        laguerre_rule(8, 0.5, 0.0)


def test_gauss_legendre_on_interval():
    nodes, weights = gauss_legendre(16, 0.0, 2.0)
    assert np.sum(weights * nodes ** 3) == approx(4.0, rel=1e-13)


@mark.parametrize("d", (0, -1))
def test_sphere_rule_rejects_bad_dimension(d):
    with raises(InvalidDimensionError):
        sphere_rule(d, 4)


def test_rules_are_read_only():
    points, weights = ball_rule(2, 4, 4)
    with raises(ValueError):
        weights[0] = 0.0
    with raises(ValueError):
        points[0, 0] = 0.0


def test_get_or_compute_calls_producer_once():
    key = cache.generate_rule_cache_key("test", 1, 2.5)
    cache.clear_cache(key)
    calls = []

    def produce():
        calls.append(1)
        return 42

    assert cache.get_or_compute(key, produce) == 42
    assert cache.get_or_compute(key, produce) == 42
    assert len(calls) == 1
    cache.clear_cache(key)
    assert cache.get_cache(key) is None


def test_cache_keys_distinguish_parameters():
    assert cache.generate_rule_cache_key("sphere", 3, 6) != cache.generate_rule_cache_key("sphere", 3, 8)
