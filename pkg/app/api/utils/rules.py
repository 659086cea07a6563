"""
Quadrature rule module.
This module builds the fixed tensor-product rules used by the quadrature
service: sphere rules of any dimension, Gauss-Jacobi radial rules on the unit
ball and Gauss-Laguerre rules for the log-depth variable of heatballs.
All rules are cached and returned as read-only arrays.
"""
from typing import Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_gegenbauer, roots_genlaguerre, roots_jacobi

from app.api.utils.cache import generate_rule_cache_key, get_or_compute
from app.api.utils.errors import InvalidDimensionError, InvalidParameterError

Rule = Tuple[np.ndarray, np.ndarray]

def _frozen(nodes: np.ndarray, weights: np.ndarray) -> Rule:
    nodes = np.ascontiguousarray(nodes, dtype=float)
    weights = np.ascontiguousarray(weights, dtype=float)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights

def sphere_rule(d: int, k: int) -> Rule:
    """
    Product rule on the unit sphere S^{d-1} in R^d.

    d = 1 uses the two endpoints, d = 2 the trapezoid rule with 2k angles,
    and d >= 3 recurses with k Gauss-Gegenbauer nodes in the first polar angle.

    Args:
        d (int): Ambient dimension.
        k (int): Angular order.

    Returns:
        Rule: Points of shape (N, d) and surface weights summing to |S^{d-1}|.
    """
    if d < 1:
        raise InvalidDimensionError(f"sphere rule needs d >= 1, got {d}")
    if k < 1:
        raise InvalidParameterError(f"angular order must be positive, got {k}")

    def build() -> Rule:
        if d == 1:
            return _frozen(np.array([[1.0], [-1.0]]), np.array([1.0, 1.0]))
        if d == 2:
            theta = np.pi * np.arange(2 * k) / k
            points = np.column_stack([np.cos(theta), np.sin(theta)])
            return _frozen(points, np.full(2 * k, np.pi / k))
        t, wt = roots_gegenbauer(k, (d - 2) / 2.0)
        sub_points, sub_weights = sphere_rule(d - 1, k)
        lateral = np.sqrt(np.clip(1.0 - t ** 2, 0.0, None))
        points = np.concatenate(
            [np.column_stack([np.full(len(sub_points), ti), li * sub_points]) for ti, li in zip(t, lateral)]
        )
        weights = np.concatenate([wi * sub_weights for wi in wt])
        return _frozen(points, weights)

    return get_or_compute(generate_rule_cache_key("sphere", d, k), build)

def radial_rule(d: int, k: int, a: float = 0.0) -> Rule:
    """
    Gauss-Jacobi rule in v = |z|^2 for radial integrals over the unit ball.

    For h even in z, the integral of (1 - |z|^2)^a h(z) over |z| <= 1 equals
    sum_j W_j * (sphere integral of h(sqrt(v_j) w)).

    Args:
        d (int): Ambient dimension.
        k (int): Number of radial nodes.
        a (float): Exponent of the boundary factor (1 - |z|^2)^a.

    Returns:
        Rule: Nodes v_j in (0, 1) and weights W_j.
    """
    if d < 1:
        raise InvalidDimensionError(f"radial rule needs d >= 1, got {d}")

    def build() -> Rule:
        b = (d - 2) / 2.0
        x, w = roots_jacobi(k, a, b)
        return _frozen((1.0 + x) / 2.0, w * 2.0 ** (-(a + b + 2.0)))

    return get_or_compute(generate_rule_cache_key("radial", d, k, float(a)), build)

def ball_rule(d: int, radial: int, angular: int, a: float = 0.0) -> Rule:
    """
    Tensor rule on the unit ball for the weight (1 - |z|^2)^a.

    Args:
        d (int): Ambient dimension.
        radial (int): Radial node count.
        angular (int): Angular order.
        a (float): Boundary exponent.

    Returns:
        Rule: Points z of shape (N, d) and weights.
    """
    def build() -> Rule:
        v, wv = radial_rule(d, radial, a)
        omega, wo = sphere_rule(d, angular)
        u = np.sqrt(v)
        points = (u[:, None, None] * omega[None, :, :]).reshape(-1, d)
        weights = (wv[:, None] * wo[None, :]).reshape(-1)
        return _frozen(points, weights)

    return get_or_compute(generate_rule_cache_key("ball", d, radial, angular, float(a)), build)

def laguerre_rule(k: int, alpha: float, beta: float) -> Rule:
    """
    Gauss-Laguerre rule for the integral of w^alpha e^{-beta w} h(w) over (0, inf).

    Args:
        k (int): Node count.
        alpha (float): Power of w, > -1.
        beta (float): Exponential rate, > 0.

    Returns:
        Rule: Nodes w_i and weights.
    """
    if beta <= 0:
        raise InvalidParameterError(f"laguerre rate must be positive, got {beta}")

    def build() -> Rule:
        x, w = roots_genlaguerre(k, alpha)
        return _frozen(x / beta, w * beta ** (-(alpha + 1.0)))

    return get_or_compute(generate_rule_cache_key("laguerre", k, float(alpha), float(beta)), build)

def gauss_legendre(k: int, lower: float, upper: float) -> Rule:
    """
    Gauss-Legendre rule on [lower, upper].

    Args:
        k (int): Node count.
        lower (float): Left endpoint.
        upper (float): Right endpoint.

    Returns:
        Rule: Nodes and weights.
    """
    x, w = leggauss(k)
    half = 0.5 * (upper - lower)
    return lower + half * (x + 1.0), half * w
