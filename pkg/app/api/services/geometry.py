"""
Geometry service module.
This module provides closed-form and semi-analytic geometry of balls,
heatballs and modified heatballs, and the domain shrinkages used by the
constant computations.
"""
import logging
import math
from typing import Union

import numpy as np
from scipy.special import gamma

from app.api.schemas.geometry import (
    BallDomain,
    BallSpec,
    BoxDomain,
    DomainLike,
    EmptyDomain,
    HeatballSpec,
)
from app.api.schemas.quadrature import QuadratureConfig
from app.api.utils.cache import generate_rule_cache_key, get_or_compute
from app.api.utils.errors import InvalidDimensionError, InvalidParameterError
from app.api.utils.rules import laguerre_rule

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

def _check_dimension(n: int) -> None:
    if int(n) != n or n < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {n}")

def unit_ball_volume(n: int) -> float:
    """
    Volume of the unit ball in R^n, π^{n/2} / Γ(n/2 + 1).

    Args:
        n (int): The dimension, n >= 1.

    Returns:
        float: |B_1|.

    Raises:
        InvalidDimensionError: If n < 1.
    """
    _check_dimension(n)
    return float(np.pi ** (n / 2.0) / gamma(n / 2.0 + 1.0))

def unit_sphere_area(n: int) -> float:
    """
    Surface measure of the unit sphere in R^n, |∂B_1| = n |B_1|.

    Args:
        n (int): The dimension, n >= 1.

    Returns:
        float: |∂B_1|.
    """
    return n * unit_ball_volume(n)

def ball_volume(ball: BallSpec) -> float:
    """
    Volume of a ball, |B_1| r^n.

    Args:
        ball (BallSpec): The ball.

    Returns:
        float: |B_r|.
    """
    return unit_ball_volume(ball.dim) * ball.radius ** ball.dim

def heat_kernel(y: ArrayLike, s: ArrayLike, n: int) -> ArrayLike:
    """
    Standard heat kernel Φ(y, s) = (4πs)^{-n/2} exp(-|y|^2 / 4s).

    Args:
        y: Spatial offsets, shape (..., n); scalars are accepted for n = 1.
        s: Positive times, broadcastable to y's leading shape.
        n (int): The spatial dimension.

    Returns:
        The kernel values.

    Raises:
        InvalidParameterError: If some s <= 0.
    """
    _check_dimension(n)
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise InvalidParameterError("heat kernel needs s > 0")
    y = np.asarray(y, dtype=float)
    if n == 1 and (y.ndim == 0 or y.shape[-1] != 1):
        sq = y ** 2
    else:
        sq = np.sum(y ** 2, axis=-1)
    value = (4.0 * np.pi * s) ** (-n / 2.0) * np.exp(-sq / (4.0 * s))
    return float(value) if np.ndim(value) == 0 else value

def heatball_slice_radius(depth: ArrayLike, r: float, n: int) -> ArrayLike:
    """
    Radius of the heatball slice at depth t - s, (2n d log(r^2 / 4πd))^{1/2}.

    Args:
        depth: Depths d = t - s > 0.
        r (float): The heatball radius.
        n (int): The spatial dimension.

    Returns:
        The slice radius; 0.0 marks an empty slice (d >= r^2/4π).

    Raises:
        InvalidParameterError: If r <= 0 or some depth <= 0.
    """
    _check_dimension(n)
    if r <= 0:
        raise InvalidParameterError("heatball radius must be positive")
    d = np.asarray(depth, dtype=float)
    if np.any(d <= 0):
        raise InvalidParameterError("slice depth must be positive")
    extent = r ** 2 / (4.0 * np.pi)
    inside = d < extent
    log_term = np.log(np.where(inside, extent / d, 1.0))
    radius = np.where(inside, np.sqrt(2.0 * n * d * log_term), 0.0)
    return float(radius) if radius.ndim == 0 else radius

def modified_slice_radius(y: ArrayLike, depth: ArrayLike, r: float, n: int, m: int) -> ArrayLike:
    """
    Half-width A of the integrated-out variables over a modified heatball point,
    A = (2 d (m+n) log(r^2/4πd) - |y|^2)^{1/2}.

    Args:
        y: Spatial offsets x - y, shape (..., n); scalars accepted for n = 1.
        depth: Depths t - s > 0.
        r (float): The radius.
        n (int): Spatial dimension.
        m (int): Extra dimension count.

    Returns:
        A, with 0.0 where the radicand is not positive.
    """
    _check_dimension(n)
    _check_dimension(m)
    if r <= 0:
        raise InvalidParameterError("heatball radius must be positive")
    d = np.asarray(depth, dtype=float)
    if np.any(d <= 0):
        raise InvalidParameterError("slice depth must be positive")
    y = np.asarray(y, dtype=float)
    sq = y ** 2 if (n == 1 and (y.ndim == 0 or y.shape[-1] != 1)) else np.sum(y ** 2, axis=-1)
    extent = r ** 2 / (4.0 * np.pi)
    radicand = 2.0 * d * (m + n) * np.log(extent / d) - sq
    value = np.sqrt(np.clip(radicand, 0.0, None))
    return float(value) if np.ndim(value) == 0 else value

def heatball_membership(spec: HeatballSpec, points: np.ndarray) -> np.ndarray:
    """
    Membership test for E(x,t;r).

    Args:
        spec (HeatballSpec): The heatball.
        points (np.ndarray): Points (..., n+1).

    Returns:
        np.ndarray: Boolean mask; the center itself is a member.
    """
    points = np.asarray(points, dtype=float)
    n = spec.spatial_dim
    offsets = spec.x - points[..., :n]
    depth = spec.t - points[..., n]
    positive = depth > 0
    safe_depth = np.where(positive, depth, 1.0)
    kernel = heat_kernel(offsets, safe_depth, n)
    member = positive & (np.asarray(kernel) >= spec.radius ** (-n))
    is_center = np.all(points == np.asarray(spec.center), axis=-1)
    return member | is_center

def unit_heatball_volume(n: int, quad: QuadratureConfig = QuadratureConfig()) -> float:
    """
    |E(1)| in spatial dimension n, computed once per n.

    The slice integral of |B_1| ρ(d)^n over d in (0, 1/4π) is taken in the
    log-depth variable w = log(1/4πd), where it becomes
    |B_1| (2n)^{n/2} D^{(n+2)/2} w^{n/2} e^{-(n+2)w/2}; the Gauss-Laguerre rule
    for that weight integrates it exactly.

    Args:
        n (int): The spatial dimension.
        quad (QuadratureConfig): Quadrature settings (slice_count used).

    Returns:
        float: |E(1)|.
    """
    _check_dimension(n)

    def compute() -> float:
        extent = 1.0 / (4.0 * np.pi)
        alpha, beta = n / 2.0, (n + 2) / 2.0
        _, weights = laguerre_rule(quad.slice_count, alpha, beta)
        scale = unit_ball_volume(n) * (2.0 * n) ** (n / 2.0) * extent ** ((n + 2) / 2.0)
        volume = float(scale * np.sum(weights))
        logger.debug("unit heatball volume n=%d: %.15g", n, volume)
        return volume

    return get_or_compute(generate_rule_cache_key("unit_heatball", n, quad.slice_count), compute)

def heatball_volume(spec: HeatballSpec, quad: QuadratureConfig = QuadratureConfig()) -> float:
    """
    |E(x,t;r)| = r^{n+2} |E(1)| by parabolic scaling.

    Args:
        spec (HeatballSpec): The heatball.
        quad (QuadratureConfig): Quadrature settings.

    Returns:
        float: The heatball volume.
    """
    n = spec.spatial_dim
    return spec.radius ** (n + 2) * unit_heatball_volume(n, quad)

def modified_heatball_halfwidth(R: float, n: int, m: int) -> float:
    """
    Largest spatial half-width of E_m(x,t;R), attained at depth R^2/(4πe).

    Args:
        R (float): The radius.
        n (int): Spatial dimension.
        m (int): Extra dimension count.

    Returns:
        float: (2(m+n) R^2 / (4πe))^{1/2}.
    """
    return math.sqrt(2.0 * (m + n) * R ** 2 / (4.0 * math.pi * math.e))

def shrink_domain(dom: DomainLike, delta: float) -> DomainLike:
    """
    Ω_δ: points at distance at least δ from the boundary.

    Boxes shrink by δ per axis (supremum-norm distance), balls by δ in radius.

    Args:
        dom (DomainLike): The domain.
        delta (float): The distance δ > 0.

    Returns:
        DomainLike: The shrunken domain, or an EmptyDomain marker.
    """
    if delta <= 0:
        raise InvalidParameterError("shrink distance must be positive")
    if dom.is_empty:
        return dom
    if isinstance(dom, BoxDomain):
        lower = tuple(lo + delta for lo in dom.lower)
        upper = tuple(hi - delta for hi in dom.upper)
        if any(lo >= hi for lo, hi in zip(lower, upper)):
            return EmptyDomain(dim=dom.dim)
        return BoxDomain(lower=lower, upper=upper)
    if isinstance(dom, BallDomain):
        if dom.radius <= delta:
            return EmptyDomain(dim=dom.dim)
        return BallDomain(center=dom.center, radius=dom.radius - delta)
    raise InvalidParameterError(f"unsupported domain {type(dom).__name__}")

def shrink_domain_heat(dom: DomainLike, R: float, n: int, m: int) -> DomainLike:
    """
    Ω_R: centers (x,t) whose modified heatball E_m(x,t;R) lies in the domain.

    Uses the bounding box of E_m: spatial half-width from
    modified_heatball_halfwidth and time depth R^2/4π below t. For ball
    domains the retained set is the ball shrunk by the bounding box's
    distance from its center to its farthest corner.

    Args:
        dom (DomainLike): Domain in R^{n+1}, time last.
        R (float): The modified heatball radius.
        n (int): Spatial dimension.
        m (int): Extra dimension count.

    Returns:
        DomainLike: The retained centers, or an EmptyDomain marker.
    """
    if R <= 0:
        raise InvalidParameterError("heatball radius must be positive")
    if dom.is_empty:
        return dom
    if dom.dim != n + 1:
        raise InvalidDimensionError(f"domain dimension {dom.dim} does not match n+1 = {n + 1}")
    half = modified_heatball_halfwidth(R, n, m)
    depth = R ** 2 / (4.0 * math.pi)
    if isinstance(dom, BoxDomain):
        lower = tuple(lo + half for lo in dom.lower[:-1]) + (dom.lower[-1] + depth,)
        upper = tuple(hi - half for hi in dom.upper[:-1]) + (dom.upper[-1],)
        if any(lo >= hi for lo, hi in zip(lower, upper)):
            return EmptyDomain(dim=dom.dim)
        return BoxDomain(lower=lower, upper=upper)
    if isinstance(dom, BallDomain):
        reach = math.sqrt(n * half ** 2 + depth ** 2)
        if dom.radius <= reach:
            return EmptyDomain(dim=dom.dim)
        return BallDomain(center=dom.center, radius=dom.radius - reach)
    raise InvalidParameterError(f"unsupported domain {type(dom).__name__}")
