"""
Quadrature service module.
This module provides deterministic integration over balls, heatballs and
modified heatballs, the pointwise kernels of the average families, and
grid-scan maxima over those regions.

Heatball integrals are written in the log-depth variable w = log(r^2/4π(t-s)).
Every named weight then factors as scale * w^alpha * e^{-beta w} * g(z) over
the unit ball z of the slice, so the singular tip is absorbed by a
Gauss-Laguerre rule and the slice boundary by a Gauss-Jacobi rule.
"""
import logging
import math
from typing import Callable, NamedTuple, Optional, Tuple, Union

import numpy as np

from app.api.models.field import ScalarField
from app.api.schemas.geometry import BallSpec, HeatballSpec, ModifiedHeatballSpec
from app.api.schemas.quadrature import QuadratureConfig, Weight, WeightedRegion
from app.api.schemas.reports import MaxEstimate
from app.api.services.geometry import heat_kernel, unit_ball_volume
from app.api.utils.errors import (
    InvalidParameterError,
    QuadratureToleranceError,
    UnsupportedExtraDimensionError,
)
from app.api.utils.rules import ball_rule, laguerre_rule

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]
WeightLike = Union[Weight, ScalarField]

# Upper bound on points evaluated per field call
CHUNK_POINTS = 1_000_000

class SliceLaw(NamedTuple):
    """
    Factorisation of a weighted heatball integral in (w, z) coordinates.
    """
    alpha: float
    beta: float
    scale: float
    jacobi: float
    z_factor: Callable[[np.ndarray], np.ndarray]
    slice_dim: int

def _squared_norm(y: np.ndarray, n: int) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if n == 1 and (y.ndim == 0 or y.shape[-1] != 1):
        return y ** 2
    return np.sum(y ** 2, axis=-1)

def heatball_kernel_weight(y: ArrayLike, s: ArrayLike, n: int = 1) -> ArrayLike:
    """
    The heatball average weight |y|^2 / s^2.

    Args:
        y: Offsets x - y, shape (..., n).
        s: Depths t - s > 0.
        n (int): Spatial dimension.

    Returns:
        The weight values.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise InvalidParameterError("kernel depth must be positive")
    value = _squared_norm(y, n) / s ** 2
    return float(value) if np.ndim(value) == 0 else value

def log_kernel(y: ArrayLike, s: ArrayLike, r: float, n: int) -> ArrayLike:
    """
    ψ(y, s) = log(r^n Φ(y, s)), positive inside E(r).

    Args:
        y: Offsets x - y.
        s: Depths t - s > 0.
        r (float): The heatball radius.
        n (int): Spatial dimension.

    Returns:
        The kernel values.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise InvalidParameterError("kernel depth must be positive")
    value = n * math.log(r) - (n / 2.0) * np.log(4.0 * np.pi * s) - _squared_norm(y, n) / (4.0 * s)
    return float(value) if np.ndim(value) == 0 else value

def modified_kernel(y: ArrayLike, s: ArrayLike, r: float, n: int, m: int) -> ArrayLike:
    """
    K_r(y, s) of the (n, m)-modified heatball average.

    K_r = 2|B^m| A^m (m(m+n) log(r^2/4πs)/s + |y|^2/s^2) / ((m+2) 4 r^{m+n}),
    where A is the modified slice half-width; K_r vanishes outside E_m(r).

    Args:
        y: Offsets x - y, shape (..., n).
        s: Depths t - s > 0.
        r (float): The radius.
        n (int): Spatial dimension.
        m (int): Extra dimension count.

    Returns:
        The kernel values, nonnegative.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise InvalidParameterError("kernel depth must be positive")
    total = m + n
    sq = _squared_norm(y, n)
    log_term = np.log(r ** 2 / (4.0 * np.pi * s))
    radicand = 2.0 * s * total * log_term - sq
    inside = radicand > 0
    half_width = np.sqrt(np.where(inside, radicand, 0.0))
    bracket = m * total * log_term / s + sq / s ** 2
    value = 2.0 * unit_ball_volume(m) * half_width ** m * bracket / ((m + 2) * 4.0 * r ** total)
    value = np.where(inside, value, 0.0)
    return float(value) if np.ndim(value) == 0 else value

def kernel_bound_shape(s: ArrayLike, r: float, m: int) -> ArrayLike:
    """
    s^{(m-2)/2} log(r^2/4πs)^{(m+2)/2}, the shape dominating K_r near the tip.

    Args:
        s: Depths in (0, r^2/4π); zero is returned at or beyond the extent.
        r (float): The radius.
        m (int): Extra dimension count.

    Returns:
        The bound shape values.
    """
    s = np.asarray(s, dtype=float)
    extent = r ** 2 / (4.0 * np.pi)
    inside = (s > 0) & (s < extent)
    safe = np.where(inside, s, extent)
    value = np.where(inside, safe ** ((m - 2) / 2.0) * np.log(extent / safe) ** ((m + 2) / 2.0), 0.0)
    return float(value) if np.ndim(value) == 0 else value

def _refine(compute: Callable[[QuadratureConfig], Tuple[float, float]], quad: QuadratureConfig, label: str) -> float:
    """
    Run a rule at increasing refinement levels until two consecutive levels agree.

    Args:
        compute: Maps a configuration to (integral, sum of |weight * integrand|).
        quad (QuadratureConfig): The base configuration.
        label (str): Name used in log and error messages.

    Returns:
        float: The integral at the first converged level.

    Raises:
        QuadratureToleranceError: If max_refinements levels never agree.
    """
    previous, change, mass = None, math.inf, 0.0
    for level in range(quad.max_refinements + 1):
        value, mass = compute(quad.refined(level))
        if previous is not None:
            change = abs(value - previous)
            logger.debug("%s level %d: value %.15g change %.3e", label, level, value, change)
            if change <= quad.target_rel_tol * mass:
                return value
        previous = value
    raise QuadratureToleranceError(
        f"{label} did not converge in {quad.max_refinements} refinements",
        achieved=change / mass if mass > 0 else math.inf,
        target=quad.target_rel_tol,
    )

def integrate_ball(f: ScalarField, ball: BallSpec, quad: QuadratureConfig = QuadratureConfig()) -> float:
    """
    Integrate a field over B_r(x) with a radial Gauss-Jacobi x sphere product rule.

    Args:
        f (ScalarField): The integrand on R^n.
        ball (BallSpec): The ball.
        quad (QuadratureConfig): Quadrature settings.

    Returns:
        float: The integral.

    Raises:
        QuadratureToleranceError: If refinement does not converge.
    """
    n, r = ball.dim, ball.radius
    center = np.asarray(ball.center, dtype=float)

    def compute(q: QuadratureConfig) -> Tuple[float, float]:
        z, wz = ball_rule(n, q.radial_points, q.angular_points)
        contrib = wz * f(center + r * z)
        return r ** n * float(np.sum(contrib)), r ** n * float(np.sum(np.abs(contrib)))

    return _refine(compute, quad, "ball integral")

def _slice_law(weight: Weight, spec: HeatballSpec) -> SliceLaw:
    n, r = spec.spatial_dim, spec.radius
    extent = spec.time_extent
    m = spec.extra_dim if isinstance(spec, ModifiedHeatballSpec) else 0
    total = n + m
    if weight == Weight.UNIT:
        return SliceLaw(
            alpha=n / 2.0,
            beta=(n + 2) / 2.0,
            scale=(2.0 * total) ** (n / 2.0) * extent ** ((n + 2) / 2.0),
            jacobi=0.0,
            z_factor=np.ones_like,
            slice_dim=total,
        )
    if weight == Weight.MODIFIED_KERNEL:
        if m == 0:
            raise InvalidParameterError("the modified kernel needs a modified heatball")
        scale = (
            2.0 * unit_ball_volume(m) * total * (2.0 * total) ** (total / 2.0) * extent ** (total / 2.0)
            / ((m + 2) * 4.0 * r ** total)
        )
        return SliceLaw(
            alpha=total / 2.0 + 1.0,
            beta=total / 2.0,
            scale=scale,
            jacobi=m / 2.0,
            z_factor=lambda v: m + 2.0 * v,
            slice_dim=total,
        )
    if m:
        raise InvalidParameterError(f"weight {weight.value} is defined on heatballs, not modified heatballs")
    if weight == Weight.HEATBALL_KERNEL:
        return SliceLaw(
            alpha=n / 2.0 + 1.0,
            beta=n / 2.0,
            scale=(2.0 * n) ** (n / 2.0 + 1.0) * extent ** (n / 2.0),
            jacobi=0.0,
            z_factor=lambda v: v,
            slice_dim=n,
        )
    if weight == Weight.LOG_KERNEL:
        return SliceLaw(
            alpha=n / 2.0 + 1.0,
            beta=(n + 2) / 2.0,
            scale=(2.0 * n) ** (n / 2.0) * extent ** ((n + 2) / 2.0) * (n / 2.0),
            jacobi=0.0,
            z_factor=lambda v: 1.0 - v,
            slice_dim=n,
        )
    raise InvalidParameterError(f"unknown weight {weight}")

def _integrate_slices(f: ScalarField, spec: HeatballSpec, law: SliceLaw, quad: QuadratureConfig, label: str) -> float:
    n = spec.spatial_dim
    x, t, extent = spec.x, spec.t, spec.time_extent

    def compute(q: QuadratureConfig) -> Tuple[float, float]:
        w_nodes, w_weights = laguerre_rule(q.slice_count, law.alpha, law.beta)
        z, wz = ball_rule(n, q.radial_points, q.angular_points, law.jacobi)
        zw = wz * law.z_factor(np.sum(z ** 2, axis=-1))
        chunk = max(1, CHUNK_POINTS // len(z))
        total, mass = 0.0, 0.0
        for start in range(0, len(w_nodes), chunk):
            w = w_nodes[start:start + chunk]
            depth = extent * np.exp(-w)
            rho = np.sqrt(2.0 * law.slice_dim * depth * w)
            spatial = x - rho[:, None, None] * z[None, :, :]
            times = np.broadcast_to((t - depth)[:, None, None], spatial.shape[:-1] + (1,))
            values = f(np.concatenate([spatial, times], axis=-1))
            contrib = w_weights[start:start + chunk, None] * zw[None, :] * values
            total += float(np.sum(contrib))
            mass += float(np.sum(np.abs(contrib)))
        return law.scale * total, abs(law.scale) * mass

    return _refine(compute, quad, label)

def _weighted(f: ScalarField, weight: ScalarField) -> ScalarField:
    return ScalarField(
        arity=f.arity,
        spatial_dim=f.spatial_dim,
        evaluator=lambda p: f(p) * weight(p),
        label=f"{f.label}*{weight.label}",
    )

def integrate_heatball(
    f: ScalarField,
    spec: HeatballSpec,
    weight: WeightLike = Weight.UNIT,
    quad: QuadratureConfig = QuadratureConfig(),
) -> float:
    """
    Integrate f * weight over the heatball E(x,t;r).

    Args:
        f (ScalarField): Integrand on R^n x R.
        spec (HeatballSpec): The heatball.
        weight (WeightLike): A named weight or a user field multiplying f.
        quad (QuadratureConfig): Quadrature settings.

    Returns:
        float: The integral.

    Raises:
        InvalidParameterError: If the weight does not apply to heatballs.
        QuadratureToleranceError: If refinement does not converge.
    """
    if isinstance(weight, ScalarField):
        f, weight = _weighted(f, weight), Weight.UNIT
    law = _slice_law(Weight(weight), spec)
    return _integrate_slices(f, spec, law, quad, f"heatball integral ({Weight(weight).value})")

def integrate_modified_heatball(
    f: ScalarField,
    spec: ModifiedHeatballSpec,
    quad: QuadratureConfig = QuadratureConfig(),
    weight: WeightLike = Weight.MODIFIED_KERNEL,
) -> float:
    """
    Integrate f against K_r over the modified heatball E_m(x,t;r).

    Passing weight=Weight.UNIT integrates f over E_m with no kernel, which
    gives |E_m(x,t;r)| for f ≡ 1.

    Args:
        f (ScalarField): Integrand on R^n x R.
        spec (ModifiedHeatballSpec): The modified heatball.
        quad (QuadratureConfig): Quadrature settings.
        weight (WeightLike): MODIFIED_KERNEL, UNIT or a user field.

    Returns:
        float: The integral.

    Raises:
        UnsupportedExtraDimensionError: If m < 3.
    """
    if spec.extra_dim < 3:
        raise UnsupportedExtraDimensionError(f"modified heatballs need m >= 3, got m = {spec.extra_dim}")
    if isinstance(weight, ScalarField):
        f, weight = _weighted(f, weight), Weight.UNIT
    law = _slice_law(Weight(weight), spec)
    return _integrate_slices(f, spec, law, quad, f"modified heatball integral ({Weight(weight).value})")

def integrate_region(f: ScalarField, region: WeightedRegion, quad: QuadratureConfig = QuadratureConfig()) -> float:
    """
    Integrate a field over a weighted region, dispatching on the region type.

    Args:
        f (ScalarField): The integrand.
        region (WeightedRegion): Region and weight.
        quad (QuadratureConfig): Quadrature settings.

    Returns:
        float: The integral.
    """
    spec = region.region
    if isinstance(spec, ModifiedHeatballSpec):
        return integrate_modified_heatball(f, spec, quad, region.weight)
    if isinstance(spec, HeatballSpec):
        return integrate_heatball(f, spec, region.weight, quad)
    if region.weight != Weight.UNIT:
        raise InvalidParameterError("balls only carry the unit weight")
    return integrate_ball(f, spec, quad)

def pointwise_weight(region: WeightedRegion, points: np.ndarray) -> np.ndarray:
    """
    Evaluate a region's named weight at points inside it.

    Args:
        region (WeightedRegion): Region and weight.
        points (np.ndarray): Points (..., arity) inside the region, depth > 0.

    Returns:
        np.ndarray: Weight values.
    """
    spec = region.region
    points = np.asarray(points, dtype=float)
    if region.weight == Weight.UNIT:
        return np.ones(points.shape[:-1])
    if isinstance(spec, BallSpec):
        raise InvalidParameterError("balls only carry the unit weight")
    n = spec.spatial_dim
    offsets = spec.x - points[..., :n]
    depth = spec.t - points[..., n]
    if region.weight == Weight.HEATBALL_KERNEL:
        return heatball_kernel_weight(offsets, depth, n)
    if region.weight == Weight.LOG_KERNEL:
        return log_kernel(offsets, depth, spec.radius, n)
    if isinstance(spec, ModifiedHeatballSpec):
        return modified_kernel(offsets, depth, spec.radius, n, spec.extra_dim)
    raise InvalidParameterError("the modified kernel needs a modified heatball")

def _unit_grid(dim: int, points: int) -> np.ndarray:
    axis = np.linspace(-1.0, 1.0, points)
    grid = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    return grid[np.sum(grid ** 2, axis=-1) <= 1.0 + 1e-12]

def _project_to_ball(z: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(z, axis=-1, keepdims=True)
    return np.where(norms > 1.0, z / np.maximum(norms, 1e-300), z)

def max_on_region(
    g: Optional[ScalarField],
    region: WeightedRegion,
    quad: QuadratureConfig = QuadratureConfig(),
) -> MaxEstimate:
    """
    Estimate sup of g * weight over a region by grid scan and two local refinements.

    Heatball points are parametrised by a depth fraction q in (0, 1], with depth
    q^γ r^2/4π (γ = grading_exponent), and z in the unit ball of the slice. The
    result is a lower estimate; refinement_delta records how much the two local
    refinements raised it.

    Args:
        g (Optional[ScalarField]): The field; None scans the weight alone.
        region (WeightedRegion): Region and weight.
        quad (QuadratureConfig): Supplies scan_points and grading_exponent.

    Returns:
        MaxEstimate: The refined maximum, the initial scan maximum and the maximizer.
    """
    spec = region.region
    gamma_exp = quad.grading_exponent

    if isinstance(spec, BallSpec):
        n = spec.dim
        center = np.asarray(spec.center, dtype=float)

        def to_points(params: np.ndarray) -> np.ndarray:
            return center + spec.radius * params

        params = _unit_grid(n, quad.scan_points)
        steps = np.full(n, 2.0 / (quad.scan_points - 1))
    else:
        n = spec.spatial_dim
        slice_dim = spec.total_dim if isinstance(spec, ModifiedHeatballSpec) else n
        extent = spec.time_extent

        def to_points(params: np.ndarray) -> np.ndarray:
            depth = params[:, 0] ** gamma_exp * extent
            log_term = np.log(extent / depth)
            rho = np.sqrt(2.0 * slice_dim * depth * log_term)
            spatial = spec.x - rho[:, None] * params[:, 1:]
            return np.column_stack([spatial, spec.t - depth])

        z = _unit_grid(n, quad.scan_points)
        fractions = np.arange(1, quad.scan_points + 1) / quad.scan_points
        params = np.column_stack([np.repeat(fractions, len(z)), np.tile(z, (len(fractions), 1))])
        steps = np.concatenate([[1.0 / quad.scan_points], np.full(n, 2.0 / (quad.scan_points - 1))])

    def evaluate(params: np.ndarray) -> np.ndarray:
        points = to_points(params)
        values = pointwise_weight(region, points)
        if g is not None:
            values = values * g(points)
        return np.asarray(values, dtype=float)

    values = evaluate(params)
    best = int(np.argmax(values))
    scan_value, best_params = float(values[best]), params[best]
    value = scan_value
    offsets = np.stack(np.meshgrid(*([[-1.0, 0.0, 1.0]] * params.shape[1]), indexing="ij"), axis=-1).reshape(-1, params.shape[1])
    for level in (1, 2):
        local = best_params + offsets * steps / 2 ** level
        if isinstance(spec, BallSpec):
            local = _project_to_ball(local)
        else:
            local[:, 0] = np.clip(local[:, 0], 1e-12, 1.0)
            local[:, 1:] = _project_to_ball(local[:, 1:])
        local_values = evaluate(local)
        idx = int(np.argmax(local_values))
        if local_values[idx] > value:
            value, best_params = float(local_values[idx]), local[idx]
    argmax = to_points(best_params[None, :])[0]
    logger.debug("max scan %.6g refined %.6g", scan_value, value)
    return MaxEstimate(
        value=value,
        scan_value=scan_value,
        refinement_delta=value - scan_value,
        argmax=tuple(float(v) for v in argmax),
    )
