"""
Level set service module.
This module provides grid estimates of sublevel and superlevel set measures
and L^p norms over box and ball domains, plus the Chebyshev, Hölder and
Monte Carlo cross-checks built on them.

Cells of a uniform grid over the domain's bounding box are classified by
their center value; a cell belongs to a ball domain when its center does.
Each estimate carries an inner/outer bracket from the minimum and maximum
of |u| over the cell's corners and center.
"""
import itertools
import logging
import math
from typing import NamedTuple, Optional, Tuple

import numpy as np

from app.api.models.field import ScalarField
from app.api.schemas.geometry import BallDomain, BoxDomain, DomainLike
from app.api.schemas.reports import ChebyshevCheck, LevelSetEstimate, NormEstimate
from app.api.utils.errors import InvalidParameterError
from app.api.utils.settings import default_resolution

logger = logging.getLogger(__name__)

class CellGrid(NamedTuple):
    """
    |u| sampled on the cells of a domain grid.

    Attributes:
        center_values: |u| at included cell centers.
        low: Minimum of |u| over each included cell's corners and center.
        high: Maximum of |u| over each included cell's corners and center.
        cell_volume: Volume of one cell.
        resolution: Cells per axis.
    """
    center_values: np.ndarray
    low: np.ndarray
    high: np.ndarray
    cell_volume: float
    resolution: int

def _resolve(dom: DomainLike, resolution: Optional[int]) -> int:
    resolution = default_resolution(dom.dim) if resolution is None else int(resolution)
    if resolution < 8:
        raise InvalidParameterError(f"resolution must be at least 8, got {resolution}")
    return resolution

def _mesh(axes) -> np.ndarray:
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

def sample_cells(f: ScalarField, dom: DomainLike, resolution: Optional[int] = None) -> CellGrid:
    """
    Sample |u| at cell centers and corners.

    Args:
        f (ScalarField): The field.
        dom (DomainLike): The domain.
        resolution (Optional[int]): Cells per axis; defaults by dimension.

    Returns:
        CellGrid: The sampled grid restricted to the domain.
    """
    resolution = _resolve(dom, resolution)
    if dom.is_empty:
        empty = np.zeros(0)
        return CellGrid(empty, empty, empty, 0.0, resolution)
    lower, upper = dom.bounding_box()
    d = dom.dim
    edges = [np.linspace(lo, hi, resolution + 1) for lo, hi in zip(lower, upper)]
    mids = [(e[:-1] + e[1:]) / 2.0 for e in edges]
    center_points = _mesh(mids)
    centers = np.abs(f(center_points))
    vertices = np.abs(f(_mesh(edges)))
    low, high = centers.copy(), centers.copy()
    for corner in itertools.product((0, 1), repeat=d):
        block = vertices[tuple(slice(o, o + resolution) for o in corner)]
        np.minimum(low, block, out=low)
        np.maximum(high, block, out=high)
    mask = dom.contains(center_points) if isinstance(dom, BallDomain) else np.ones(centers.shape, dtype=bool)
    cell_volume = float(np.prod((upper - lower) / resolution))
    return CellGrid(centers[mask], low[mask], high[mask], cell_volume, resolution)

def _estimate(grid: CellGrid, c: float, direction: str) -> LevelSetEstimate:
    if c < 0:
        raise InvalidParameterError(f"threshold must be nonnegative, got {c}")
    if direction == "superlevel":
        estimate = np.count_nonzero(grid.center_values >= c)
        inner = np.count_nonzero(grid.low >= c)
        outer = np.count_nonzero(grid.high >= c)
    else:
        estimate = np.count_nonzero(grid.center_values <= c)
        inner = np.count_nonzero(grid.high <= c)
        outer = np.count_nonzero(grid.low <= c)
    return LevelSetEstimate(
        threshold=c,
        direction=direction,
        estimate=estimate * grid.cell_volume,
        inner=inner * grid.cell_volume,
        outer=outer * grid.cell_volume,
        resolution=grid.resolution,
    )

def measure_superlevel(f: ScalarField, dom: DomainLike, c: float, resolution: Optional[int] = None) -> LevelSetEstimate:
    """
    Estimate |{x in Ω : |u(x)| >= c}|.

    Args:
        f (ScalarField): The field.
        dom (DomainLike): The domain.
        c (float): The threshold, c >= 0.
        resolution (Optional[int]): Cells per axis, at least 8.

    Returns:
        LevelSetEstimate: Midpoint estimate with inner/outer bracket.
    """
    return _estimate(sample_cells(f, dom, resolution), c, "superlevel")

def measure_sublevel(f: ScalarField, dom: DomainLike, c: float, resolution: Optional[int] = None) -> LevelSetEstimate:
    """
    Estimate |{x in Ω : |u(x)| <= c}|, the complement of the superlevel set up to {|u| = c}.

    Args:
        f (ScalarField): The field.
        dom (DomainLike): The domain.
        c (float): The threshold, c >= 0.
        resolution (Optional[int]): Cells per axis, at least 8.

    Returns:
        LevelSetEstimate: Midpoint estimate with inner/outer bracket.
    """
    return _estimate(sample_cells(f, dom, resolution), c, "sublevel")

def conjugate_exponent(p: float) -> float:
    """
    p' with 1/p + 1/p' = 1, 1' = ∞ and ∞' = 1.

    Args:
        p (float): Exponent in [1, ∞].

    Returns:
        float: The conjugate exponent.

    Raises:
        InvalidParameterError: If p < 1.
    """
    if not p >= 1:
        raise InvalidParameterError(f"exponent must be at least 1, got {p}")
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)

def indicator_norm(measure: float, q: float) -> float:
    """
    ‖1_S‖_{L^q} = |S|^{1/q}, which is 1 for q = ∞ and |S| > 0.

    Args:
        measure (float): |S|.
        q (float): The exponent.

    Returns:
        float: The norm.
    """
    if measure <= 0:
        return 0.0
    if math.isinf(q):
        return 1.0
    return measure ** (1.0 / q)

def _clip(dom: DomainLike, points: np.ndarray) -> np.ndarray:
    if isinstance(dom, BoxDomain):
        lower, upper = dom.bounding_box()
        return np.clip(points, lower, upper)
    center = np.asarray(dom.center, dtype=float)
    offsets = points - center
    norms = np.linalg.norm(offsets, axis=-1, keepdims=True)
    scale = np.where(norms > dom.radius, dom.radius / np.maximum(norms, 1e-300), 1.0)
    return center + offsets * scale

def sup_norm(f: ScalarField, dom: DomainLike, resolution: Optional[int] = None) -> NormEstimate:
    """
    Grid max of |u| over centers and vertices, refined twice near the maximizer.

    Args:
        f (ScalarField): The field.
        dom (DomainLike): The domain.
        resolution (Optional[int]): Cells per axis.

    Returns:
        NormEstimate: p = ∞ estimate with the refinement delta.
    """
    resolution = _resolve(dom, resolution)
    if dom.is_empty:
        return NormEstimate(p=math.inf, value=0.0, resolution=resolution)
    lower, upper = dom.bounding_box()
    edges = [np.linspace(lo, hi, resolution + 1) for lo, hi in zip(lower, upper)]
    mids = [(e[:-1] + e[1:]) / 2.0 for e in edges]
    points = np.concatenate([_mesh(edges).reshape(-1, dom.dim), _mesh(mids).reshape(-1, dom.dim)])
    points = points[dom.contains(points)]
    values = np.abs(f(points))
    best = int(np.argmax(values))
    scan_value, best_point = float(values[best]), points[best]
    value = scan_value
    step = (upper - lower) / resolution
    offsets = np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=dom.dim)))
    for level in (1, 2):
        local = _clip(dom, best_point + offsets * step / 2 ** level)
        local_values = np.abs(f(local))
        idx = int(np.argmax(local_values))
        if local_values[idx] > value:
            value, best_point = float(local_values[idx]), local[idx]
    return NormEstimate(p=math.inf, value=value, resolution=resolution, refinement_delta=value - scan_value)

def lp_norm(f: ScalarField, dom: DomainLike, p: float, resolution: Optional[int] = None) -> NormEstimate:
    """
    Midpoint-rule estimate of ‖u‖_{L^p(Ω)}; p = ∞ gives the grid max.

    Args:
        f (ScalarField): The field.
        dom (DomainLike): The domain.
        p (float): Exponent in [1, ∞].
        resolution (Optional[int]): Cells per axis.

    Returns:
        NormEstimate: The estimate.
    """
    if not p >= 1:
        raise InvalidParameterError(f"exponent must be at least 1, got {p}")
    if math.isinf(p):
        return sup_norm(f, dom, resolution)
    grid = sample_cells(f, dom, resolution)
    total = float(np.sum(grid.center_values ** p)) * grid.cell_volume
    return NormEstimate(p=p, value=total ** (1.0 / p), resolution=grid.resolution)

def superlevel_product(
    f: ScalarField, dom: DomainLike, c: float, p: float, resolution: Optional[int] = None
) -> Tuple[NormEstimate, LevelSetEstimate, float, float]:
    """
    ‖u‖_p · ‖1_S‖_{p'} for S = {|u| >= c}, using the inner bracket of |S|.

    Args:
        f (ScalarField): The field.
        dom (DomainLike): The domain.
        c (float): The threshold.
        p (float): The exponent.
        resolution (Optional[int]): Cells per axis.

    Returns:
        Tuple: (norm, superlevel estimate, indicator norm, product).
    """
    norm = lp_norm(f, dom, p, resolution)
    level = measure_superlevel(f, dom, c, resolution)
    ind = indicator_norm(level.inner, conjugate_exponent(p))
    return norm, level, ind, norm.value * ind

def check_two_thresholds(
    f: ScalarField, dom: DomainLike, c1: float, c2: float, p: float, resolution: Optional[int] = None
) -> Tuple[bool, float]:
    """
    Check ‖u‖_p · |{|u| >= c1}|^{1/p'} >= c2.

    Lowering either threshold keeps a true verdict true.

    Args:
        f (ScalarField): The field.
        dom (DomainLike): The domain.
        c1 (float): Level defining the superlevel set.
        c2 (float): Required lower bound.
        p (float): The exponent.
        resolution (Optional[int]): Cells per axis.

    Returns:
        Tuple[bool, float]: The verdict and the product.
    """
    _, _, _, lhs = superlevel_product(f, dom, c1, p, resolution)
    return lhs >= c2, lhs

def chebyshev_check(f: ScalarField, dom: DomainLike, eps: float, p: float, resolution: Optional[int] = None) -> ChebyshevCheck:
    """
    Check ε |{|u| >= ε}|^{1/p} <= ‖u‖_p with the outer bracket on the left.

    Args:
        f (ScalarField): The field.
        dom (DomainLike): The domain.
        eps (float): ε > 0.
        p (float): The exponent.
        resolution (Optional[int]): Cells per axis.

    Returns:
        ChebyshevCheck: Both sides and the verdict.
    """
    if eps <= 0:
        raise InvalidParameterError(f"eps must be positive, got {eps}")
    level = measure_superlevel(f, dom, eps, resolution)
    lhs = eps * indicator_norm(level.outer, p)
    rhs = lp_norm(f, dom, p, resolution).value
    return ChebyshevCheck(eps=eps, p=p, lhs=lhs, rhs=rhs, holds=bool(lhs <= rhs * (1.0 + 1e-12)))

def holder_product_check(
    f: ScalarField, dom: DomainLike, c: float, p: float, resolution: Optional[int] = None
) -> Tuple[bool, float, float]:
    """
    Check ‖u‖_p · ‖1_S‖_{p'} >= ∫_S |u| for S = {|u| >= c}, all on the same midpoint cells.

    Args:
        f (ScalarField): The field.
        dom (DomainLike): The domain.
        c (float): The threshold.
        p (float): The exponent.
        resolution (Optional[int]): Cells per axis.

    Returns:
        Tuple[bool, float, float]: The verdict, the product and the mass over S.
    """
    grid = sample_cells(f, dom, resolution)
    in_set = grid.center_values >= c
    mass = float(np.sum(grid.center_values[in_set])) * grid.cell_volume
    measure = np.count_nonzero(in_set) * grid.cell_volume
    norm = lp_norm(f, dom, p, grid.resolution).value
    product = norm * indicator_norm(measure, conjugate_exponent(p))
    return bool(product >= mass * (1.0 - 1e-12)), product, mass

def monte_carlo_superlevel(
    f: ScalarField, dom: DomainLike, c: float, samples: int = 100_000, seed: int = 0
) -> Tuple[float, float]:
    """
    Seeded Monte Carlo estimate of |{|u| >= c}| with its standard error.

    Args:
        f (ScalarField): The field.
        dom (DomainLike): The domain.
        c (float): The threshold.
        samples (int): Points drawn uniformly in the bounding box.
        seed (int): Generator seed.

    Returns:
        Tuple[float, float]: (estimate, standard error).
    """
    if dom.is_empty:
        return 0.0, 0.0
    rng = np.random.default_rng(seed)
    lower, upper = dom.bounding_box()
    points = rng.uniform(lower, upper, size=(samples, dom.dim))
    hits = dom.contains(points) & (np.abs(f(points)) >= c)
    box = float(np.prod(upper - lower))
    fraction = float(np.mean(hits))
    return box * fraction, box * math.sqrt(fraction * (1.0 - fraction) / samples)
