"""
Constants service module.
This module computes the explicit constants of the Laplace and heat
sublevel inequalities, the Chebyshev-derived constant, and the mean-value
chains those constants come from.
"""
import logging
import math
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np

from app.api.models.average import AverageFamily
from app.api.models.field import ScalarField
from app.api.schemas.geometry import DomainLike, ModifiedHeatballSpec
from app.api.schemas.quadrature import QuadratureConfig, Weight, WeightedRegion
from app.api.schemas.reports import ConstantReport
from app.api.services.averages import ball_average, modified_heatball_average
from app.api.services.fields import make_constant
from app.api.services.geometry import (
    shrink_domain,
    shrink_domain_heat,
    unit_ball_volume,
    unit_heatball_volume,
    unit_sphere_area,
)
from app.api.services.quadrature import integrate_modified_heatball, max_on_region
from app.api.utils.errors import (
    ConstantDerivationError,
    EmptyDomainError,
    InvalidParameterError,
    UnsupportedExtraDimensionError,
)
from app.api.utils.settings import SAFETY_FACTOR

logger = logging.getLogger(__name__)

# Points of the log grid searched by optimize_delta and optimize_radius
SEARCH_POINTS = 32

def _check_safety(safety: float) -> None:
    if not 0 < safety < 1:
        raise InvalidParameterError(f"safety factor must lie in (0, 1), got {safety}")

def laplace_cn(n: int) -> float:
    """
    C_n = |∂B_1|/|B_1| (1/(2n) - 1/(2(n+2))), the growth rate of φ'(r) = C_n r when Δu ≡ 1.

    Args:
        n (int): The dimension.

    Returns:
        float: C_n.

    Raises:
        ConstantDerivationError: If the value drifts from its simplification 1/(n+2).
    """
    value = unit_sphere_area(n) / unit_ball_volume(n) * (1.0 / (2 * n) - 1.0 / (2 * (n + 2)))
    if abs(value - 1.0 / (n + 2)) > 1e-12:
        raise ConstantDerivationError(f"C_{n} = {value} disagrees with 1/(n+2)")
    return value

def laplace_constant(dom: DomainLike, delta: float, safety: float = SAFETY_FACTOR) -> ConstantReport:
    """
    c = safety · min{(C_n/16)δ²|Ω_δ|, (1 + |B_{δ/2}|^{-1})^{-1}(C_n/16)δ²}.

    Args:
        dom (DomainLike): Ω in R^n.
        delta (float): δ > 0 with Ω_δ nonempty.
        safety (float): Margin in (0, 1).

    Returns:
        ConstantReport: c with both terms, C_n and |B_{δ/2}|.

    Raises:
        EmptyDomainError: If Ω_δ is empty.
    """
    _check_safety(safety)
    n = dom.dim
    shrunk = shrink_domain(dom, delta)
    if shrunk.is_empty:
        raise EmptyDomainError(f"Ω_δ is empty for δ = {delta}")
    cn = laplace_cn(n)
    base = cn / 16.0 * delta ** 2
    half_ball = unit_ball_volume(n) * (delta / 2.0) ** n
    terms = {
        "interior_term": base * shrunk.measure(),
        "ball_term": base / (1.0 + 1.0 / half_ball),
    }
    return ConstantReport(
        kind="laplace",
        c=safety * min(terms.values()),
        safety=safety,
        scale=delta,
        shrunk_measure=shrunk.measure(),
        terms=terms,
        intermediates={"C_n": cn, "half_ball_volume": half_ball},
    )

def kernel_maximum(R: float, n: int, m: int, quad: QuadratureConfig = QuadratureConfig()) -> Tuple[float, float]:
    """
    M_R, the grid maximum of K_R over E_m(R), and its refinement delta.

    Args:
        R (float): The radius.
        n (int): Spatial dimension.
        m (int): Extra dimension count.
        quad (QuadratureConfig): Scan settings.

    Returns:
        Tuple[float, float]: (maximum, refinement delta).
    """
    spec = ModifiedHeatballSpec(center=(0.0,) * (n + 1), radius=R, extra_dim=m)
    estimate = max_on_region(None, WeightedRegion(region=spec, weight=Weight.MODIFIED_KERNEL), quad)
    return estimate.value, estimate.refinement_delta

def modified_heatball_volume(R: float, n: int, m: int, quad: QuadratureConfig = QuadratureConfig()) -> float:
    """
    |E_m(x,t;R)| by quadrature with the unit weight.

    Args:
        R (float): The radius.
        n (int): Spatial dimension.
        m (int): Extra dimension count.
        quad (QuadratureConfig): Quadrature settings.

    Returns:
        float: The volume.
    """
    spec = ModifiedHeatballSpec(center=(0.0,) * (n + 1), radius=R, extra_dim=m)
    return integrate_modified_heatball(make_constant(1.0, n, parabolic=True), spec, quad, weight=Weight.UNIT)

def heat_cmn(n: int, m: int, quad: QuadratureConfig = QuadratureConfig()) -> float:
    """
    C_{m,n} = (m+n) |E(1)| / e^{m+n+2}, with |E(1)| in m+n spatial dimensions.

    Args:
        n (int): Spatial dimension.
        m (int): Extra dimension count.
        quad (QuadratureConfig): Quadrature settings.

    Returns:
        float: C_{m,n}.
    """
    total = m + n
    return total * unit_heatball_volume(total, quad) / math.e ** (total + 2)

def heat_constant(
    dom: DomainLike,
    R: float,
    m: int = 3,
    quad: QuadratureConfig = QuadratureConfig(),
    safety: float = SAFETY_FACTOR,
) -> ConstantReport:
    """
    c = safety · min{C_R^{-1}(C_{m,n}/16)R², (C_{m,n}/16)R², (C_{m,n}/16)R²|Ω_R|},
    with C_R = M_R(|E_m(R)| + 1).

    M_R is a grid maximum, so it is inflated by its refinement delta before use.

    Args:
        dom (DomainLike): Ω in R^n x R, time last.
        R (float): The modified heatball radius.
        m (int): Extra dimension count, at least 3.
        quad (QuadratureConfig): Quadrature settings.
        safety (float): Margin in (0, 1).

    Returns:
        ConstantReport: c with all three terms and M_R, |E_m|, C_R, C_{m,n}.

    Raises:
        UnsupportedExtraDimensionError: If m < 3.
        EmptyDomainError: If Ω_R is empty.
    """
    _check_safety(safety)
    if m < 3:
        raise UnsupportedExtraDimensionError(f"the heat constant needs m >= 3, got m = {m}")
    n = dom.dim - 1
    shrunk = shrink_domain_heat(dom, R, n, m)
    if shrunk.is_empty:
        raise EmptyDomainError(f"Ω_R is empty for R = {R}")
    kernel_max, delta = kernel_maximum(R, n, m, quad)
    m_r = kernel_max + delta
    volume = modified_heatball_volume(R, n, m, quad)
    c_r = m_r * (volume + 1.0)
    cmn = heat_cmn(n, m, quad)
    base = cmn / 16.0 * R ** 2
    terms = {
        "kernel_term": base / c_r,
        "radius_term": base,
        "interior_term": base * shrunk.measure(),
    }
    logger.debug("heat constant R=%.4g: M_R=%.6g |E_m|=%.6g C_mn=%.6g", R, m_r, volume, cmn)
    return ConstantReport(
        kind="heat",
        c=safety * min(terms.values()),
        safety=safety,
        scale=R,
        shrunk_measure=shrunk.measure(),
        terms=terms,
        intermediates={
            "M_R": m_r,
            "modified_heatball_volume": volume,
            "C_R": c_r,
            "C_mn": cmn,
        },
        diagnostics={"M_R_scan": kernel_max, "M_R_refinement_delta": delta},
    )

def _largest_admissible(admissible: Callable[[float], bool], upper: float, iterations: int = 60) -> float:
    low, high = 0.0, upper
    while admissible(high):
        low, high = high, 2.0 * high
    for _ in range(iterations):
        mid = 0.5 * (low + high)
        if admissible(mid):
            low = mid
        else:
            high = mid
    return low

def _log_grid_search(
    build: Callable[[float], ConstantReport], admissible: Callable[[float], bool], scale_guess: float, label: str
) -> ConstantReport:
    upper = _largest_admissible(admissible, scale_guess)
    if upper <= 0:
        raise EmptyDomainError(f"no admissible {label} for this domain")
    best: Optional[ConstantReport] = None
    for value in np.geomspace(1e-3 * upper, 0.999 * upper, SEARCH_POINTS):
        report = build(float(value))
        if best is None or report.c > best.c:
            best = report
    logger.info("optimal %s %.6g gives c = %.6e", label, best.scale, best.c)
    return best

def optimize_delta(dom: DomainLike, safety: float = SAFETY_FACTOR) -> ConstantReport:
    """
    The Laplace constant at the δ maximizing c over a 32-point log grid.

    Args:
        dom (DomainLike): Ω in R^n.
        safety (float): Margin in (0, 1).

    Returns:
        ConstantReport: The best report.
    """
    lower, upper = dom.bounding_box()
    return _log_grid_search(
        lambda d: laplace_constant(dom, d, safety),
        lambda d: d > 0 and not shrink_domain(dom, d).is_empty,
        float(np.max(upper - lower)),
        "delta",
    )

def optimize_radius(
    dom: DomainLike, m: int = 3, quad: QuadratureConfig = QuadratureConfig(), safety: float = SAFETY_FACTOR
) -> ConstantReport:
    """
    The heat constant at the R maximizing c over a 32-point log grid.

    Args:
        dom (DomainLike): Ω in R^n x R.
        m (int): Extra dimension count.
        quad (QuadratureConfig): Quadrature settings.
        safety (float): Margin in (0, 1).

    Returns:
        ConstantReport: The best report.
    """
    n = dom.dim - 1
    lower, upper = dom.bounding_box()
    return _log_grid_search(
        lambda r: heat_constant(dom, r, m, quad, safety),
        lambda r: r > 0 and not shrink_domain_heat(dom, r, n, m).is_empty,
        float(np.max(upper - lower)),
        "radius",
    )

def chebyshev_constant(C: float, delta_exp: float, omega_measure: float) -> float:
    """
    Constant of the inequality derived from a sublevel estimate |{|u| <= ε}| <= C ε^δ.

    ε solves C ε^δ = |Ω|/2; the constant is ε when |Ω|/2 >= 1 and ε|Ω|/2 otherwise.

    Args:
        C (float): The sublevel constant, C > 0.
        delta_exp (float): The sublevel exponent δ > 0.
        omega_measure (float): |Ω| > 0.

    Returns:
        float: The constant.
    """
    if C <= 0 or delta_exp <= 0 or omega_measure <= 0:
        raise InvalidParameterError("C, delta_exp and omega_measure must be positive")
    half = omega_measure / 2.0
    eps = (half / C) ** (1.0 / delta_exp)
    return eps if half >= 1.0 else eps * half

def rescale_constant(c: float, A: float) -> Tuple[float, float]:
    """
    Threshold and bound (cA, cA) for the class Du >= A, from applying the inequality to v/A.

    Args:
        c (float): The constant for Du >= 1.
        A (float): The operator lower bound, A > 0.

    Returns:
        Tuple[float, float]: (threshold, bound).
    """
    if A <= 0:
        raise InvalidParameterError(f"A must be positive, got {A}")
    return c * A, c * A

def laplace_mean_value_chain(
    field: ScalarField,
    x,
    delta: float,
    c: float,
    quad: QuadratureConfig = QuadratureConfig(),
) -> Dict[str, Union[float, bool]]:
    """
    Evaluate the mean-value chain behind the Laplace constant at a point x of Ω_δ.

    With φ the ball average about x, Δu >= 1 gives
    u(x) = φ(δ/2) - ∫_0^{δ/2} φ' <= φ(δ/2) - C_n δ²/8. If the inequality failed
    for u with constant c, φ(δ/2) would be at most (1 + |B_{δ/2}|^{-1})c, giving
    u(x) <= (1 + |B_{δ/2}|^{-1})c - C_n δ²/8.

    Args:
        field (ScalarField): A field with Δu >= 1.
        x: The point.
        delta (float): δ.
        c (float): The constant under test.
        quad (QuadratureConfig): Quadrature settings.

    Returns:
        Dict: u(x), φ(δ/2), both bounds and whether the unconditional step holds.
    """
    point = tuple(float(v) for v in np.atleast_1d(x))
    n = len(point)
    cn = laplace_cn(n)
    fam = AverageFamily(kind="ball", field=field, center=point, max_radius=delta / 2.0, quad=quad)
    phi = ball_average(fam, delta / 2.0)
    u_x = float(field(np.asarray(point)))
    half_ball = unit_ball_volume(n) * (delta / 2.0) ** n
    mean_value_bound = phi - cn * delta ** 2 / 8.0
    return {
        "u_x": u_x,
        "phi_half_delta": phi,
        "mean_value_bound": mean_value_bound,
        "hypothesis_bound": (1.0 + 1.0 / half_ball) * c - cn * delta ** 2 / 8.0,
        "holds": bool(u_x <= mean_value_bound + 1e-10 * max(1.0, abs(u_x))),
    }

def heat_mean_value_chain(
    field: ScalarField,
    center,
    R: float,
    m: int = 3,
    quad: QuadratureConfig = QuadratureConfig(),
) -> Dict[str, Union[float, bool]]:
    """
    Evaluate the modified-heatball chain: Hu >= 1 gives u(x,t) <= φ(R) - C_{m,n} R²/2.

    Args:
        field (ScalarField): A parabolic field with Hu >= 1.
        center: The point (x, t).
        R (float): The radius.
        m (int): Extra dimension count.
        quad (QuadratureConfig): Quadrature settings.

    Returns:
        Dict: u(x,t), φ(R), the bound and whether it holds.
    """
    point = tuple(float(v) for v in center)
    n = len(point) - 1
    fam = AverageFamily(kind="modified-heatball", field=field, center=point, max_radius=R, extra_dim=m, quad=quad)
    phi = modified_heatball_average(fam, R)
    u_center = float(field(np.asarray(point)))
    bound = phi - heat_cmn(n, m, quad) * R ** 2 / 2.0
    return {
        "u_center": u_center,
        "phi_R": phi,
        "mean_value_bound": bound,
        "holds": bool(u_center <= bound + 1e-10 * max(1.0, abs(u_center))),
    }
