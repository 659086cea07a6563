"""
Average service module.
This module provides the ball, heatball and modified-heatball average
families φ(r), their derivative formulas, and the consistency checks that
tie each formula to finite differences of φ.
"""
import logging
import math
from typing import Dict, List, Sequence, Tuple

import numpy as np

from app.api.models.average import AverageFamily
from app.api.models.field import ScalarField
from app.api.schemas.geometry import BallSpec, HeatballSpec, ModifiedHeatballSpec
from app.api.schemas.quadrature import QuadratureConfig, Weight
from app.api.schemas.reports import DerivativeCheck, DerivativeEstimate, ReconstructionReport
from app.api.services.base import BaseService, ServiceStrategy
from app.api.services.fields import lift, operator_field
from app.api.services.geometry import ball_volume, unit_heatball_volume
from app.api.services.quadrature import integrate_ball, integrate_heatball, integrate_modified_heatball
from app.api.utils.errors import InvalidParameterError, RadiusOutOfRangeError, UnsupportedExtraDimensionError
from app.api.utils.rules import gauss_legendre

logger = logging.getLogger(__name__)

class BallStrategy(ServiceStrategy[BallSpec]):
    """
    φ(r) = |B_r|^{-1} ∫_{B_r(x)} u, φ'(r) = |B_r|^{-1} ∫_{B_r(x)} (r² - |x-y|²)/(2r) Δu(y) dy.
    """
    kind = "ball"

    def region(self, center: Sequence[float], radius: float) -> BallSpec:
        return BallSpec(center=tuple(center), radius=radius)

    def average(self, field: ScalarField, center: Sequence[float], radius: float, quad: QuadratureConfig) -> float:
        ball = self.region(center, radius)
        return integrate_ball(field, ball, quad) / ball_volume(ball)

    def derivative(
        self, field: ScalarField, center: Sequence[float], radius: float, quad: QuadratureConfig
    ) -> DerivativeEstimate:
        ball = self.region(center, radius)
        laplacian, degraded = operator_field(field, "laplacian")
        x = np.asarray(center, dtype=float)

        def integrand(points: np.ndarray) -> np.ndarray:
            weight = (radius ** 2 - np.sum((points - x) ** 2, axis=-1)) / (2.0 * radius)
            return weight * laplacian(points)

        weighted = ScalarField(arity=field.arity, spatial_dim=field.spatial_dim, evaluator=integrand, label="ball-derivative")
        return DerivativeEstimate(value=integrate_ball(weighted, ball, quad) / ball_volume(ball), degraded=degraded)

class HeatballStrategy(ServiceStrategy[HeatballSpec]):
    """
    φ(r) = (4r^n)^{-1} ∫_{E(x,t;r)} u |x-y|²/(t-s)², φ'(r) = n r^{-(n+1)} ∫_{E(x,t;r)} Hu log(r^n Φ).
    """
    kind = "heatball"

    def region(self, center: Sequence[float], radius: float) -> HeatballSpec:
        return HeatballSpec(center=tuple(center), radius=radius)

    def average(self, field: ScalarField, center: Sequence[float], radius: float, quad: QuadratureConfig) -> float:
        spec = self.region(center, radius)
        n = spec.spatial_dim
        return integrate_heatball(field, spec, Weight.HEATBALL_KERNEL, quad) / (4.0 * radius ** n)

    def derivative(
        self, field: ScalarField, center: Sequence[float], radius: float, quad: QuadratureConfig
    ) -> DerivativeEstimate:
        spec = self.region(center, radius)
        n = spec.spatial_dim
        heat, degraded = operator_field(field, "heat")
        value = n / radius ** (n + 1) * integrate_heatball(heat, spec, Weight.LOG_KERNEL, quad)
        return DerivativeEstimate(value=value, degraded=degraded)

class ModifiedHeatballStrategy(ServiceStrategy[ModifiedHeatballSpec]):
    """
    φ(r) = ∫_{E_m(x,t;r)} K_r(x-y,t-s) u(y,s) dy ds.

    The derivative is the heatball formula in m+n dimensions applied to the
    lifted field ũ(ξ,x,t) = u(x,t), whose heat operator is Hu lifted.
    """
    kind = "modified-heatball"

    def __init__(self, extra_dim: int = 3):
        if extra_dim < 3:
            raise UnsupportedExtraDimensionError(f"modified heatballs need m >= 3, got m = {extra_dim}")
        self.extra_dim = extra_dim

    def region(self, center: Sequence[float], radius: float) -> ModifiedHeatballSpec:
        return ModifiedHeatballSpec(center=tuple(center), radius=radius, extra_dim=self.extra_dim)

    def average(self, field: ScalarField, center: Sequence[float], radius: float, quad: QuadratureConfig) -> float:
        return integrate_modified_heatball(field, self.region(center, radius), quad)

    def lifted_center(self, center: Sequence[float]) -> Tuple[float, ...]:
        return (0.0,) * self.extra_dim + tuple(float(c) for c in center)

    def derivative(
        self, field: ScalarField, center: Sequence[float], radius: float, quad: QuadratureConfig
    ) -> DerivativeEstimate:
        heat, degraded = operator_field(field, "heat")
        spec = HeatballSpec(center=self.lifted_center(center), radius=radius)
        total = spec.spatial_dim
        value = total / radius ** (total + 1) * integrate_heatball(lift(heat, self.extra_dim), spec, Weight.LOG_KERNEL, quad)
        return DerivativeEstimate(value=value, degraded=degraded)

class AverageService(BaseService):
    """
    Average service.
    Evaluates an AverageFamily through the strategy matching its kind.
    """
    def __init__(self, family: AverageFamily):
        """
        Initialize for a family.

        Args:
            family (AverageFamily): The family.
        """
        super().__init__(strategy_for(family))
        self.family = family

    def _check_radius(self, r: float, closed: bool = True) -> None:
        R = self.family.max_radius
        if not (0 < r <= R if closed else 0 < r < R):
            raise RadiusOutOfRangeError(f"radius {r} outside (0, {R}{']' if closed else ')'}")

    def average(self, r: float) -> float:
        """
        Evaluate φ(r).

        Args:
            r (float): Radius in (0, R].

        Returns:
            float: φ(r).
        """
        self._check_radius(r)
        return self.strategy.average(self.family.field, self.family.center, r, self.family.quad)

    def derivative(self, r: float) -> DerivativeEstimate:
        """
        Evaluate φ'(r) from the operator-weighted formula.

        Args:
            r (float): Radius in (0, R).

        Returns:
            DerivativeEstimate: φ'(r) and the degraded flag.
        """
        self._check_radius(r, closed=False)
        return self.strategy.derivative(self.family.field, self.family.center, r, self.family.quad)

def strategy_for(family: AverageFamily) -> ServiceStrategy:
    """
    Pick the strategy for a family kind.

    Args:
        family (AverageFamily): The family.

    Returns:
        ServiceStrategy: The matching strategy.
    """
    if family.kind == "ball":
        return BallStrategy()
    if family.kind == "heatball":
        return HeatballStrategy()
    return ModifiedHeatballStrategy(family.extra_dim)

def _require(family: AverageFamily, *kinds: str) -> AverageService:
    if family.kind not in kinds:
        raise InvalidParameterError(f"expected a {' or '.join(kinds)} family, got {family.kind}")
    return AverageService(family)

def ball_average(fam: AverageFamily, r: float) -> float:
    """
    The normalised ball integral |B_r|^{-1} ∫_{B_r(x)} u.

    Args:
        fam (AverageFamily): A ball family.
        r (float): Radius in (0, R].

    Returns:
        float: φ(r).

    Raises:
        RadiusOutOfRangeError: If r is outside (0, R].
    """
    return _require(fam, "ball").average(r)

def ball_average_derivative(fam: AverageFamily, r: float) -> DerivativeEstimate:
    """
    φ'(r) = |B_r|^{-1} ∫_{B_r(x)} (r² - |x-y|²)/(2r) Δu(y) dy.

    Args:
        fam (AverageFamily): A ball family.
        r (float): Radius in (0, R).

    Returns:
        DerivativeEstimate: The value, degraded when Δu came from finite differences.

    Raises:
        RadiusOutOfRangeError: If r is outside the open interval (0, R).
    """
    return _require(fam, "ball").derivative(r)

def heatball_average(fam: AverageFamily, r: float) -> float:
    """
    (4r^n)^{-1} ∫_{E(x,t;r)} u |x-y|²/(t-s)².

    Args:
        fam (AverageFamily): A heatball family.
        r (float): Radius in (0, R].

    Returns:
        float: φ(r).
    """
    return _require(fam, "heatball").average(r)

def modified_heatball_average(fam: AverageFamily, r: float) -> float:
    """
    ∫_{E_m(x,t;r)} K_r u.

    Args:
        fam (AverageFamily): A modified-heatball family (m >= 3).
        r (float): Radius in (0, R].

    Returns:
        float: φ(r).
    """
    return _require(fam, "modified-heatball").average(r)

def heatball_average_derivative(fam: AverageFamily, r: float) -> DerivativeEstimate:
    """
    n r^{-(n+1)} ∫_{E(x,t;r)} Hu log(r^n Φ); for modified families the same
    formula in m+n dimensions applied to the lifted field.

    Args:
        fam (AverageFamily): A heatball or modified-heatball family.
        r (float): Radius in (0, R).

    Returns:
        DerivativeEstimate: The value, degraded when Hu came from finite differences.

    Raises:
        RadiusOutOfRangeError: If r is outside the open interval (0, R).
    """
    return _require(fam, "heatball", "modified-heatball").derivative(r)

def derivative_consistency(
    fam: AverageFamily,
    fractions: Sequence[float] = (0.3, 0.6, 0.9),
    step: float = 1e-3,
) -> List[DerivativeCheck]:
    """
    Compare φ'(r) from the derivative formula with (φ(r+h) - φ(r-h)) / 2h, h = step·r.

    The relative error is taken against max(|finite difference|, 1e-2) so that
    fields with φ' ≈ 0 report an absolute error.

    Args:
        fam (AverageFamily): The family.
        fractions (Sequence[float]): Radii as fractions of R; r + h must stay <= R.
        step (float): Relative difference step.

    Returns:
        List[DerivativeCheck]: One row per radius.
    """
    service = AverageService(fam)
    rows = []
    for fraction in fractions:
        r = fraction * fam.max_radius
        h = step * r
        formula = service.derivative(r)
        fd = (service.average(r + h) - service.average(r - h)) / (2.0 * h)
        rel_error = abs(formula.value - fd) / max(abs(fd), 1e-2)
        logger.debug("%s %s r=%.3g formula %.12g fd %.12g", fam.kind, fam.field.label, r, formula.value, fd)
        rows.append(DerivativeCheck(
            field=fam.field.label,
            kind=fam.kind,
            r=r,
            formula=formula.value,
            finite_difference=fd,
            rel_error=rel_error,
            degraded=formula.degraded,
        ))
    return rows

def reconstruct_center_value(fam: AverageFamily, nodes: int = 16, r_min_fraction: float = 1e-3) -> ReconstructionReport:
    """
    Recover u(center) = φ(R) - ∫_0^R φ'(r) dr.

    The integral runs by Gauss-Legendre over [r_min, R], r_min = r_min_fraction·R.
    Below r_min every kind uses the same model: φ(r) - u(center) quadratic in r,
    so φ' is linear through the origin and contributes r_min φ'(r_min) / 2.
    For balls this is φ' ~ C_n r; for heatballs and modified heatballs the
    weighted Hu integral over E(r) scales as r^{n+2} against the r^{n+1}
    normalization, again φ' ~ C r.

    Args:
        fam (AverageFamily): The family.
        nodes (int): Gauss-Legendre node count.
        r_min_fraction (float): r_min / R.

    Returns:
        ReconstructionReport: The direct and reconstructed center values.
    """
    service = AverageService(fam)
    R = fam.max_radius
    r_min = r_min_fraction * R
    rs, ws = gauss_legendre(nodes, r_min, R)
    integral = sum(w * service.derivative(r).value for r, w in zip(rs, ws))
    integral += 0.5 * r_min * service.derivative(r_min).value
    reconstructed = service.average(R) - integral
    center_value = float(fam.field(np.asarray(fam.center, dtype=float)))
    return ReconstructionReport(
        center_value=center_value,
        reconstructed=reconstructed,
        rel_error=abs(reconstructed - center_value) / max(abs(center_value), 1.0),
    )

def monotonicity_check(fam: AverageFamily, pairs: Sequence[Tuple[float, float]], rate: float) -> List[Dict[str, float]]:
    """
    Check φ(r2) - φ(r1) >= rate (r2² - r1²)/2 on sampled pairs r1 < r2.

    With Δu >= 1 and rate = C_n this is the growth forced by the derivative formula.

    Args:
        fam (AverageFamily): The family.
        pairs (Sequence[Tuple[float, float]]): Radius pairs.
        rate (float): The lower rate, e.g. C_n.

    Returns:
        List[Dict[str, float]]: Per pair the increase, the bound and whether it holds.
    """
    service = AverageService(fam)
    rows = []
    for r1, r2 in pairs:
        increase = service.average(r2) - service.average(r1)
        bound = rate * (r2 ** 2 - r1 ** 2) / 2.0
        rows.append({"r1": r1, "r2": r2, "increase": increase, "bound": bound, "holds": bool(increase >= bound * (1.0 - 1e-9))})
    return rows

def continuity_gap(fam: AverageFamily, r: float) -> float:
    """
    |φ(r) - u(center)|, which tends to 0 as r → 0.

    Args:
        fam (AverageFamily): The family.
        r (float): A small radius.

    Returns:
        float: The gap.
    """
    return abs(AverageService(fam).average(r) - float(fam.field(np.asarray(fam.center, dtype=float))))

def lower_bound_log_kernel(n: int, r: float, quad: QuadratureConfig = QuadratureConfig()) -> float:
    """
    n r^{-(n+1)} · n |E(r/e)|, the lower bound on φ'(r) when Hu >= 1.

    Args:
        n (int): Spatial dimension.
        r (float): Radius.
        quad (QuadratureConfig): Quadrature settings.

    Returns:
        float: The bound.
    """
    return n / r ** (n + 1) * n * (r / math.e) ** (n + 2) * unit_heatball_volume(n, quad)
