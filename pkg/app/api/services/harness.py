"""
Harness service module.
This module orchestrates end-to-end verification runs: inequality checks
with one shared constant across exponents, the det-Hessian counterexample
sweep, the lifting and change-of-variables checks, derivative-formula
checks, the rectangle demo and the constant and heatball-volume tables.

Every run returns a RunReport whose rows become report.csv and whose
details become report.json.
"""
import itertools
import logging
import math
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.api.models.average import AverageFamily
from app.api.models.field import ScalarField
from app.api.repositories.fields import field_repository
from app.api.schemas.geometry import BallDomain, BoxDomain, DomainLike, HeatballSpec, unit_box
from app.api.schemas.quadrature import QuadratureConfig, Weight
from app.api.schemas.reports import (
    ConstantReport,
    DerivativeCheck,
    InequalityReport,
    RunReport,
    SweepRow,
    format_exponent,
)
from app.api.schemas.run import OperatorName, RunConfig
from app.api.services import constants as constant_service
from app.api.services import levelsets
from app.api.services.averages import derivative_consistency
from app.api.services.fields import (
    compose_linear,
    finite_difference_operator,
    make_constant,
    make_gressman,
    make_heat_witness,
    make_rectangle_family,
    operator_function,
)
from app.api.services.geometry import heatball_volume, shrink_domain, shrink_domain_heat, unit_heatball_volume
from app.api.services.quadrature import integrate_heatball
from app.api.utils.errors import InvalidDimensionError, InvalidParameterError, OperatorHypothesisError, SingularMapError
from app.api.utils.settings import default_resolution

logger = logging.getLogger(__name__)

# Grid points per axis for operator hypothesis checks
HYPOTHESIS_POINTS_2D = 200
HYPOTHESIS_POINTS_3D = 40

# Tolerance of the Du >= 1 hypothesis (analytic, finite-difference)
HYPOTHESIS_TOL = 1e-9
HYPOTHESIS_TOL_DEGRADED = 1e-4

DERIVATIVE_TOL = {"ball": 1e-5, "heatball": 1e-4, "modified-heatball": 1e-4}

def hypothesis_grid(dom: DomainLike, points: Optional[int] = None) -> np.ndarray:
    """
    Vertices of a uniform grid over the domain, restricted to the domain.

    Args:
        dom (DomainLike): The domain.
        points (Optional[int]): Points per axis; defaults by dimension.

    Returns:
        np.ndarray: Grid points (k, dim).
    """
    if points is None:
        points = HYPOTHESIS_POINTS_2D if dom.dim <= 2 else HYPOTHESIS_POINTS_3D
    lower, upper = dom.bounding_box()
    axes = [np.linspace(lo, hi, points) for lo, hi in zip(lower, upper)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dom.dim)
    return grid[dom.contains(grid)]

class OperatorStrategy(ABC):
    """
    Operator strategy.
    Couples an operator with its hypothesis check and its constant.
    """
    operator: OperatorName

    def verify_hypothesis(self, field: ScalarField, dom: DomainLike, points: Optional[int] = None) -> Dict[str, Any]:
        """
        Check Du >= 1 on a grid of the domain.

        Args:
            field (ScalarField): The field.
            dom (DomainLike): The domain.
            points (Optional[int]): Grid points per axis.

        Returns:
            Dict[str, Any]: The minimum, its location and whether finite differences were used.

        Raises:
            OperatorHypothesisError: If the operator drops below 1 anywhere on the grid.
        """
        if dom.dim != field.arity:
            raise InvalidDimensionError(f"domain dimension {dom.dim} does not match {field.label}")
        func, degraded = operator_function(field, self.operator)
        grid = hypothesis_grid(dom, points)
        values = np.broadcast_to(np.asarray(func(grid), dtype=float), grid.shape[:-1])
        worst = int(np.argmin(values))
        tol = HYPOTHESIS_TOL_DEGRADED if degraded else HYPOTHESIS_TOL
        summary = {
            "operator": self.operator,
            "minimum": float(values[worst]),
            "argmin": [float(v) for v in grid[worst]],
            "points": int(len(grid)),
            "degraded": degraded,
        }
        if values[worst] < 1.0 - tol:
            raise OperatorHypothesisError(
                f"{self.operator} of {field.label} is {values[worst]:.6g} < 1 at {summary['argmin']}",
                point=grid[worst],
                value=float(values[worst]),
            )
        logger.info("%s >= 1 holds for %s on %d grid points (min %.6g)", self.operator, field.label, len(grid), values[worst])
        return summary

    @abstractmethod
    def constant(self, dom: DomainLike, config: RunConfig) -> ConstantReport:
        """
        Derive the constant of the inequality for this operator on the domain.

        Args:
            dom (DomainLike): The domain.
            config (RunConfig): Run settings (δ, R, m, safety, quadrature).

        Returns:
            ConstantReport: The constant with its ingredients.
        """
        pass

class LaplaceStrategy(OperatorStrategy):
    """
    Δu >= 1 with the mean-value constant over Ω_δ.
    """
    operator = "laplacian"

    def constant(self, dom: DomainLike, config: RunConfig) -> ConstantReport:
        if config.delta is not None:
            return constant_service.laplace_constant(dom, config.delta, config.safety)
        return constant_service.optimize_delta(dom, config.safety)

class HeatStrategy(OperatorStrategy):
    """
    Hu >= 1 with the modified-heatball constant over Ω_R.
    """
    operator = "heat"

    def constant(self, dom: DomainLike, config: RunConfig) -> ConstantReport:
        if config.R is not None:
            return constant_service.heat_constant(dom, config.R, config.m, config.quadrature, config.safety)
        return constant_service.optimize_radius(dom, config.m, config.quadrature, config.safety)

class DetHessianStrategy(OperatorStrategy):
    """
    Du >= 1, for which no uniform constant exists.
    """
    operator = "dethess"

    def constant(self, dom: DomainLike, config: RunConfig) -> ConstantReport:
        raise InvalidParameterError("the det-Hessian operator admits no uniform constant; supply c")

OPERATOR_STRATEGIES: Dict[str, OperatorStrategy] = {
    "laplacian": LaplaceStrategy(),
    "heat": HeatStrategy(),
    "dethess": DetHessianStrategy(),
}

def strategy_for_field(field: ScalarField, operator: Optional[str] = None) -> OperatorStrategy:
    """
    Get the operator strategy for a field, heat for parabolic fields and Laplace otherwise.

    Args:
        field (ScalarField): The field.
        operator (Optional[str]): An explicit operator name.

    Returns:
        OperatorStrategy: The strategy.
    """
    if operator is None:
        operator = "heat" if field.is_parabolic else "laplacian"
    return OPERATOR_STRATEGIES[operator]

def _domain_dict(dom: DomainLike) -> Dict[str, Any]:
    return dom.model_dump(mode="json")

def _resolve_constant(
    strategy: OperatorStrategy, dom: DomainLike, config: RunConfig
) -> Tuple[float, str, Optional[ConstantReport]]:
    if config.c is not None:
        return config.c, "user", None
    report = strategy.constant(dom, config)
    logger.info("%s constant on %s: c = %.6e", strategy.operator, dom.shape, report.c)
    return report.c, "constants", report

def check_inequality(config: RunConfig) -> Tuple[List[InequalityReport], Optional[ConstantReport], Dict[str, Any]]:
    """
    Evaluate ‖u‖_p · |{|u| >= c}|^{1/p'} >= c for every p with one shared c.

    Args:
        config (RunConfig): Field, domain, exponents and constant settings.

    Returns:
        Tuple: Per-p reports, the constant report (None for a user c) and the hypothesis summary.

    Raises:
        OperatorHypothesisError: If the operator lower bound fails on the grid.
    """
    field = field_repository.resolve(config.field)
    dom = config.domain if config.domain is not None else unit_box(field.arity)
    strategy = strategy_for_field(field, config.operator)
    hypothesis = strategy.verify_hypothesis(field, dom)
    c, source, constant = _resolve_constant(strategy, dom, config)
    reports = []
    for p in config.p:
        norm, level, ind, lhs = levelsets.superlevel_product(field, dom, c, p, config.resolution)
        reports.append(InequalityReport(
            field=field.label,
            domain=_domain_dict(dom),
            p=p,
            c=c,
            c_source=source,
            norm=norm,
            superlevel=level,
            indicator_norm=ind,
            lhs=lhs,
            verdict=bool(lhs >= c),
        ))
        logger.info("%s p=%s: lhs %.6e vs c %.6e", field.label, format_exponent(p), lhs, c)
    return reports, constant, hypothesis

def cross_checks(field: ScalarField, dom: DomainLike, c: float, p: float, resolution: Optional[int], seed: int) -> Dict[str, Any]:
    """
    Chebyshev, Hölder and Monte Carlo cross-checks at one threshold and exponent.

    Args:
        field (ScalarField): The field.
        dom (DomainLike): The domain.
        c (float): The threshold.
        p (float): The exponent.
        resolution (Optional[int]): Grid cells per axis.
        seed (int): Monte Carlo seed.

    Returns:
        Dict[str, Any]: The cross-check values.
    """
    chebyshev = levelsets.chebyshev_check(field, dom, c, p, resolution)
    holder_ok, product, mass = levelsets.holder_product_check(field, dom, c, p, resolution)
    mc, stderr = levelsets.monte_carlo_superlevel(field, dom, c, seed=seed)
    return {
        "chebyshev": chebyshev.model_dump(mode="json"),
        "holder": {"holds": holder_ok, "product": product, "mass": mass},
        "monte_carlo_superlevel": {"estimate": mc, "stderr": stderr, "seed": seed},
    }

def gressman_sup(N: int) -> float:
    """
    sup over [0,1]^2 of |u_N| = e · max_{y in [0,1]} |sin(N y)| / N.

    Args:
        N (int): The frequency.

    Returns:
        float: The supremum.
    """
    peak = 1.0 if N >= math.pi / 2.0 else math.sin(N)
    return math.e * peak / N

def counterexample_sweep(
    c: float, N_values: Sequence[int], p: float = math.inf, resolution: Optional[int] = None
) -> Tuple[List[SweepRow], Optional[int], Optional[int]]:
    """
    Sweep u_N = e^x sin(N y)/N on [0,1]^2, reporting when {|u_N| >= c} empties.

    Args:
        c (float): The threshold, c > 0.
        N_values (Sequence[int]): Frequencies in increasing order.
        p (float): Exponent of the reported product.
        resolution (Optional[int]): Grid cells per axis.

    Returns:
        Tuple: The rows, the first N whose grid superlevel set is empty and
        the first N with e·max|sin|/N < c.
    """
    if c <= 0:
        raise InvalidParameterError(f"threshold must be positive, got {c}")
    dom = unit_box(2)
    dethess_grid = hypothesis_grid(dom, HYPOTHESIS_POINTS_2D)
    rows: List[SweepRow] = []
    first_empty: Optional[int] = None
    first_empty_analytic: Optional[int] = None
    for N in N_values:
        field = make_gressman(N)
        dethess, _ = operator_function(field, "dethess")
        dethess_min = float(np.min(dethess(dethess_grid)))
        sup_grid = levelsets.sup_norm(field, dom, resolution).value
        norm, level, _, lhs = levelsets.superlevel_product(field, dom, c, p, resolution)
        sup_analytic = gressman_sup(N)
        empty = level.outer == 0.0
        if empty and first_empty is None:
            first_empty = N
            logger.info("superlevel set at c = %g first empty at N = %d", c, N)
        if sup_analytic < c and first_empty_analytic is None:
            first_empty_analytic = N
        rows.append(SweepRow(
            N=N,
            sup_grid=sup_grid,
            sup_analytic=sup_analytic,
            superlevel_measure=level.estimate,
            lhs=lhs,
            empty=empty,
            dethess_min=dethess_min,
            dethess_ok=bool(dethess_min >= 1.0 - HYPOTHESIS_TOL),
        ))
    return rows, first_empty, first_empty_analytic

def first_empty_frequency(c: float) -> int:
    """
    Smallest N with e/N < c, the first empty superlevel set once N >= 2.

    Args:
        c (float): The threshold.

    Returns:
        int: The frequency.
    """
    N = max(1, math.floor(math.e / c))
    while gressman_sup(N) >= c:
        N += 1
    return N

def _product_field(field: ScalarField, extra: int) -> ScalarField:
    n = field.arity
    return ScalarField(
        arity=n + extra,
        spatial_dim=n + extra,
        evaluator=lambda p: field.evaluator(np.asarray(p, dtype=float)[..., :n]),
        label=f"{field.label}⊗1",
    )

def lifting_check(
    field: ScalarField,
    first: BoxDomain,
    second: BoxDomain,
    c: float,
    exponents: Sequence[float],
    resolution: Optional[int] = None,
) -> List[Dict[str, Any]]:
    """
    Verify ‖v‖_p · |{|v| >= c}|^{1/p'} >= c|Ω₂| for v(x, y) = u(x) on Ω₁ x Ω₂.

    Both grids use the same cells per axis, so the superlevel measure of v
    factorizes as the one of u times |Ω₂|.

    Args:
        field (ScalarField): u on Ω₁.
        first (BoxDomain): Ω₁.
        second (BoxDomain): Ω₂.
        c (float): The constant of u on Ω₁.
        exponents (Sequence[float]): The exponents.
        resolution (Optional[int]): Grid cells per axis.

    Returns:
        List[Dict[str, Any]]: One row per exponent.
    """
    if first.dim != field.arity:
        raise InvalidDimensionError(f"Ω₁ has dimension {first.dim}, {field.label} takes {field.arity}")
    product = BoxDomain(lower=first.lower + second.lower, upper=first.upper + second.upper)
    lifted = _product_field(field, second.dim)
    resolution = default_resolution(product.dim) if resolution is None else resolution
    second_measure = second.measure()
    rows = []
    for p in exponents:
        _, base_level, _, base_lhs = levelsets.superlevel_product(field, first, c, p, resolution)
        _, level, _, lhs = levelsets.superlevel_product(lifted, product, c, p, resolution)
        factor_gap = abs(level.estimate - base_level.estimate * second_measure)
        rows.append({
            "p": format_exponent(p),
            "c": c,
            "base_lhs": base_lhs,
            "base_verdict": bool(base_lhs >= c),
            "lhs": lhs,
            "bound": c * second_measure,
            "verdict": bool(lhs >= c * second_measure),
            "superlevel_measure": level.estimate,
            "factorized_measure": base_level.estimate * second_measure,
            "factorizes": bool(factor_gap <= level.width + 1e-9 * product.measure()),
        })
    return rows

def image_field(field: ScalarField, dom: DomainLike, matrix: np.ndarray) -> Tuple[ScalarField, BoxDomain]:
    """
    u ∘ φ⁻¹ on φ(Ω), extended by 0 to the bounding box of φ(Ω).

    The zero extension leaves both the L^p norm and every superlevel set
    with c > 0 unchanged.

    Args:
        field (ScalarField): u on Ω.
        dom (DomainLike): Ω.
        matrix (np.ndarray): A of φ(x) = A x.

    Returns:
        Tuple[ScalarField, BoxDomain]: The extended field and the box.
    """
    inverse = np.linalg.inv(matrix)
    composed = compose_linear(field, matrix)
    lower, upper = dom.bounding_box()
    corners = np.array(list(itertools.product(*zip(lower, upper)))) @ matrix.T
    box = BoxDomain(lower=tuple(corners.min(axis=0)), upper=tuple(corners.max(axis=0)))

    def evaluator(p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return np.where(dom.contains(p @ inverse.T), composed.evaluator(p), 0.0)

    return ScalarField(arity=field.arity, spatial_dim=field.spatial_dim, evaluator=evaluator, label=composed.label), box

def change_of_variables_check(
    field: ScalarField,
    dom: DomainLike,
    matrix: Sequence[Sequence[float]],
    c: float,
    exponents: Sequence[float],
    resolution: Optional[int] = None,
) -> List[Dict[str, Any]]:
    """
    Verify c <= M · ‖u∘φ⁻¹‖_p · |{|u∘φ⁻¹| >= c}|^{1/p'} on φ(Ω), M = |det A|^{-1}.

    Args:
        field (ScalarField): u on Ω.
        dom (DomainLike): Ω.
        matrix: A of φ(x) = A x.
        c (float): The constant of u on Ω.
        exponents (Sequence[float]): The exponents.
        resolution (Optional[int]): Grid cells per axis.

    Returns:
        List[Dict[str, Any]]: One row per exponent.

    Raises:
        SingularMapError: If A is not invertible.
    """
    A = np.asarray(matrix, dtype=float)
    if A.shape != (dom.dim, dom.dim):
        raise InvalidDimensionError(f"linear map has shape {A.shape}, domain dimension is {dom.dim}")
    det = float(np.linalg.det(A))
    if abs(det) < 1e-12:
        raise SingularMapError(f"linear map is singular (det = {det:.3e})")
    M = 1.0 / abs(det)
    mapped, box = image_field(field, dom, A)
    rows = []
    for p in exponents:
        _, _, _, base_lhs = levelsets.superlevel_product(field, dom, c, p, resolution)
        _, level, _, lhs = levelsets.superlevel_product(mapped, box, c, p, resolution)
        rows.append({
            "p": format_exponent(p),
            "c": c,
            "M": M,
            "base_lhs": base_lhs,
            "image_lhs": lhs,
            "scaled_lhs": M * lhs,
            "image_superlevel": level.estimate,
            "verdict": bool(c <= M * lhs),
        })
    return rows

def verify_derivative_formulas(config: RunConfig) -> Tuple[List[DerivativeCheck], float]:
    """
    Run the finite-difference consistency suite on every configured field.

    Args:
        config (RunConfig): Fields, average kind, center, R and tolerance.

    Returns:
        Tuple[List[DerivativeCheck], float]: The rows and the tolerance applied.
    """
    specs = list(config.fields) or [config.field]
    tolerance = config.tolerance if config.tolerance is not None else DERIVATIVE_TOL[config.kind]
    rows: List[DerivativeCheck] = []
    for spec in specs:
        field = field_repository.resolve(spec)
        center = config.center if config.center is not None else (0.0,) * field.arity
        fam = AverageFamily(
            kind=config.kind,
            field=field,
            center=center,
            max_radius=config.max_radius,
            extra_dim=config.m,
            quad=config.quadrature,
        )
        checks = derivative_consistency(fam)
        worst = max(check.rel_error for check in checks)
        level = logging.INFO if worst <= tolerance else logging.WARNING
        logger.log(level, "%s %s: max rel error %.3e (tol %.1e)", config.kind, field.label, worst, tolerance)
        rows.extend(checks)
    return rows, tolerance

def _laplace_witness() -> ScalarField:
    return ScalarField(
        arity=2,
        spatial_dim=2,
        evaluator=lambda p: np.asarray(p, dtype=float)[..., 1] ** 2 / 2.0,
        analytic_laplacian=lambda p: np.ones(np.shape(p)[:-1]),
        label="t^2/2",
    )

def rectangle_demo(delta: float) -> Dict[str, Any]:
    """
    Report K(δ), its measure against 1 - 2δ, the Runge budget 2δ + δ²/8 and
    the error of the locally constant approximant w₁ of the witnesses.

    w₁ takes on each rectangle of the δ²/16-neighbourhood U the witness value
    at the bottom edge; its error is bounded by the t-extent δ + δ²/8.

    Args:
        delta (float): δ in (0, 1/2).

    Returns:
        Dict[str, Any]: The family and the checks.
    """
    family = make_rectangle_family(delta)
    pad = delta ** 2 / 16.0
    laplace, heat = _laplace_witness(), make_heat_witness(1, "drift")
    w1_budget = delta + delta ** 2 / 8.0
    laplace_error = heat_error = 0.0
    samples = []
    for rect in family.rectangles:
        ts = np.linspace(rect.t0 - pad, rect.t1 + pad, 33)
        xs = np.linspace(rect.x0 - pad, rect.x1 + pad, 5)
        grid = np.stack(np.meshgrid(xs, ts, indexing="ij"), axis=-1).reshape(-1, 2)
        base = np.array([[rect.x0, rect.t0 - pad]])
        laplace_error = max(laplace_error, float(np.max(np.abs(laplace(grid) - laplace(base)[0]))))
        heat_error = max(heat_error, float(np.max(np.abs(heat(grid) - heat(base)[0]))))
        samples.append(grid)
    points = np.concatenate(samples)
    laplace_values = finite_difference_operator(laplace, "laplacian", points)
    heat_values = finite_difference_operator(heat, "heat", points)
    operator_error = float(max(np.max(np.abs(laplace_values - 1.0)), np.max(np.abs(heat_values - 1.0))))
    within = all(0.0 <= r.x0 and r.x1 <= 1.0 and 0.0 <= r.t0 and r.t1 <= 1.0 for r in family.rectangles)
    gaps = [b.t0 - a.t1 for a, b in zip(family.rectangles, family.rectangles[1:])]
    disjoint = all(gap >= family.gap * (1.0 - 1e-9) for gap in gaps)
    return {
        "family": family.model_dump(mode="json"),
        "measure_exceeds_bound": bool(family.measure > family.bound),
        "contained": within,
        "disjoint": disjoint,
        "w1_budget": w1_budget,
        "laplace_w1_error": laplace_error,
        "heat_w1_error": heat_error,
        "w1_within_budget": bool(max(laplace_error, heat_error) <= w1_budget * (1.0 + 1e-12)),
        "witness_operator_error": operator_error,
    }

def constants_table(config: RunConfig) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
    """
    Derive the constant for a domain and, when a field is given, evaluate its mean-value chain.

    Args:
        config (RunConfig): Domain, operator, δ or R, m and safety.

    Returns:
        Tuple: Rows and details.
    """
    field = field_repository.resolve(config.field) if config.field is not None else None
    operator = config.operator or ("heat" if field is not None and field.is_parabolic else "laplacian")
    dom = config.domain if config.domain is not None else unit_box(field.arity if field is not None else 2)
    strategy = OPERATOR_STRATEGIES[operator]
    report = strategy.constant(dom, config)
    row: Dict[str, Any] = {"kind": report.kind, "c": report.c, "scale": report.scale, "passed": True}
    row.update(report.terms)
    rows = [row]
    details: Dict[str, Any] = {"constant": report.model_dump(mode="json")}
    if field is not None:
        strategy.verify_hypothesis(field, dom)
        if report.kind == "laplace":
            shrunk = shrink_domain(dom, report.scale)
            chain = constant_service.laplace_mean_value_chain(field, _midpoint(shrunk), report.scale, report.c, config.quadrature)
        else:
            shrunk = shrink_domain_heat(dom, report.scale, dom.dim - 1, config.m)
            chain = constant_service.heat_mean_value_chain(field, _midpoint(shrunk), report.scale, config.m, config.quadrature)
        details["mean_value_chain"] = chain
        rows.append({"kind": f"{report.kind}-chain", "c": report.c, "scale": report.scale, "passed": chain["holds"]})
    if config.sublevel_constant is not None:
        cheb = constant_service.chebyshev_constant(config.sublevel_constant, config.sublevel_exponent, dom.measure())
        details["chebyshev_constant"] = cheb
        rows.append({"kind": "chebyshev", "c": cheb, "scale": config.sublevel_exponent, "passed": True})
    return rows, details

def _midpoint(dom: DomainLike) -> Tuple[float, ...]:
    if isinstance(dom, BallDomain):
        return tuple(dom.center)
    lower, upper = dom.bounding_box()
    return tuple(float(v) for v in (lower + upper) / 2.0)

def heatball_volume_table(dims: Sequence[int], radii: Sequence[float], quad: QuadratureConfig = QuadratureConfig()) -> List[Dict[str, Any]]:
    """
    Compare |E(r)| by quadrature with r^{n+2}|E(1)| and check the kernel normalization.

    Args:
        dims (Sequence[int]): Spatial dimensions.
        radii (Sequence[float]): Radii.
        quad (QuadratureConfig): Quadrature settings.

    Returns:
        List[Dict[str, Any]]: One row per (n, r).
    """
    rows = []
    for n in dims:
        one = make_constant(1.0, n, parabolic=True)
        unit = unit_heatball_volume(n, quad)
        for r in radii:
            spec = HeatballSpec(center=(0.0,) * (n + 1), radius=r)
            scaled = heatball_volume(spec, quad)
            integrated = integrate_heatball(one, spec, Weight.UNIT, quad)
            normalization = integrate_heatball(one, spec, Weight.HEATBALL_KERNEL, quad) / (4.0 * r ** n)
            scaling_error = abs(integrated / scaled - 1.0)
            normalization_error = abs(normalization - 1.0)
            rows.append({
                "n": n,
                "r": r,
                "unit_volume": unit,
                "volume": scaled,
                "integrated_volume": integrated,
                "scaling_error": scaling_error,
                "kernel_normalization": normalization,
                "normalization_error": normalization_error,
                "passed": bool(scaling_error <= 1e-6 and normalization_error <= 1e-6),
            })
    return rows

def _inequality_run(config: RunConfig) -> RunReport:
    reports, constant, hypothesis = check_inequality(config)
    field = field_repository.resolve(config.field)
    dom = config.domain if config.domain is not None else unit_box(field.arity)
    rows = []
    checks = []
    for report in reports:
        rows.append({
            "field": report.field,
            "p": format_exponent(report.p),
            "c": report.c,
            "c_source": report.c_source,
            "norm": report.norm.value,
            "superlevel": report.superlevel.estimate,
            "superlevel_inner": report.superlevel.inner,
            "superlevel_outer": report.superlevel.outer,
            "lhs": report.lhs,
            "verdict": report.verdict,
        })
        checks.append(cross_checks(field, dom, report.c, report.p, config.resolution, config.seed))
    return RunReport(
        command=config.command,
        passed=all(report.verdict for report in reports),
        rows=rows,
        details={
            "hypothesis": hypothesis,
            "constant": constant.model_dump(mode="json") if constant is not None else None,
            "reports": [report.model_dump(mode="json") for report in reports],
            "cross_checks": checks,
        },
    )

def _sweep_run(config: RunConfig) -> RunReport:
    c = config.c if config.c is not None else 0.1
    p = max(config.p)
    rows, first_empty, first_empty_analytic = counterexample_sweep(c, range(config.N_min, config.N_max + 1), p, config.resolution)
    dethess_ok = all(row.dethess_ok for row in rows)
    return RunReport(
        command=config.command,
        passed=bool(dethess_ok and first_empty == first_empty_analytic),
        rows=[row.model_dump(mode="json") for row in rows],
        details={
            "c": c,
            "p": format_exponent(p),
            "first_empty": first_empty,
            "first_empty_analytic": first_empty_analytic,
            "first_empty_closed_form": first_empty_frequency(c),
            "dethess_ok": dethess_ok,
        },
    )

def _lifting_run(config: RunConfig) -> RunReport:
    field = field_repository.resolve(config.field)
    first = config.domain if config.domain is not None else unit_box(field.arity)
    strategy = strategy_for_field(field, config.operator)
    hypothesis = strategy.verify_hypothesis(field, first)
    c, source, constant = _resolve_constant(strategy, first, config)
    rows = lifting_check(field, first, config.second_domain, c, config.p, config.resolution)
    return RunReport(
        command=config.command,
        passed=all(row["verdict"] and row["base_verdict"] and row["factorizes"] for row in rows),
        rows=rows,
        details={
            "hypothesis": hypothesis,
            "c_source": source,
            "constant": constant.model_dump(mode="json") if constant is not None else None,
            "second_measure": config.second_domain.measure(),
        },
    )

def _cov_run(config: RunConfig) -> RunReport:
    field = field_repository.resolve(config.field)
    dom = config.domain if config.domain is not None else unit_box(field.arity)
    strategy = strategy_for_field(field, config.operator)
    hypothesis = strategy.verify_hypothesis(field, dom)
    c, source, constant = _resolve_constant(strategy, dom, config)
    rows = change_of_variables_check(field, dom, config.linear_map, c, config.p, config.resolution)
    return RunReport(
        command=config.command,
        passed=all(row["verdict"] for row in rows),
        rows=rows,
        details={
            "hypothesis": hypothesis,
            "c_source": source,
            "constant": constant.model_dump(mode="json") if constant is not None else None,
            "linear_map": config.linear_map,
        },
    )

def _derivative_run(config: RunConfig) -> RunReport:
    checks, tolerance = verify_derivative_formulas(config)
    rows = [check.model_dump(mode="json") for check in checks]
    for row in rows:
        row["passed"] = bool(row["rel_error"] <= tolerance)
    return RunReport(
        command=config.command,
        passed=all(row["passed"] for row in rows),
        rows=rows,
        details={"kind": config.kind, "tolerance": tolerance, "max_rel_error": max(row["rel_error"] for row in rows)},
    )

def _rectangle_run(config: RunConfig) -> RunReport:
    demos = [rectangle_demo(delta) for delta in config.deltas]
    rows = []
    for demo in demos:
        family = demo["family"]
        rows.append({
            "delta": family["delta"],
            "count": family["count"],
            "measure": family["measure"],
            "bound": family["bound"],
            "budget": family["budget"],
            "gap": family["gap"],
            "w1_error": max(demo["laplace_w1_error"], demo["heat_w1_error"]),
            "passed": bool(
                demo["measure_exceeds_bound"] and demo["contained"] and demo["disjoint"] and demo["w1_within_budget"]
            ),
        })
    return RunReport(command=config.command, passed=all(row["passed"] for row in rows), rows=rows, details={"demos": demos})

def _constants_run(config: RunConfig) -> RunReport:
    rows, details = constants_table(config)
    return RunReport(command=config.command, passed=all(row["passed"] for row in rows), rows=rows, details=details)

def _heatball_run(config: RunConfig) -> RunReport:
    rows = heatball_volume_table(config.dims, config.radii, config.quadrature)
    return RunReport(command=config.command, passed=all(row["passed"] for row in rows), rows=rows)

RUNNERS = {
    "check-inequality": _inequality_run,
    "sweep-gressman": _sweep_run,
    "verify-derivatives": _derivative_run,
    "constants": _constants_run,
    "heatball-volume": _heatball_run,
    "lifting-check": _lifting_run,
    "cov-check": _cov_run,
    "rectangle-demo": _rectangle_run,
}

def run(config: RunConfig) -> RunReport:
    """
    Execute a validated run configuration.

    Args:
        config (RunConfig): The configuration.

    Returns:
        RunReport: Rows, details and the overall verdict, with the configuration attached.
    """
    logger.info("starting %s", config.command)
    report = RUNNERS[config.command](config)
    details = {"config": config.model_dump(mode="json"), **report.details}
    logger.info("finished %s: %s", config.command, "passed" if report.passed else "FAILED")
    return report.model_copy(update={"details": details})
