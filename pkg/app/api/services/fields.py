"""
Field service module.
This module provides the catalog of analytic scalar fields with closed-form
operator values, the rectangle family of the Runge construction, finite
difference operators and field combinators.

The det-Hessian operator follows the convention
Du = (∂²_{xy}u)^2 - ∂²_{xx}u ∂²_{yy}u, which is minus the Hessian determinant.
"""
import logging
import math
from typing import Callable, Literal, Optional, Sequence, Tuple, Union

import numpy as np

from app.api.models.field import PointFunction, ScalarField
from app.api.schemas.fields import RectangleFamily
from app.api.schemas.geometry import Rectangle
from app.api.utils.errors import InvalidDimensionError, InvalidParameterError

logger = logging.getLogger(__name__)

Operator = Literal["laplacian", "heat", "dethess"]
HeatKind = Literal["drift", "caloric", "shifted"]

def _check_dimension(n: int) -> int:
    if int(n) != n or n < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {n}")
    return int(n)

def _spatial(points: np.ndarray, n: int) -> np.ndarray:
    return np.asarray(points, dtype=float)[..., :n]

def _sq(points: np.ndarray, n: int) -> np.ndarray:
    return np.sum(_spatial(points, n) ** 2, axis=-1)

def _constant(value: float) -> PointFunction:
    return lambda p: np.full(np.shape(p)[:-1], float(value))

def make_constant(value: float, n: int, parabolic: bool = False) -> ScalarField:
    """
    Build the constant field u ≡ value.

    Args:
        value (float): The constant.
        n (int): Spatial dimension.
        parabolic (bool): Whether the field takes a trailing time coordinate.

    Returns:
        ScalarField: The constant field with all operators zero.
    """
    n = _check_dimension(n)
    zero = _constant(0.0)
    return ScalarField(
        arity=n + 1 if parabolic else n,
        spatial_dim=n,
        evaluator=_constant(value),
        analytic_laplacian=zero,
        analytic_heat=zero if parabolic else None,
        analytic_dethess=zero if n == 2 and not parabolic else None,
        label=f"constant(value={value:g})",
    )

def make_quadratic(n: int) -> ScalarField:
    """
    Build the canonical Laplace witness u(x) = |x|^2 / (2n), Δu ≡ 1.

    Args:
        n (int): The dimension.

    Returns:
        ScalarField: The quadratic field.
    """
    n = _check_dimension(n)
    return ScalarField(
        arity=n,
        spatial_dim=n,
        evaluator=lambda p: _sq(p, n) / (2.0 * n),
        analytic_laplacian=_constant(1.0),
        label=f"quadratic(n={n})",
    )

def make_heat_witness(n: int, kind: HeatKind = "drift", c0: float = 0.0) -> ScalarField:
    """
    Build a heat-operator witness on R^n x R.

    drift: u = -t with Hu ≡ 1. caloric: u = |x|^2/(2n) + t with Hu ≡ 0.
    shifted: drift plus the constant c0.

    Args:
        n (int): Spatial dimension.
        kind (HeatKind): The witness kind.
        c0 (float): The shift used by the shifted kind.

    Returns:
        ScalarField: The witness.
    """
    n = _check_dimension(n)
    if kind == "drift":
        evaluator, heat, label = (lambda p: -np.asarray(p, dtype=float)[..., n]), 1.0, f"drift(n={n})"
    elif kind == "shifted":
        evaluator = lambda p: c0 - np.asarray(p, dtype=float)[..., n]
        heat, label = 1.0, f"shifted-drift(n={n},c0={c0:g})"
    elif kind == "caloric":
        evaluator = lambda p: _sq(p, n) / (2.0 * n) + np.asarray(p, dtype=float)[..., n]
        heat, label = 0.0, f"caloric(n={n})"
    else:
        raise InvalidParameterError(f"unknown heat witness kind {kind!r}")
    return ScalarField(
        arity=n + 1,
        spatial_dim=n,
        evaluator=evaluator,
        analytic_heat=_constant(heat),
        label=label,
    )

def make_gressman(N: int) -> ScalarField:
    """
    Build u_N(x, y) = N^{-1} e^x sin(N y), for which Du_N = e^{2x} >= 1 on x >= 0.

    Args:
        N (int): The frequency, N >= 1.

    Returns:
        ScalarField: u_N on R^2.
    """
    if int(N) != N or N < 1:
        raise InvalidParameterError(f"N must be a positive integer, got {N}")
    N = int(N)

    def evaluator(p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return np.exp(p[..., 0]) * np.sin(N * p[..., 1]) / N

    def laplacian(p: np.ndarray) -> np.ndarray:
        return (1.0 - N ** 2) * evaluator(p)

    return ScalarField(
        arity=2,
        spatial_dim=2,
        evaluator=evaluator,
        analytic_laplacian=laplacian,
        analytic_dethess=lambda p: np.exp(2.0 * np.asarray(p, dtype=float)[..., 0]),
        label=f"gressman(N={N})",
    )

def make_exponential(n: int) -> ScalarField:
    """u = e^{x_1}."""
    n = _check_dimension(n)
    func = lambda p: np.exp(np.asarray(p, dtype=float)[..., 0])
    return ScalarField(arity=n, spatial_dim=n, evaluator=func, analytic_laplacian=func, label=f"exponential(n={n})")

def make_trig(n: int) -> ScalarField:
    """u = sin(x_1) + cos(x_n) for n >= 2, sin(x_1) for n = 1."""
    n = _check_dimension(n)
    if n == 1:
        func = lambda p: np.sin(np.asarray(p, dtype=float)[..., 0])
        return ScalarField(arity=1, spatial_dim=1, evaluator=func, analytic_laplacian=lambda p: -func(p), label="trig(n=1)")

    def func(p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return np.sin(p[..., 0]) + np.cos(p[..., n - 1])

    return ScalarField(arity=n, spatial_dim=n, evaluator=func, analytic_laplacian=lambda p: -func(p), label=f"trig(n={n})")

def make_quartic(n: int) -> ScalarField:
    """u = |x|^4 with Δu = 4(n+2)|x|^2."""
    n = _check_dimension(n)
    return ScalarField(
        arity=n,
        spatial_dim=n,
        evaluator=lambda p: _sq(p, n) ** 2,
        analytic_laplacian=lambda p: 4.0 * (n + 2) * _sq(p, n),
        label=f"quartic(n={n})",
    )

def make_gaussian(n: int) -> ScalarField:
    """u = exp(-|x|^2) with Δu = (4|x|^2 - 2n) exp(-|x|^2)."""
    n = _check_dimension(n)
    return ScalarField(
        arity=n,
        spatial_dim=n,
        evaluator=lambda p: np.exp(-_sq(p, n)),
        analytic_laplacian=lambda p: (4.0 * _sq(p, n) - 2.0 * n) * np.exp(-_sq(p, n)),
        label=f"gaussian(n={n})",
    )

def make_cubic(n: int) -> ScalarField:
    """u = x_1^3 with Δu = 6 x_1."""
    n = _check_dimension(n)
    return ScalarField(
        arity=n,
        spatial_dim=n,
        evaluator=lambda p: np.asarray(p, dtype=float)[..., 0] ** 3,
        analytic_laplacian=lambda p: 6.0 * np.asarray(p, dtype=float)[..., 0],
        label=f"cubic(n={n})",
    )

def make_harmonic(n: int, amplitude: float = 1.0) -> ScalarField:
    """
    Harmonic perturbation h: a x_1 x_2 for n >= 2, a x_1 for n = 1; Δh ≡ 0.

    Args:
        n (int): The dimension.
        amplitude (float): The coefficient a.

    Returns:
        ScalarField: The harmonic field.
    """
    n = _check_dimension(n)
    if n == 1:
        func = lambda p: amplitude * np.asarray(p, dtype=float)[..., 0]
    else:
        func = lambda p: amplitude * np.asarray(p, dtype=float)[..., 0] * np.asarray(p, dtype=float)[..., 1]
    return ScalarField(
        arity=n,
        spatial_dim=n,
        evaluator=func,
        analytic_laplacian=_constant(0.0),
        label=f"harmonic(n={n},a={amplitude:g})",
    )

def make_heat_polynomial(n: int) -> ScalarField:
    """u = x_1^2 t with Hu = 2t - x_1^2."""
    n = _check_dimension(n)

    def heat(p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return 2.0 * p[..., n] - p[..., 0] ** 2

    return ScalarField(
        arity=n + 1,
        spatial_dim=n,
        evaluator=lambda p: np.asarray(p, dtype=float)[..., 0] ** 2 * np.asarray(p, dtype=float)[..., n],
        analytic_heat=heat,
        label=f"heat-polynomial(n={n})",
    )

def make_heat_trig(n: int) -> ScalarField:
    """u = sin(x_1) e^{-t/2} with Hu = -u/2."""
    n = _check_dimension(n)

    def func(p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return np.sin(p[..., 0]) * np.exp(-0.5 * p[..., n])

    return ScalarField(
        arity=n + 1,
        spatial_dim=n,
        evaluator=func,
        analytic_heat=lambda p: -0.5 * func(p),
        label=f"heat-trig(n={n})",
    )

def _combine(a: Optional[PointFunction], b: Optional[PointFunction]) -> Optional[PointFunction]:
    if a is None or b is None:
        return None
    return lambda p: a(p) + b(p)

def shift(f: ScalarField, c0: float) -> ScalarField:
    """
    u + c0; every operator value is unchanged.

    Args:
        f (ScalarField): The field.
        c0 (float): The constant added.

    Returns:
        ScalarField: The shifted field.
    """
    return f.model_copy(update={
        "evaluator": lambda p: f.evaluator(p) + c0,
        "label": f"{f.label}{c0:+g}",
    })

def add(f: ScalarField, g: ScalarField) -> ScalarField:
    """
    u + v; an operator value survives only where both fields carry it.
    (The det-Hessian is nonlinear, so it is dropped.)

    Args:
        f (ScalarField): First summand.
        g (ScalarField): Second summand, same arity.

    Returns:
        ScalarField: The sum.
    """
    if f.arity != g.arity or f.spatial_dim != g.spatial_dim:
        raise InvalidDimensionError(f"cannot add {f.label} and {g.label}: arities differ")
    return ScalarField(
        arity=f.arity,
        spatial_dim=f.spatial_dim,
        evaluator=lambda p: f.evaluator(p) + g.evaluator(p),
        analytic_laplacian=_combine(f.analytic_laplacian, g.analytic_laplacian),
        analytic_heat=_combine(f.analytic_heat, g.analytic_heat),
        label=f"{f.label}+{g.label}",
    )

def lift(f: ScalarField, m: int) -> ScalarField:
    """
    Extend a field by m leading spatial variables it does not depend on,
    ũ(ξ, x[, t]) = u(x[, t]). The heat and Laplace values lift unchanged.

    Args:
        f (ScalarField): The field.
        m (int): Number of added variables.

    Returns:
        ScalarField: The lifted field.
    """
    m = _check_dimension(m)

    def lifted(func: Optional[PointFunction]) -> Optional[PointFunction]:
        if func is None:
            return None
        return lambda p: func(np.asarray(p, dtype=float)[..., m:])

    return ScalarField(
        arity=f.arity + m,
        spatial_dim=f.spatial_dim + m,
        evaluator=lifted(f.evaluator),
        analytic_laplacian=lifted(f.analytic_laplacian),
        analytic_heat=lifted(f.analytic_heat),
        label=f"lift({f.label},m={m})",
    )

def compose_linear(f: ScalarField, matrix: np.ndarray) -> ScalarField:
    """
    u ∘ φ^{-1} for an invertible linear map φ(x) = A x.

    Args:
        f (ScalarField): The field u on R^n.
        matrix (np.ndarray): A, shape (n, n), invertible.

    Returns:
        ScalarField: x' ↦ u(A^{-1} x').
    """
    inverse = np.linalg.inv(np.asarray(matrix, dtype=float))
    return ScalarField(
        arity=f.arity,
        spatial_dim=f.spatial_dim,
        evaluator=lambda p: f.evaluator(np.asarray(p, dtype=float) @ inverse.T),
        label=f"{f.label}∘φ⁻¹",
    )

def make_rectangle_family(delta: float) -> RectangleFamily:
    """
    Build K(δ): rectangles [δ/4, 1-δ/4] x [i(δ+δ²/4) - δ, i(δ+δ²/4)], i = 1..count,
    with count = floor((4-δ²)/(4δ+δ²)).

    Args:
        delta (float): δ in (0, 1/2).

    Returns:
        RectangleFamily: The rectangles, measure, bound 1-2δ, budget 2δ+δ²/8 and gap δ²/4.

    Raises:
        InvalidParameterError: If δ is outside (0, 1/2).
    """
    if not 0 < delta < 0.5:
        raise InvalidParameterError(f"delta must lie in (0, 1/2), got {delta}")
    count = math.floor((4.0 - delta ** 2) / (4.0 * delta + delta ** 2))
    pitch = delta + delta ** 2 / 4.0
    rectangles = [
        Rectangle(x0=delta / 4.0, x1=1.0 - delta / 4.0, t0=i * pitch - delta, t1=i * pitch)
        for i in range(1, count + 1)
    ]
    return RectangleFamily(
        delta=delta,
        rectangles=rectangles,
        count=count,
        measure=delta * (1.0 - delta / 2.0) * count,
        bound=1.0 - 2.0 * delta,
        budget=2.0 * delta + delta ** 2 / 8.0,
        gap=delta ** 2 / 4.0,
    )

def default_step(points: np.ndarray) -> np.ndarray:
    """
    Default finite-difference step h = 1e-4 (1 + |p|).

    Args:
        points (np.ndarray): Points (..., k).

    Returns:
        np.ndarray: One step per point.
    """
    return 1e-4 * (1.0 + np.linalg.norm(np.asarray(points, dtype=float), axis=-1))

def finite_difference_operator(
    f: ScalarField,
    op: Operator,
    point: Union[Sequence[float], np.ndarray],
    h: Optional[Union[float, np.ndarray]] = None,
) -> Union[float, np.ndarray]:
    """
    Centered finite-difference approximation of Δu, Hu or Du, error O(h^2).

    Args:
        f (ScalarField): The field.
        op (Operator): "laplacian", "heat" or "dethess".
        point: A point or an array of points (..., arity).
        h: Step; defaults to default_step(point).

    Returns:
        The operator value(s); a float for a single point.
    """
    points = np.asarray(point, dtype=float)
    single = points.ndim == 1
    points = np.atleast_2d(points)
    step = default_step(points) if h is None else np.broadcast_to(np.asarray(h, dtype=float), points.shape[:-1])
    step = step[..., None]
    n = f.spatial_dim
    center = f(points)

    def second(axis: int) -> np.ndarray:
        e = np.zeros(points.shape[-1])
        e[axis] = 1.0
        return (f(points + step * e) - 2.0 * center + f(points - step * e)) / step[..., 0] ** 2

    if op == "laplacian":
        value = sum(second(i) for i in range(n))
    elif op == "heat":
        if not f.is_parabolic:
            raise InvalidParameterError(f"{f.label} has no time coordinate")
        e = np.zeros(points.shape[-1])
        e[n] = 1.0
        dt = (f(points + step * e) - f(points - step * e)) / (2.0 * step[..., 0])
        value = sum(second(i) for i in range(n)) - dt
    elif op == "dethess":
        if f.arity != 2:
            raise InvalidDimensionError("the det-Hessian operator is defined on R^2")
        ex, ey = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        uxy = (
            f(points + step * (ex + ey)) - f(points + step * (ex - ey))
            - f(points - step * (ex - ey)) + f(points - step * (ex + ey))
        ) / (4.0 * step[..., 0] ** 2)
        value = uxy ** 2 - second(0) * second(1)
    else:
        raise InvalidParameterError(f"unknown operator {op!r}")
    return float(value[0]) if single else value

def operator_function(f: ScalarField, op: Operator) -> Tuple[PointFunction, bool]:
    """
    Get an evaluator for Δu, Hu or Du, analytic when the field carries one.

    Args:
        f (ScalarField): The field.
        op (Operator): The operator.

    Returns:
        Tuple[PointFunction, bool]: The evaluator and whether it falls back to finite differences.
    """
    analytic: Optional[Callable] = {
        "laplacian": f.analytic_laplacian,
        "heat": f.analytic_heat,
        "dethess": f.analytic_dethess,
    }[op]
    if analytic is not None:
        return analytic, False
    logger.warning("no analytic %s for %s; using finite differences", op, f.label)

    def fallback(points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        flat = points.reshape(-1, points.shape[-1])
        return np.asarray(finite_difference_operator(f, op, flat)).reshape(points.shape[:-1])

    return fallback, True

def operator_field(f: ScalarField, op: Operator) -> Tuple[ScalarField, bool]:
    """
    Wrap an operator value as a field on the same coordinates.

    Args:
        f (ScalarField): The field.
        op (Operator): The operator.

    Returns:
        Tuple[ScalarField, bool]: The operator field and the degraded flag.
    """
    func, degraded = operator_function(f, op)
    return ScalarField(arity=f.arity, spatial_dim=f.spatial_dim, evaluator=func, label=f"{op}({f.label})"), degraded
