"""
Report schema module.
This module defines Pydantic schemas for the estimates and reports produced
by the verification services.
"""
import math
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

from app.api.schemas.geometry import Point

def format_exponent(p: float) -> Union[float, str]:
    """
    Serialize an exponent, writing p = ∞ as the string "inf".

    Args:
        p (float): The exponent.

    Returns:
        Union[float, str]: The JSON-safe exponent.
    """
    return "inf" if math.isinf(p) else p

class LevelSetEstimate(BaseModel):
    """
    Grid estimate of a sublevel or superlevel set measure.

    Attributes:
        threshold (float): The level c.
        direction (str): "superlevel" for |u| >= c, "sublevel" for |u| <= c.
        estimate (float): Midpoint classification measure.
        inner (float): Measure of cells certainly in the set.
        outer (float): Measure of cells possibly in the set.
        resolution (int): Cells per axis.
    """
    threshold: float = Field(..., ge=0)
    direction: Literal["superlevel", "sublevel"]
    estimate: float = Field(..., ge=0)
    inner: float = Field(..., ge=0)
    outer: float = Field(..., ge=0)
    resolution: int = Field(..., ge=1)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_bracket(self) -> "LevelSetEstimate":
        if not self.inner <= self.estimate <= self.outer:
            raise ValueError("bracket must satisfy inner <= estimate <= outer")
        return self

    @property
    def width(self) -> float:
        return self.outer - self.inner

class NormEstimate(BaseModel):
    """
    Grid estimate of ‖u‖_{L^p}.

    Attributes:
        p (float): The exponent in [1, ∞].
        value (float): The estimate.
        resolution (int): Cells per axis.
        refinement_delta (float): For p = ∞, the growth of the grid max under refinement.
    """
    p: float = Field(..., ge=1)
    value: float = Field(..., ge=0)
    resolution: int = Field(..., ge=1)
    refinement_delta: float = 0.0

    model_config = ConfigDict(frozen=True)

    @field_serializer("p")
    def serialize_p(self, p: float):
        return format_exponent(p)

class MaxEstimate(BaseModel):
    """
    Grid-scan estimate of a supremum; a lower estimate of the true value.

    Attributes:
        value (float): The refined maximum.
        scan_value (float): The maximum on the initial grid.
        refinement_delta (float): value - scan_value.
        argmax (Point): The maximizing point.
    """
    value: float
    scan_value: float
    refinement_delta: float = Field(..., ge=0)
    argmax: Point

    model_config = ConfigDict(frozen=True)

class DerivativeEstimate(BaseModel):
    """
    Value of a derivative formula.

    Attributes:
        value (float): φ'(r).
        degraded (bool): True when finite-difference operator values were used.
    """
    value: float
    degraded: bool = False

    model_config = ConfigDict(frozen=True)

class ConstantReport(BaseModel):
    """
    Schema for a derived constant and every ingredient it depends on.

    Attributes:
        kind (str): "laplace", "heat" or "chebyshev".
        c (float): The chosen constant.
        safety (float): Multiplicative margin applied to the minimum term.
        scale (float): δ for the Laplace chain, R for the heat chain.
        shrunk_measure (float): |Ω_δ| or |Ω_R|.
        terms (Dict[str, float]): Threshold terms c must undercut.
        intermediates (Dict[str, float]): Named intermediate values, all positive.
        diagnostics (Dict[str, float]): Unconstrained values such as refinement deltas.
    """
    kind: Literal["laplace", "heat", "chebyshev"]
    c: float = Field(..., gt=0)
    safety: float = Field(..., gt=0, le=1)
    scale: Optional[float] = None
    shrunk_measure: Optional[float] = None
    terms: Dict[str, float] = Field(default_factory=dict)
    intermediates: Dict[str, float] = Field(default_factory=dict)
    diagnostics: Dict[str, float] = Field(default_factory=dict)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_terms(self) -> "ConstantReport":
        """
        Validate strictness and positivity.

        Raises:
            ValueError: If c is not strictly below every term or an ingredient is not positive.
        """
        for name, value in {**self.terms, **self.intermediates}.items():
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")
        for name, value in self.terms.items():
            if self.kind != "chebyshev" and not self.c < value:
                raise ValueError(f"c = {self.c} does not undercut {name} = {value}")
        return self

class InequalityReport(BaseModel):
    """
    Schema for one evaluation of ‖u‖_p · |{|u| >= c}|^{1/p'} >= c.

    Attributes:
        field (str): Field label.
        domain (Dict[str, Any]): Domain description.
        p (float): The exponent.
        c (float): The threshold.
        c_source (str): "constants" or "user".
        norm (NormEstimate): ‖u‖_p.
        superlevel (LevelSetEstimate): |{|u| >= c}|.
        indicator_norm (float): ‖1_S‖_{p'} from the inner bracket.
        lhs (float): norm.value * indicator_norm.
        verdict (bool): lhs >= c.
    """
    field: str
    domain: Dict[str, Any]
    p: float = Field(..., ge=1)
    c: float = Field(..., gt=0)
    c_source: Literal["constants", "user"]
    norm: NormEstimate
    superlevel: LevelSetEstimate
    indicator_norm: float = Field(..., ge=0)
    lhs: float = Field(..., ge=0)
    verdict: bool

    model_config = ConfigDict(frozen=True)

    @field_serializer("p")
    def serialize_p(self, p: float):
        return format_exponent(p)

    def recompute_verdict(self) -> bool:
        return self.norm.value * self.indicator_norm >= self.c

class ChebyshevCheck(BaseModel):
    """
    ε |{|u| >= ε}|^{1/p} <= ‖u‖_p with the outer bracket on the left.
    """
    eps: float = Field(..., gt=0)
    p: float = Field(..., ge=1)
    lhs: float = Field(..., ge=0)
    rhs: float = Field(..., ge=0)
    holds: bool

    model_config = ConfigDict(frozen=True)

    @field_serializer("p")
    def serialize_p(self, p: float):
        return format_exponent(p)

class SweepRow(BaseModel):
    """
    One N of the det-Hessian counterexample sweep.
    """
    N: int = Field(..., ge=1)
    sup_grid: float
    sup_analytic: float
    superlevel_measure: float
    lhs: float
    empty: bool
    dethess_min: float
    dethess_ok: bool

    model_config = ConfigDict(frozen=True)

class RunReport(BaseModel):
    """
    Schema for a finished CLI or HTTP run.

    Attributes:
        command (str): The command that ran.
        passed (bool): True iff every verdict is true and every tolerance met.
        rows (List[Dict[str, Any]]): One flat row per verdict, written to CSV.
        details (Dict[str, Any]): Full provenance, written to JSON.
    """
    command: str
    passed: bool
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)

class DerivativeCheck(BaseModel):
    """
    One comparison of a derivative formula against a centered difference of φ.
    """
    field: str
    kind: str
    r: float = Field(..., gt=0)
    formula: float
    finite_difference: float
    rel_error: float = Field(..., ge=0)
    degraded: bool = False

    model_config = ConfigDict(frozen=True)

class ReconstructionReport(BaseModel):
    """
    u(center) recovered as φ(R) - ∫_0^R φ'(r) dr.

    Attributes:
        center_value (float): u at the center.
        reconstructed (float): φ(R) minus the integrated derivative.
        rel_error (float): |reconstructed - center_value| / max(|center_value|, 1).
    """
    center_value: float
    reconstructed: float
    rel_error: float = Field(..., ge=0)

    model_config = ConfigDict(frozen=True)
