# app/schemas/analysis.py
"""
Pydantic schemas for the verification instruments.

Covers first-order eigenvalue perturbation reports, the comparison-lemma
shifts, boundary-column eigenvalues of Delta, majorization and trumping
reports, and the pass/fail records of the verification suites.
"""
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.schemas.purity import PurityOrder, PurityOrderKind

Triple = Tuple[float, float, float]


class PerturbationDirection(str, Enum):
    """Parameter moved by a perturbation"""
    C_PHI = "c_phi"
    A2 = "a2"


class BoundarySide(str, Enum):
    A0 = "a0"
    A1 = "a1"


# === Comparison lemmas ===


class RootShiftPrediction(BaseModel):
    """First-order and unexpanded root shifts of R(x) + delta1 x + delta2"""

    roots: Triple
    delta1: float
    delta2: float
    predicted: Triple
    exact_form: Triple
    actual: Optional[Triple] = None
    min_gap: float
    reliable: bool = Field(..., description="Root gaps exceed 1e3 times the largest delta")

    @property
    def error(self) -> Optional[float]:
        if self.actual is None:
            return None
        return max(abs(p - a) for p, a in zip(self.predicted, self.actual))


class OrderSignReport(BaseModel):
    """Norm change at one order: predicted, measured and claimed signs"""

    order: str
    claim: Optional[str] = Field(None, description="Name of the sign claim covering this order, if any")
    predicted_change: Optional[float] = None
    measured_change: Optional[float] = None
    claimed_sign: Optional[int] = Field(None, description="+1/-1 where a sign is proven, else None")
    measured_sign: Optional[int] = None
    resolved: bool = True
    agrees: Optional[bool] = None
    bracket: Optional[Tuple[float, float]] = Field(
        None, description="Competing terms: divided differences of x^p and x^(p-1)"
    )
    heuristic: Optional[float] = None


class LemmaShiftResult(BaseModel):
    """Shifted vector of a comparison lemma with per-order outcomes"""

    kind: Literal["p", "q"]
    v: Triple
    eps: float
    w: Triple
    shifts: Triple
    sum_change: float
    orders: List[OrderSignReport]

    @property
    def failures(self) -> List[OrderSignReport]:
        return [o for o in self.orders if o.agrees is False]


# === Perturbation scans ===


class MeanValueDiagnostics(BaseModel):
    """Mean-value points of the divided differences and the checked assumptions"""

    v_acute: Optional[Triple] = None
    v_grave: Optional[Tuple[float, float]] = None
    acute_grave_gap: Optional[float] = None
    v_acute2_above_floor: Optional[bool] = None


class PerturbationReport(BaseModel):
    """Outcome of one parameter shift at one grid point"""

    index: int = 0
    mu: float
    lam: float = Field(..., alias="lambda")
    theta: float
    phi: float
    a_mod: float
    mu_c: float
    mu_inner: float
    direction: PerturbationDirection
    eps: float = Field(..., description="Signed step actually applied")
    delta1: float
    delta2: float
    eigenvalues: Triple
    predicted_shifts: Optional[Triple] = None
    measured_shifts: Triple
    shift_error: Optional[float] = None
    reliable: bool
    degenerate: bool
    orders: List[OrderSignReport]
    diagnostics: Dict[str, MeanValueDiagnostics] = Field(default_factory=dict)

    model_config = ConfigDict(populate_by_name=True)


class PerturbationGrid(BaseModel):
    """Grid of (mu, lambda, theta, phi, |a|) points and the orders checked"""

    mu: List[float]
    lam: List[float] = Field(..., alias="lambda")
    theta: List[float]
    phi: List[float] = Field(default_factory=lambda: [0.0])
    a_mod: List[float]
    eps: float = Field(default=1e-6, gt=0.0)
    orders: List[PurityOrder]

    model_config = ConfigDict(populate_by_name=True)

    @field_validator("mu", "lam", "theta", "phi", "a_mod")
    @classmethod
    def validate_nonempty(cls, v: List[float]) -> List[float]:
        """Every axis needs at least one value"""
        if not v:
            raise ValueError("grid axes must be nonempty")
        return v

    @field_validator("orders")
    @classmethod
    def validate_orders(cls, v: List[PurityOrder]) -> List[PurityOrder]:
        """Norm orders only; the entropy limit carries no sign claims here"""
        if not v:
            raise ValueError("orders must be nonempty")
        if any(order.kind == PurityOrderKind.ENTROPY for order in v):
            raise ValueError("perturbation scans take finite orders and inf only")
        return v

    def size(self) -> int:
        return len(self.mu) * len(self.lam) * len(self.theta) * len(self.phi) * len(self.a_mod)


class ClaimSummary(BaseModel):
    """Agreement count for one proven sign claim"""

    claim: str
    checked: int = 0
    agreed: int = 0
    unresolved: int = 0

    @property
    def passed(self) -> bool:
        return self.agreed == self.checked


# === Boundary tables ===


class BoundaryEigenvalues(BaseModel):
    """Closed-form Delta eigenvalues at |a| = 0 or 1 next to the eigensolver"""

    side: BoundarySide
    mu: float
    lam: float = Field(..., alias="lambda")
    theta: float
    upper: float
    middle: float
    lower: float
    eigensolver: Triple
    deviation: float

    model_config = ConfigDict(populate_by_name=True)

    @property
    def closed_form(self) -> Triple:
        return (self.upper, self.middle, self.lower)


class MonotonicityScan(BaseModel):
    """Top eigenvalue of Delta along |a|^2 in [0, 1]"""

    mu: float
    lam: float = Field(..., alias="lambda")
    theta: float
    c_phi: float
    a2_values: List[float]
    top_values: List[float]
    monotone: bool
    endpoint_increase: bool

    model_config = ConfigDict(populate_by_name=True)


class EntangledMatrixCheck(BaseModel):
    """Eigenvalues of Delta at sin(theta) = 1, c_phi = 1: closed form versus eigensolver"""

    mu: float
    lam: float = Field(..., alias="lambda")
    a_mod: float
    closed_form: Triple
    eigensolver: Triple
    deviation: float

    model_config = ConfigDict(populate_by_name=True)


class EntangledNormScan(BaseModel):
    mu: float
    lam: float = Field(..., alias="lambda")
    a_values: List[float]
    norms: Dict[str, List[float]]
    maximal_at_one: bool
    top_increasing: bool

    model_config = ConfigDict(populate_by_name=True)


# === Majorization ===


class DominanceReport(BaseModel):
    """Majorization, weak majorization and p-norm dominance of x by y"""

    x: Tuple[float, ...]
    y: Tuple[float, ...]
    majorized: bool
    weakly_majorized: bool
    p_dominated: bool
    first_violation_index: Optional[int] = Field(
        None, description="1-based k of the first partial sum of x exceeding that of y"
    )
    first_violation_sums: Optional[Tuple[float, float]] = None
    first_violating_p: Optional[str] = None


class TrumpingResult(BaseModel):
    """Finite catalyst search; absence is reported for the searched grid only"""

    p_dominance: DominanceReport
    catalyst: Optional[Tuple[float, ...]] = None
    catalyst_dimension: Optional[int] = None
    dimensions_searched: List[int]
    candidates_checked: int


# === Verification suites ===


class CheckResult(BaseModel):
    """One named check of a suite"""

    name: str
    passed: bool
    detail: str = ""
    informational: bool = Field(default=False, description="Reported only, never fails the suite")
    counterexample: Optional[Dict[str, Any]] = None


class SuiteResult(BaseModel):
    suite: str
    seed: int
    trials: int
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed or check.informational for check in self.checks)

    @property
    def first_failure(self) -> Optional[CheckResult]:
        return next(
            (check for check in self.checks if not check.passed and not check.informational), None
        )


class VerificationSuite(str, Enum):
    LEMMAS = "lemmas"
    COVARIANCE = "covariance"
    MAJORIZATION = "majorization"
    TABLES = "tables"
    PERTURBATION = "perturbation"
