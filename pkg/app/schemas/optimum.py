# app/schemas/optimum.py
"""
Pydantic schemas for optimal output purity and parameter sweeps.

Contains the optimizer result (Optimum), its printable report, the
numeric optimizer budget, the sweep specification and the row models of
the figure and conjecture-report tables.
"""
import math
from enum import Enum
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.schemas.purity import PurityOrder, ReducedParams, default_p_grid
from app.schemas.spectrum import Spectrum
from app.schemas.state import PureState4


class Regime(str, Enum):
    """Position of mu relative to the threshold mu_c"""
    BELOW_THRESHOLD = "below_threshold"
    AT_OR_ABOVE = "at_or_above"
    TRIVIAL = "trivial"


class OptimizeMethod(str, Enum):
    ANALYTIC = "analytic"
    NUMERIC = "numeric"
    BOTH = "both"


class Optimum(BaseModel):
    """Optimal output purity at one (mu, lambda, p)"""

    value: float = Field(..., description="nu_p for norm orders, minimal S_1 for the entropy order")
    theta_opt: float = Field(..., ge=0.0, le=math.pi / 2)
    regime: Regime
    witness: PureState4
    order: PurityOrder
    mu: float
    lam: float = Field(..., alias="lambda")
    mu_c: Optional[float] = None
    spectrum: Spectrum
    method: Literal["analytic", "conjectured", "numeric"]
    reduced: Optional[ReducedParams] = None
    evaluations: int = Field(default=0, ge=0)

    model_config = ConfigDict(populate_by_name=True, frozen=True, arbitrary_types_allowed=True)


class OptimumReport(BaseModel):
    """Serializable view of an Optimum for command output"""

    method: str
    order: str
    mu: float
    lam: float = Field(..., alias="lambda")
    value: float
    theta_opt: float
    regime: Regime
    mu_c: Optional[float] = None
    mu_inner: Optional[float] = None
    spectrum: Tuple[float, ...]
    witness: List[Tuple[float, float]]
    linear_entropy: float
    vn_entropy: float
    evaluations: int = 0
    gap: Optional[float] = None

    model_config = ConfigDict(populate_by_name=True, serialize_by_alias=True)


class OptimizerBudget(BaseModel):
    """Work limits of the derivative-free optimizer"""

    random_states: int = Field(default=200, ge=0)
    theta_points: int = Field(default=21, ge=2)
    phi_points: int = Field(default=13, ge=2)
    a_points: int = Field(default=21, ge=2)
    step_tol: float = Field(default=1e-8, gt=0.0)
    max_iterations: int = Field(default=20000, ge=1)

    model_config = ConfigDict(frozen=True)


class WitnessFamilySpectra(BaseModel):
    """Output spectra of the two candidate optimal-input families"""

    canonical: Spectrum
    conjugate_form: Spectrum = Field(..., description="(V^T x V^dagger)|psi_theta>")
    plain_form: Spectrum = Field(..., description="(V^T x V)|psi_theta>")
    conjugate_deviation: float
    plain_deviation: float


class SweepMode(str, Enum):
    REPORT = "report"
    FIG1 = "fig1"
    FIG2 = "fig2"
    FIG3 = "fig3"


class SweepSpec(BaseModel):
    """
    Sweep over (mu, lambda) cells.

    Either both grids are given (their product forms the cells), explicit
    (mu, lambda) points are listed, or `cells` random points are drawn; in
    the random case a single-entry grid pins the corresponding coordinate.
    """

    mode: SweepMode = SweepMode.REPORT
    mu_grid: List[float] = Field(default_factory=list)
    lam_grid: List[float] = Field(default_factory=list, alias="lambda_grid")
    points: List[Tuple[float, float]] = Field(default_factory=list, description="Explicit (mu, lambda) cells")
    cells: Optional[int] = Field(default=None, ge=1)
    p_grid: List[PurityOrder] = Field(default_factory=lambda: list(default_p_grid()))
    trials: int = Field(default=50, ge=1, description="Random inputs per cell")
    lattice: bool = Field(default=True, description="Add the reduced-lattice search per cell")
    seed: int = Field(default=0, ge=0)
    budget: OptimizerBudget = Field(default_factory=OptimizerBudget)

    model_config = ConfigDict(populate_by_name=True)

    @field_validator("mu_grid", "lam_grid")
    @classmethod
    def validate_unit_interval(cls, v: List[float]) -> List[float]:
        """Grid values must lie in [0, 1]"""
        for value in v:
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"grid value {value} outside [0, 1]")
        return v

    @field_validator("points")
    @classmethod
    def validate_points(cls, v: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        """Point coordinates must lie in [0, 1]"""
        for mu, lam in v:
            if not (0.0 <= mu <= 1.0 and 0.0 <= lam <= 1.0):
                raise ValueError(f"point ({mu}, {lam}) outside [0, 1] x [0, 1]")
        return v

    @model_validator(mode="after")
    def validate_cells(self) -> "SweepSpec":
        """Grids must be nonempty unless random cells are requested"""
        if self.points:
            if self.cells is not None or self.mu_grid or self.lam_grid:
                raise ValueError("points exclude grids and random cells")
        elif self.cells is None:
            if not self.mu_grid or not self.lam_grid:
                raise ValueError("mu_grid and lambda_grid must be nonempty")
        elif len(self.mu_grid) > 1 or len(self.lam_grid) > 1:
            raise ValueError("random cells accept at most one pinned mu and lambda")
        if not self.p_grid:
            raise ValueError("p_grid must be nonempty")
        return self


class Fig1Row(BaseModel):
    mu: float
    lam: float = Field(..., alias="lambda")
    p2_norm: float

    model_config = ConfigDict(populate_by_name=True)


class Fig2Row(BaseModel):
    mu: float
    lam: float = Field(..., alias="lambda")
    mu_c: float
    theta_opt: float
    linear_entropy: float
    vn_entropy: float

    model_config = ConfigDict(populate_by_name=True)


class Fig3Row(BaseModel):
    mu: float
    lam: float = Field(..., alias="lambda")
    p: float
    s_p: float
    source: Literal["random", "conjectured", "bound"]

    model_config = ConfigDict(populate_by_name=True)


class ReportRow(BaseModel):
    """One (cell, p) line of the conjecture report"""

    mu: float
    lam: float = Field(..., alias="lambda")
    p: str
    conjectured: float
    best_random: float
    gap: float = Field(..., description="Positive when some input beats the conjectured optimum")
    violation_flag: bool
    theta_opt: float
    linear_entropy: float
    vn_entropy: float
    best_lattice: Optional[float] = None
    violating_state: str = ""

    model_config = ConfigDict(populate_by_name=True)


class SweepResult(BaseModel):
    """Summary of a completed sweep"""

    mode: SweepMode
    cells: int
    rows: int
    violations: int = 0
    max_gap: Optional[float] = None
    io_errors: int = 0
    path: Optional[str] = None
