# app/schemas/run_config.py
"""
Pydantic schemas for command runs.

A run is described by a RunConfig (seed, output, format) and one
parameter model per command. Config files are JSON or YAML documents
with top-level run fields and one section per command:

    seed: 7
    format: csv
    optimize:
      mu: 1/4
      lambda: 1/2
      p: 2
      method: both

Values given on the command line replace the file values key by key.
"""
import json
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, Dict, List, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, field_validator, model_validator

from app.core.config import settings
from app.schemas.analysis import VerificationSuite
from app.schemas.optimum import OptimizeMethod, OptimizerBudget
from app.schemas.purity import DEFAULT_P_GRID, PurityOrder

SEED_MAX = 2 ** 64 - 1


def parse_fraction(value: Union[str, int, float, Fraction]) -> Fraction:
    """
    Exact rational from "1/3", "0.25", 3 or a float.

    Raises:
        ValueError: If the value is not a finite number
    """
    if isinstance(value, bool):
        raise ValueError(f"expected a number, got {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float)):
        try:
            return Fraction(value)
        except (ValueError, OverflowError):
            raise ValueError(f"expected a finite number, got {value!r}")
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"expected a decimal or a/b fraction, got {value!r}")


def coerce_number(value: Any) -> Any:
    """Before-validator: fraction strings become floats, other input passes through"""
    if isinstance(value, str):
        return float(parse_fraction(value))
    if isinstance(value, Fraction):
        return float(value)
    return value


def coerce_grid(value: Any) -> Any:
    """Comma-separated string or list of numbers"""
    if isinstance(value, str):
        value = [token for token in value.split(",") if token.strip()]
    if isinstance(value, (list, tuple)):
        return [coerce_number(item) for item in value]
    return value


Number = Annotated[float, BeforeValidator(coerce_number)]
Grid = Annotated[List[float], BeforeValidator(coerce_grid)]


class OutputFormat(str, Enum):
    CSV = "csv"
    JSONL = "jsonl"


class RunConfig(BaseModel):
    """Run-level settings shared by all commands"""

    command: Optional[str] = None
    seed: int = Field(default=settings.DEFAULT_SEED, ge=0, le=SEED_MAX)
    output: Optional[Path] = None
    format: OutputFormat = OutputFormat.CSV
    workers: Optional[int] = Field(default=None, ge=1)
    parameters: Dict[str, Any] = Field(default_factory=dict, description="Per-command sections")

    model_config = ConfigDict(extra="forbid")

    @classmethod
    def from_document(cls, document: Dict[str, Any]) -> "RunConfig":
        """Split a loaded config document into run fields and command sections"""
        run_fields = {key: document[key] for key in ("command", "seed", "output", "format", "workers") if key in document}
        sections = {key: value for key, value in document.items() if key not in run_fields}
        for name, section in sections.items():
            if not isinstance(section, dict):
                raise ValueError(f"config section {name!r} must be a mapping")
        return cls(**run_fields, parameters=sections)

    def section(self, command: str) -> Dict[str, Any]:
        return dict(self.parameters.get(command, {}))


def load_config_document(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a JSON or YAML config file.

    Files ending in .json are parsed as JSON; anything else goes through
    yaml.safe_load, which also accepts JSON.

    Raises:
        OSError: If the file cannot be read
        json.JSONDecodeError, yaml.YAMLError: On malformed content
        ValueError: If the document is not a mapping
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    document = json.loads(text) if path.suffix.lower() == ".json" else yaml.safe_load(text)
    if document is None:
        return {}
    if not isinstance(document, dict):
        raise ValueError(f"config file {path} must hold a mapping at the top level")
    return document


def merge_parameters(file_values: Dict[str, Any], flag_values: Dict[str, Any]) -> Dict[str, Any]:
    """Flags that were given replace file values; unset flags (None) do not"""
    merged = dict(file_values)
    merged.update({key: value for key, value in flag_values.items() if value is not None})
    return merged


class OrderParam(BaseModel):
    """Mixin validating a single purity order given as text"""

    @field_validator("p", mode="before", check_fields=False)
    @classmethod
    def validate_order(cls, v: Any) -> str:
        """Accept reals > 1, inf and entropy"""
        return PurityOrder.parse(str(v)).label


class NormParams(OrderParam):
    """Parameters of `norm`"""

    mu: Number = Field(..., ge=0.0, le=1.0)
    lam: Optional[Number] = Field(None, alias="lambda", ge=-1.0 / 3.0, le=1.0)
    p: str
    input: str
    beta: str = "beta0"

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    @model_validator(mode="after")
    def validate_lambda(self) -> "NormParams":
        """lambda may be omitted only at mu = 1, where the output ignores it"""
        if self.lam is None:
            if self.mu != 1.0:
                raise ValueError("lambda is required unless mu = 1")
            self.lam = 1.0
        return self


class OptimizeParams(OrderParam):
    """Parameters of `optimize`"""

    mu: Number = Field(..., ge=0.0, le=1.0)
    lam: Number = Field(..., alias="lambda", ge=0.0, le=1.0)
    p: str = "2"
    method: OptimizeMethod = OptimizeMethod.ANALYTIC
    seed: int = Field(default=settings.DEFAULT_SEED, ge=0, le=SEED_MAX)
    budget: OptimizerBudget = Field(default_factory=OptimizerBudget)

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    @field_validator("budget", mode="before")
    @classmethod
    def validate_budget(cls, v: Any) -> Any:
        """A bare integer sets the number of random starting states"""
        if isinstance(v, (int, str)) and not isinstance(v, bool) and str(v).strip().isdigit():
            return {"random_states": int(v)}
        return v


FIG3_PANELS: Tuple[Tuple[float, float], ...] = ((0.25, 0.5), (0.5, 1.0 / 3.0))


class FigureName(str, Enum):
    FIG1 = "fig1"
    FIG2 = "fig2"
    FIG3 = "fig3"


class FiguresParams(BaseModel):
    """Parameters of `figures`; grids default per figure"""

    figure: FigureName
    out: Optional[Path] = None
    mu_grid: Grid = Field(default_factory=list)
    lam_grid: Grid = Field(default_factory=list, alias="lambda_grid")
    points: List[Tuple[Number, Number]] = Field(default_factory=list, description="(mu, lambda) panels for fig3")
    p_grid: List[str] = Field(default_factory=list)
    trials: int = Field(default=1000, ge=1)
    seed: int = Field(default=settings.DEFAULT_SEED, ge=0, le=SEED_MAX)

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    @field_validator("p_grid", mode="before")
    @classmethod
    def validate_p_grid(cls, v: Any) -> List[str]:
        """Comma-separated string or list of orders"""
        if isinstance(v, str):
            v = [token for token in v.split(",") if token.strip()]
        return [PurityOrder.parse(str(item)).label for item in v]

    def output_path(self) -> Path:
        return self.out or Path(settings.OUTPUT_DIR) / f"{self.figure.value}.csv"

    def resolved_points(self) -> List[Tuple[float, float]]:
        """fig3 runs on explicit panels; other figures use the grids"""
        if self.figure != FigureName.FIG3:
            return []
        if self.points:
            return list(self.points)
        if self.mu_grid or self.lam_grid:
            return []
        return list(FIG3_PANELS)

    def resolved_grids(self) -> Tuple[List[float], List[float]]:
        if self.figure == FigureName.FIG3 and self.resolved_points():
            return [], []
        steps = 51 if self.figure == FigureName.FIG1 else 101
        default = [i / (steps - 1) for i in range(steps)]
        return (self.mu_grid or default), (self.lam_grid or default)

    def resolved_orders(self) -> List[str]:
        if self.p_grid:
            return self.p_grid
        if self.figure == FigureName.FIG3:
            return ["entropy", "1.5", "2", "3", "5", "inf"]
        return ["2"]


class VerifyParams(BaseModel):
    """Parameters of `verify`"""

    suite: VerificationSuite
    seed: int = Field(default=settings.DEFAULT_SEED, ge=0, le=SEED_MAX)
    trials: int = Field(default=200, ge=1)
    out: Optional[Path] = None

    model_config = ConfigDict(extra="forbid")


class CheckConjectureParams(BaseModel):
    """Parameters of `check-conjecture`"""

    cells: int = Field(default=2000, ge=1)
    per_cell: int = Field(default=50, ge=1)
    p_grid: List[str] = Field(default_factory=lambda: list(DEFAULT_P_GRID))
    seed: int = Field(default=settings.DEFAULT_SEED, ge=0, le=SEED_MAX)
    mu: Optional[Number] = Field(None, ge=0.0, le=1.0)
    lam: Optional[Number] = Field(None, alias="lambda", ge=0.0, le=1.0)
    lattice: bool = True
    out: Optional[Path] = None
    format: OutputFormat = OutputFormat.CSV

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    @field_validator("p_grid", mode="before")
    @classmethod
    def validate_p_grid(cls, v: Any) -> List[str]:
        """Comma-separated string or list of orders"""
        if isinstance(v, str):
            v = [token for token in v.split(",") if token.strip()]
        orders = [PurityOrder.parse(str(item)).label for item in v]
        if not orders:
            raise ValueError("p_grid must be nonempty")
        return orders

    def output_path(self) -> Path:
        suffix = "jsonl" if self.format == OutputFormat.JSONL else "csv"
        return self.out or Path(settings.OUTPUT_DIR) / f"conjecture_report.{suffix}"
