# app/schemas/purity.py
"""
Pydantic schemas for purity functionals and the reduced output form.

Key types:
- PurityOrder: finite p > 1, infinity, or the von Neumann (p -> 1) limit
- ReducedParams: (theta, phi, |a|), the three real variables left after
  the local-unitary reduction, with the derived shorthand S, C, c_phi,
  s_phi and M = 4 mu/(1 - mu)
- CharPolynomial: coefficients of R(x) = det(Delta - x I)
"""
import math
from enum import Enum
from fractions import Fraction
from typing import Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.exceptions import InvalidOrderError, ParameterRangeError


class PurityOrderKind(str, Enum):
    """Variants of the purity order"""
    FINITE = "finite"
    INFINITY = "infinity"
    ENTROPY = "entropy"


INFINITY_TOKENS = {"inf", "infinity", "∞", "+inf"}
ENTROPY_TOKENS = {"entropy", "vn", "von_neumann", "s1"}


class PurityOrder(BaseModel):
    """Order p of the Schatten norm / Renyi entropy"""

    kind: PurityOrderKind
    p: Optional[float] = Field(None, description="Finite order, required when kind is finite")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def validate_order(self) -> "PurityOrder":
        """Finite orders must exceed 1; symbolic orders carry no value"""
        if self.kind == PurityOrderKind.FINITE:
            if self.p is None or not math.isfinite(self.p) or self.p <= 1.0:
                raise ValueError(f"finite order must be a real p > 1, got {self.p!r}")
        elif self.p is not None:
            raise ValueError(f"{self.kind.value} order takes no numeric value")
        return self

    @classmethod
    def finite(cls, p: Union[float, Fraction]) -> "PurityOrder":
        p = float(p)
        if not math.isfinite(p) or p <= 1.0:
            raise InvalidOrderError(p, "finite orders require p > 1")
        return cls(kind=PurityOrderKind.FINITE, p=p)

    @classmethod
    def infinity(cls) -> "PurityOrder":
        return cls(kind=PurityOrderKind.INFINITY)

    @classmethod
    def entropy(cls) -> "PurityOrder":
        return cls(kind=PurityOrderKind.ENTROPY)

    @classmethod
    def parse(cls, value: Union[str, float, int, Fraction, "PurityOrder"]) -> "PurityOrder":
        """Accept 2, "2", "3/2", "inf", "∞" or "entropy" """
        if isinstance(value, PurityOrder):
            return value
        if isinstance(value, str):
            token = value.strip().lower()
            if token in INFINITY_TOKENS:
                return cls.infinity()
            if token in ENTROPY_TOKENS:
                return cls.entropy()
            try:
                number = Fraction(token)
            except (ValueError, ZeroDivisionError):
                raise InvalidOrderError(value, "expected a number > 1, 'inf' or 'entropy'")
            return cls.finite(number)
        if isinstance(value, float) and math.isinf(value) and value > 0:
            return cls.infinity()
        return cls.finite(value)

    @property
    def is_finite(self) -> bool:
        return self.kind == PurityOrderKind.FINITE

    @property
    def label(self) -> str:
        if self.kind == PurityOrderKind.FINITE:
            return format(self.p, ".12g")
        return "inf" if self.kind == PurityOrderKind.INFINITY else "entropy"


DEFAULT_P_GRID = ("1.1", "1.5", "2", "3", "5", "inf")


def default_p_grid() -> Tuple[PurityOrder, ...]:
    return tuple(PurityOrder.parse(token) for token in DEFAULT_P_GRID)


class ReducedShorthand(BaseModel):
    """Derived quantities of a reduced parameter point"""

    S: float
    C: float
    c_phi: float
    s_phi: float
    M: float
    a2: float

    model_config = ConfigDict(frozen=True)


class ReducedParams(BaseModel):
    """
    Reduced variables of the transformed output.

    phi is the phase of the SU(2)-normalized effective shift unitary
    W = [[a, conj(b)], [-b, conj(a)]] in the sense phi = 2 arg(a).
    """

    theta: float = Field(..., ge=0.0, le=math.pi / 2, description="Schmidt angle")
    phi: float = Field(0.0, description="Phase entering c_phi = cos(phi), s_phi = sin(phi)")
    a_mod: float = Field(..., ge=0.0, le=1.0, description="Modulus |a|")

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={"example": {"theta": 1.5707963267948966, "phi": 0.0, "a_mod": 1.0}},
    )

    def shorthand(self, mu: float, lam: float) -> ReducedShorthand:
        """S = 2 lam sin(theta), C = 2 lam cos(theta), M = 4 mu/(1 - mu)"""
        if not (0.0 <= mu < 1.0):
            raise ParameterRangeError("mu", mu, "[0, 1) for finite M")
        return ReducedShorthand(
            S=2.0 * lam * math.sin(self.theta),
            C=2.0 * lam * math.cos(self.theta),
            c_phi=math.cos(self.phi),
            s_phi=math.sin(self.phi),
            M=4.0 * mu / (1.0 - mu),
            a2=self.a_mod * self.a_mod,
        )


class CharPolynomial(BaseModel):
    """
    R(x) = det(Delta - x I) = c3 x^3 + c2 x^2 + c1 x + c0 with c3 = -1.

    r0 holds the M-independent-in-|a| part in the shifted variable
    zeta = x - (1 + lambda^2): R0(zeta) = -zeta^3 + (M - 2 lam^2) zeta^2
    + (C^2 + lam^2 S^2) zeta + (C^2 + lam^2 S^2)(2 lam^2 - M).
    """

    coefficients: Tuple[float, float, float, float]
    r0: Tuple[float, float, float, float]
    shift: float = Field(..., description="1 + lambda^2")

    model_config = ConfigDict(frozen=True)

    def evaluate(self, x: float) -> float:
        c3, c2, c1, c0 = self.coefficients
        return ((c3 * x + c2) * x + c1) * x + c0

    def evaluate_r0(self, zeta: float) -> float:
        c3, c2, c1, c0 = self.r0
        return ((c3 * zeta + c2) * zeta + c1) * zeta + c0
