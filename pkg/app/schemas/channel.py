# app/schemas/channel.py
"""
Pydantic schemas for the correlated two-qubit channel.

ChannelParams carries (mu, lambda) and the maximally entangled shift state;
DensityMatrix4 wraps validated two-qubit density matrices.
"""
from typing import List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.core.config import settings
from app.numerics.linalg import eig_hermitian, hermitian_deviation
from app.schemas.state import MaxEntangled


class ChannelParams(BaseModel):
    """Parameters of R -> (1-mu)(Psi x Psi)(R) + mu Tr(R)|beta><beta|"""

    mu: float = Field(..., ge=0.0, le=1.0, description="Correlation probability")
    lam: float = Field(
        ..., alias="lambda", ge=-1.0 / 3.0, le=1.0, description="Depolarizing parameter"
    )
    beta: MaxEntangled = Field(default_factory=MaxEntangled.beta0, description="Shift state")

    model_config = ConfigDict(
        populate_by_name=True,
        frozen=True,
        arbitrary_types_allowed=True,
        json_schema_extra={"example": {"mu": 0.5, "lambda": 0.3333333333333333, "beta": "beta0"}},
    )


class DensityMatrix4(BaseModel):
    """Two-qubit density matrix: Hermitian, unit trace, positive semidefinite"""

    m: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("m", mode="before")
    @classmethod
    def validate_density(cls, v) -> np.ndarray:
        """Enforce the density-matrix invariants within HERMITIAN_TOL"""
        arr = np.array(v, dtype=complex)
        if arr.shape != (4, 4):
            raise ValueError(f"density matrix must be 4x4, got shape {arr.shape}")
        tolerance = settings.HERMITIAN_TOL
        deviation = hermitian_deviation(arr)
        if deviation > tolerance:
            raise ValueError(f"density matrix is not Hermitian (deviation {deviation:.3e})")
        trace = complex(np.trace(arr))
        if abs(trace - 1.0) > tolerance:
            raise ValueError(f"density matrix trace {trace.real:.12g} differs from 1")
        smallest = eig_hermitian(arr).values[-1]
        if smallest < -tolerance:
            raise ValueError(f"density matrix has negative eigenvalue {smallest:.3e}")
        arr.setflags(write=False)
        return arr


class UnitaryLiteral(BaseModel):
    """JSON form of a 2x2 unitary: [[[re, im], [re, im]], [[re, im], [re, im]]]"""

    unitary: List[List[Tuple[float, float]]] = Field(..., min_length=2, max_length=2)

    @field_validator("unitary")
    @classmethod
    def validate_shape(cls, v: List[List[Tuple[float, float]]]) -> List[List[Tuple[float, float]]]:
        """Require two rows of two complex entries"""
        if any(len(row) != 2 for row in v):
            raise ValueError("unitary rows must have two entries")
        return v

    def as_array(self) -> np.ndarray:
        return np.array([[complex(re, im) for re, im in row] for row in self.unitary])


class ChannelParamsLiteral(BaseModel):
    """JSON channel parameters: {"mu": f, "lambda": f, "beta": {"unitary": ...} | "beta0"}"""

    mu: float
    lam: float = Field(..., alias="lambda")
    beta: Union[Literal["beta0"], UnitaryLiteral] = "beta0"

    model_config = ConfigDict(populate_by_name=True)

    def to_params(self) -> ChannelParams:
        beta = (
            MaxEntangled.beta0()
            if self.beta == "beta0"
            else MaxEntangled(u=self.beta.as_array())
        )
        return ChannelParams(mu=self.mu, lam=self.lam, beta=beta)


def matrix_of(rho: Union["DensityMatrix4", np.ndarray]) -> np.ndarray:
    """Raw 4x4 array behind a DensityMatrix4 or an array-like"""
    if isinstance(rho, DensityMatrix4):
        return rho.m
    return np.asarray(rho, dtype=complex)


Rho = Union[DensityMatrix4, np.ndarray]
