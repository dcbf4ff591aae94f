# app/schemas/state.py
"""
Pydantic schemas for two-qubit pure states.

Holds the in-memory state types (computational amplitudes, Bell-basis
coefficients, Schmidt canonical form, maximally entangled shift states)
and the JSON literal accepted by the command line.
"""
import math
from enum import Enum
from typing import List, Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.core.config import settings
from app.core.exceptions import NonUnitaryError, NormalizationError

BETA0_AMPLITUDES = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / math.sqrt(2.0)


class EntanglementKind(str, Enum):
    """Entanglement measures of a pure two-qubit state"""
    VON_NEUMANN = "von_neumann"
    LINEAR = "linear"


def _normalized_vector(value, size: int = 4) -> np.ndarray:
    arr = np.array(value, dtype=complex).reshape(-1)
    if arr.shape != (size,):
        raise ValueError(f"expected {size} amplitudes, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("amplitudes must be finite")
    deviation = abs(float(np.linalg.norm(arr)) - 1.0)
    if deviation > settings.NORMALIZATION_TOL:
        raise NormalizationError(deviation, settings.NORMALIZATION_TOL)
    return arr


class PureState4(BaseModel):
    """Pure two-qubit state in the computational basis |00>, |01>, |10>, |11>"""

    amplitudes: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("amplitudes", mode="before")
    @classmethod
    def validate_amplitudes(cls, v) -> np.ndarray:
        """Require four finite amplitudes with unit norm"""
        arr = _normalized_vector(v)
        arr.setflags(write=False)
        return arr

    def density_matrix(self) -> np.ndarray:
        return np.outer(self.amplitudes, np.conj(self.amplitudes))

    def as_pairs(self) -> List[Tuple[float, float]]:
        return [(float(z.real), float(z.imag)) for z in self.amplitudes]

    def phase_canonical(self) -> "PureState4":
        """Same ray with its largest-magnitude amplitude real and positive"""
        k = int(np.argmax(np.abs(self.amplitudes)))
        phase = self.amplitudes[k] / abs(self.amplitudes[k])
        return PureState4(amplitudes=self.amplitudes / phase)

    def overlap(self, other: "PureState4") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


class PauliCoeffs(BaseModel):
    """Coefficients a_k of a pure state in the Bell basis |beta_k> = (I x sigma_k)|beta_0>"""

    coefficients: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("coefficients", mode="before")
    @classmethod
    def validate_coefficients(cls, v) -> np.ndarray:
        """Require sum |a_k|^2 = 1"""
        arr = _normalized_vector(v)
        arr.setflags(write=False)
        return arr

    @property
    def a0(self) -> complex:
        return complex(self.coefficients[0])

    @property
    def a1(self) -> complex:
        return complex(self.coefficients[1])

    @property
    def a2(self) -> complex:
        return complex(self.coefficients[2])

    @property
    def a3(self) -> complex:
        return complex(self.coefficients[3])


class SchmidtForm(BaseModel):
    """Local unitaries U, V with (U x V)|psi> = cos(theta/2)|00> + sin(theta/2)|11>"""

    theta: float = Field(..., ge=0.0, le=math.pi / 2, description="Schmidt angle")
    u: np.ndarray
    v: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @property
    def is_product(self) -> bool:
        """Classification only; arithmetic never rounds theta"""
        return self.theta < 1e-8


class MaxEntangled(BaseModel):
    """Maximally entangled state |beta> = (I x u)|beta_0>, stored through u"""

    u: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("u", mode="before")
    @classmethod
    def validate_unitary(cls, v) -> np.ndarray:
        """Require a 2x2 unitary within UNITARY_TOL"""
        arr = np.asarray(v, dtype=complex)
        if arr.shape != (2, 2):
            raise ValueError(f"shift unitary must be 2x2, got shape {arr.shape}")
        deviation = float(np.max(np.abs(arr.conj().T @ arr - np.eye(2))))
        if deviation > settings.UNITARY_TOL:
            raise NonUnitaryError(deviation, settings.UNITARY_TOL)
        arr = arr.copy()
        arr.setflags(write=False)
        return arr

    @classmethod
    def beta0(cls) -> "MaxEntangled":
        return cls(u=np.eye(2, dtype=complex))

    def vector(self) -> np.ndarray:
        """Amplitudes of (I x u)|beta_0>: (u00, u10, u01, u11)/sqrt(2)"""
        return np.kron(np.eye(2), self.u) @ BETA0_AMPLITUDES

    def state(self) -> PureState4:
        return PureState4(amplitudes=self.vector())

    def projector(self) -> np.ndarray:
        vec = self.vector()
        return np.outer(vec, np.conj(vec))


class StateLiteral(BaseModel):
    """JSON literal for a pure state as accepted by --input"""

    basis: Literal["computational", "bell"] = Field(default="computational")
    amplitudes: List[Tuple[float, float]] = Field(..., min_length=4, max_length=4)

    @field_validator("amplitudes")
    @classmethod
    def validate_amplitudes(cls, v: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        """Reject non-finite components"""
        for re, im in v:
            if not (math.isfinite(re) and math.isfinite(im)):
                raise ValueError("amplitude components must be finite")
        return v

    def as_array(self) -> np.ndarray:
        return np.array([complex(re, im) for re, im in self.amplitudes])

    model_config = {
        "json_schema_extra": {
            "example": {
                "basis": "computational",
                "amplitudes": [[0.70710678118654757, 0.0], [0.0, 0.0], [0.0, 0.0], [0.70710678118654757, 0.0]],
            }
        }
    }
