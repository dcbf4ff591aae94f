# app/schemas/spectrum.py
"""
Spectrum schema: real eigenvalue lists sorted in descending order.

Spectra are the currency of every purity, majorization and perturbation
computation, so the ordering contract is enforced at construction.
"""
import math
from typing import Iterable, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

# Slack allowed when validating the descending order of computed values
ORDER_SLACK = 1e-12


class Spectrum(BaseModel):
    """Real eigenvalues sorted in descending order"""

    values: Tuple[float, ...] = Field(..., min_length=1, description="Eigenvalues, largest first")

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={"example": {"values": [0.6667, 0.1111, 0.1111, 0.1111]}},
    )

    @field_validator("values")
    @classmethod
    def validate_values(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        """Reject non-finite entries and unsorted input"""
        if not all(math.isfinite(x) for x in v):
            raise ValueError("spectrum entries must be finite")
        for left, right in zip(v, v[1:]):
            if right > left + ORDER_SLACK * max(1.0, abs(left)):
                raise ValueError("spectrum must be sorted in descending order")
        return tuple(float(x) for x in v)

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "Spectrum":
        """Sort arbitrary real values descending; ties keep their original order"""
        arr = np.asarray(list(values), dtype=float)
        order = np.argsort(-arr, kind="stable")
        return cls(values=tuple(arr[order]))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @property
    def top(self) -> float:
        return self.values[0]

    @property
    def total(self) -> float:
        return float(math.fsum(self.values))

    def __len__(self) -> int:
        return len(self.values)

    def rounded(self, digits: int = 3) -> Tuple[float, ...]:
        return tuple(round(x, digits) for x in self.values)
