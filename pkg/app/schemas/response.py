# app/schemas/response.py
from pydantic import BaseModel
from typing import Any, Generic, List, Optional, TypeVar

from app.core.config import settings

# Generic type for response data
T = TypeVar('T')


class ResponseMeta(BaseModel):
    """Metadata for command output; no timestamp so reruns stay byte-identical"""
    command: str
    seed: Optional[int] = None
    version: str = settings.VERSION


class ErrorDetail(BaseModel):
    """Error detail structure"""
    code: str
    message: str
    field: Optional[str] = None  # For validation errors


class CommandResponse(BaseModel, Generic[T]):
    """Standard wrapper for JSON command output"""
    data: Optional[T] = None
    meta: ResponseMeta
    errors: Optional[List[ErrorDetail]] = None

    @classmethod
    def success(cls, data: T, command: str, seed: Optional[int] = None):
        """Create a successful response"""
        return cls(data=data, meta=ResponseMeta(command=command, seed=seed))

    @classmethod
    def error(cls, errors: List[ErrorDetail], command: str, seed: Optional[int] = None):
        """Create an error response"""
        return cls(meta=ResponseMeta(command=command, seed=seed), errors=errors)

    def to_json(self) -> str:
        return self.model_dump_json(exclude_none=True, by_alias=True, indent=2)


class DataResponse(CommandResponse[Any]):
    pass
