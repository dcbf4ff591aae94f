"""
Repository layer for sweep and scan output.

Row repositories write pydantic row models to CSV or JSON-lines files and
read them back with the values exactly as written.
"""

from .base import BaseRowRepository, format_cell
from .csv_repository import CsvRowRepository
from .jsonl_repository import JsonlRowRepository

__all__ = [
    "BaseRowRepository",
    "format_cell",
    "CsvRowRepository",
    "JsonlRowRepository",
]
