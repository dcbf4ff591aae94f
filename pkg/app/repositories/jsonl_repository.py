# app/repositories/jsonl_repository.py
"""
JSON-lines row repository: one JSON object per line, keys by alias.
"""
from pathlib import Path
from typing import List, Optional, Union

from app.repositories.base import BaseRowRepository, RowType


class JsonlRowRepository(BaseRowRepository[RowType]):
    """JSON-lines sink and reader for one row model"""

    def _write_row(self, row: RowType) -> None:
        self._handle.write(row.model_dump_json(by_alias=True))
        self._handle.write("\n")

    def read_all(self, path: Optional[Union[str, Path]] = None) -> List[RowType]:
        target = Path(path) if path is not None else self.path
        with target.open("r", encoding="utf-8") as handle:
            return [self.model.model_validate_json(line) for line in handle if line.strip()]
