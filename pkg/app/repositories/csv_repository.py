# app/repositories/csv_repository.py
"""
CSV row repository.

Writes a header of field aliases followed by one line per row, floats
with 12 significant digits. Reading returns the values exactly as
written.
"""
import csv
from pathlib import Path
from typing import Dict, List, Optional, Union

from app.repositories.base import BaseRowRepository, RowType, format_cell


class CsvRowRepository(BaseRowRepository[RowType]):
    """CSV sink and reader for one row model"""

    def _write_header(self) -> None:
        self._writer = csv.DictWriter(self._handle, fieldnames=self.fieldnames, lineterminator="\n")
        self._writer.writeheader()

    def _write_row(self, row: RowType) -> None:
        data = self.serialize(row)
        self._writer.writerow({key: format_cell(value) for key, value in data.items()})

    def _parse_record(self, record: Dict[str, str]) -> RowType:
        """Empty cells become None for optional fields"""
        values = {}
        for name, info in self.model.model_fields.items():
            key = info.alias or name
            raw = record.get(key, "")
            if raw == "" and not info.is_required() and info.default is None:
                values[key] = None
            else:
                values[key] = raw
        return self.model.model_validate(values)

    def read_all(self, path: Optional[Union[str, Path]] = None) -> List[RowType]:
        target = Path(path) if path is not None else self.path
        with target.open("r", encoding="utf-8", newline="") as handle:
            return [self._parse_record(record) for record in csv.DictReader(handle)]
