from pathlib import Path
from typing import Any, Dict, Generic, Iterable, List, Optional, Type, TypeVar, Union

from pydantic import BaseModel

# Generic type for the pydantic row models written by sweeps and scans
RowType = TypeVar("RowType", bound=BaseModel)


def format_cell(value: Any) -> str:
    """
    Render one value for a text table.

    Floats use 12 significant digits, booleans are lowercase and None is
    the empty string.
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


class BaseRowRepository(Generic[RowType]):
    """
    Base repository for append-only row files.

    A repository is bound to one row model and one path. Opening it as a
    context manager truncates the file and keeps a single writer handle,
    so each output file has exactly one consumer.

    Type Parameters:
        RowType: pydantic model describing one row

    Usage:
        class Fig1Repository(CsvRowRepository[Fig1Row]):
            def __init__(self, path):
                super().__init__(Fig1Row, path)
    """

    def __init__(self, model: Type[RowType], path: Union[str, Path]):
        """
        Initialize repository with a row model and target path.

        Args:
            model: pydantic model class of one row
            path: File the rows are written to and read from
        """
        self.model = model
        self.path = Path(path)
        self._handle = None
        self._written = 0

    @property
    def fieldnames(self) -> List[str]:
        """Column names in declaration order, using field aliases"""
        return [info.alias or name for name, info in self.model.model_fields.items()]

    def serialize(self, row: RowType) -> Dict[str, Any]:
        return row.model_dump(by_alias=True)

    # === Writer lifecycle ===

    def __enter__(self) -> "BaseRowRepository[RowType]":
        self.open()
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()

    def open(self) -> None:
        """
        Create parent directories and truncate the file.

        Raises:
            OSError: If the path cannot be created or written
        """
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._handle = self.path.open("w", encoding="utf-8", newline="")
        self._written = 0
        self._write_header()

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None

    def append(self, rows: Iterable[RowType]) -> int:
        """
        Append a batch of rows and flush.

        Args:
            rows: Row models to write

        Returns:
            Number of rows written in this batch

        Raises:
            OSError: If the write fails; earlier batches stay on disk
        """
        if self._handle is None:
            raise OSError(f"repository for {self.path} is not open")
        count = 0
        for row in rows:
            self._write_row(row)
            count += 1
        self._handle.flush()
        self._written += count
        return count

    def count(self) -> int:
        """Rows written since the file was opened"""
        return self._written

    def read_all(self, path: Optional[Union[str, Path]] = None) -> List[RowType]:
        """
        Read every row back into row models.

        Args:
            path: Alternative file to read; defaults to the repository path

        Returns:
            Row models in file order
        """
        raise NotImplementedError

    # === Format hooks ===

    def _write_header(self) -> None:
        pass

    def _write_row(self, row: RowType) -> None:
        raise NotImplementedError
