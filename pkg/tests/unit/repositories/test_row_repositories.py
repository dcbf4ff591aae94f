# tests/unit/repositories/test_row_repositories.py
import json

import pytest

from app.repositories.base import format_cell
from app.repositories.csv_repository import CsvRowRepository
from app.repositories.jsonl_repository import JsonlRowRepository
from app.schemas.analysis import ClaimSummary
from app.schemas.optimum import Fig1Row, ReportRow


def _report_row(**overrides):
    values = dict(
        mu=0.0,
        lam=0.5,
        p="2",
        conjectured=0.6123724356957945,
        best_random=0.55,
        gap=-0.06,
        violation_flag=False,
        theta_opt=0.0,
        linear_entropy=0.0,
        vn_entropy=0.0,
    )
    values.update(overrides)
    return ReportRow(**values)


class TestFormatCell:
    """Unit tests for text cell rendering"""

    def test_values(self):
        assert format_cell(None) == ""
        assert format_cell(True) == "true"
        assert format_cell(1.0 / 3.0) == "0.333333333333"
        assert format_cell(7) == "7"
        assert format_cell("inf") == "inf"


class TestCsvRowRepository:
    """Unit tests for CsvRowRepository"""

    def test_header_uses_aliases(self, tmp_path):
        # Arrange
        path = tmp_path / "fig1.csv"

        # Act
        with CsvRowRepository(Fig1Row, path) as repository:
            repository.append([Fig1Row(mu=0.5, lam=1.0 / 3.0, p2_norm=0.69388866648871)])

        # Assert
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "mu,lambda,p2_norm"
        assert lines[1] == "0.5,0.333333333333,0.693888666489"

    def test_read_back(self, tmp_path):
        """Test optional empty cells come back as None"""
        # Arrange
        path = tmp_path / "report.csv"
        rows = [_report_row(), _report_row(p="inf", best_lattice=0.61)]

        # Act
        with CsvRowRepository(ReportRow, path) as repository:
            written = repository.append(rows)
            count = repository.count()
        back = CsvRowRepository(ReportRow, path).read_all()

        # Assert
        assert written == count == 2
        assert back[0].best_lattice is None
        assert back[1].best_lattice == pytest.approx(0.61)
        assert back[1].p == "inf"
        assert back[0].violation_flag is False

    def test_open_truncates(self, tmp_path):
        path = tmp_path / "fig1.csv"
        for _ in range(2):
            with CsvRowRepository(Fig1Row, path) as repository:
                repository.append([Fig1Row(mu=0.1, lam=0.2, p2_norm=0.3)])

        assert len(CsvRowRepository(Fig1Row, path).read_all()) == 1

    def test_append_requires_open(self, tmp_path):
        with pytest.raises(OSError):
            CsvRowRepository(Fig1Row, tmp_path / "closed.csv").append([])

    def test_creates_parent_directories(self, tmp_path):
        path = tmp_path / "nested" / "out" / "claims.csv"

        with CsvRowRepository(ClaimSummary, path) as repository:
            repository.append([ClaimSummary(claim="c", checked=2, agreed=2)])

        assert path.exists()


class TestJsonlRowRepository:
    """Unit tests for JsonlRowRepository"""

    def test_one_object_per_line(self, tmp_path):
        # Arrange
        path = tmp_path / "report.jsonl"

        # Act
        with JsonlRowRepository(ReportRow, path) as repository:
            repository.append([_report_row(), _report_row(mu=0.25)])

        # Assert
        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 2
        assert json.loads(lines[1])["lambda"] == 0.5
        assert [row.mu for row in JsonlRowRepository(ReportRow, path).read_all()] == [0.0, 0.25]


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
