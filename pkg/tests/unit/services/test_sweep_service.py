# tests/unit/services/test_sweep_service.py
import math

import pytest
from pydantic import ValidationError

from app.repositories.csv_repository import CsvRowRepository
from app.schemas.optimum import Fig1Row, OptimizerBudget, ReportRow, SweepMode, SweepSpec
from app.schemas.purity import PurityOrder
from app.services.sweep_service import SweepService, get_sweep_service, row_model_for

SMALL_BUDGET = OptimizerBudget(random_states=20, theta_points=7, phi_points=5, a_points=7)


def _orders(*labels):
    return [PurityOrder.parse(label) for label in labels]


class TestCells:
    """Unit tests for cell generation"""

    def setup_method(self):
        """Set up test dependencies"""
        self.sweep_service = SweepService()

    def test_grid_product_order(self):
        """Test grids expand mu-major"""
        spec = SweepSpec(mode=SweepMode.FIG1, mu_grid=[0.0, 0.5], lambda_grid=[0.2, 0.4])

        points = self.sweep_service.cell_points(spec)

        assert points == [(0.0, 0.2), (0.0, 0.4), (0.5, 0.2), (0.5, 0.4)]

    def test_explicit_points(self):
        spec = SweepSpec(mode=SweepMode.FIG1, points=[(0.5, 1.0 / 3.0), (0.25, 0.5)])

        assert self.sweep_service.cell_points(spec) == [(0.5, 1.0 / 3.0), (0.25, 0.5)]

    def test_random_cells_pin_mu(self):
        """Test a single-entry grid pins that coordinate of every random cell"""
        # Arrange
        spec = SweepSpec(cells=5, mu_grid=[0.0], seed=4)

        # Act
        points = self.sweep_service.cell_points(spec)

        # Assert
        assert len(points) == 5
        assert all(mu == 0.0 for mu, _ in points)
        assert all(0.0 <= lam <= 1.0 for _, lam in points)
        assert points == self.sweep_service.cell_points(spec)

    def test_points_exclude_grids(self):
        with pytest.raises(ValidationError):
            SweepSpec(mode=SweepMode.FIG1, points=[(0.5, 0.5)], mu_grid=[0.1])

    def test_missing_grids_rejected(self):
        with pytest.raises(ValidationError):
            SweepSpec(mode=SweepMode.FIG1, mu_grid=[0.1])

    def test_grid_value_outside_unit_interval(self):
        with pytest.raises(ValidationError):
            SweepSpec(mode=SweepMode.FIG1, mu_grid=[1.2], lambda_grid=[0.5])


class TestFigureRows:
    """Unit tests for the figure sweeps"""

    def setup_method(self):
        """Set up test dependencies"""
        self.sweep_service = get_sweep_service()

    def test_fig1_value(self):
        """Test the optimal 2-norm at mu = 1/2, lambda = 1/3 is sqrt(39)/9"""
        spec = SweepSpec(mode=SweepMode.FIG1, points=[(0.5, 1.0 / 3.0)])

        rows = self.sweep_service.collect(spec, workers=1)

        assert len(rows) == 1
        assert isinstance(rows[0], Fig1Row)
        assert rows[0].p2_norm == pytest.approx(math.sqrt(39.0) / 9.0, abs=1e-12)

    def test_fig2_entanglement_above_threshold(self):
        """Test the witness is maximally entangled above mu_c"""
        # Arrange
        spec = SweepSpec(mode=SweepMode.FIG2, points=[(0.5, 1.0 / 3.0), (0.0, 0.5)])

        # Act
        above, trivial = self.sweep_service.collect(spec, workers=1)

        # Assert
        assert above.mu_c == pytest.approx(8 / 17)
        assert above.theta_opt == pytest.approx(math.pi / 2)
        assert above.linear_entropy == pytest.approx(1.0, abs=1e-12)
        assert trivial.theta_opt == 0.0
        assert trivial.vn_entropy == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("lam", [0.2, 0.5, 0.8])
    def test_fig2_entanglement_increases_below_threshold(self, lam):
        """Test grid-adjacent entanglement rises strictly on (0, mu_c) and stays maximal above"""
        # Arrange
        spec = SweepSpec(mode=SweepMode.FIG2, mu_grid=[k / 40 for k in range(41)], lambda_grid=[lam])

        # Act
        rows = self.sweep_service.collect(spec, workers=1)

        # Assert
        below = [row for row in rows if 0.0 < row.mu < row.mu_c]
        above = [row for row in rows if row.mu >= row.mu_c]
        assert len(below) >= 3
        for kind in ("linear_entropy", "vn_entropy"):
            values = [getattr(row, kind) for row in below]
            assert all(later > earlier for earlier, later in zip(values, values[1:]))
        assert all(row.linear_entropy == pytest.approx(1.0, abs=1e-12) for row in above)
        assert all(row.theta_opt == math.pi / 2 for row in above)

    def test_fig3_rows(self):
        """Test row sources per order and the ln 4 bound"""
        # Arrange
        spec = SweepSpec(
            mode=SweepMode.FIG3, points=[(0.25, 0.5)], p_grid=_orders("entropy", "2", "inf"), trials=30, seed=1
        )

        # Act
        rows = self.sweep_service.collect(spec, workers=1)

        # Assert
        assert len(rows) == 3 * (30 + 2)
        assert {row.p for row in rows} == {1.0, 2.0, math.inf}
        for p in (1.0, 2.0, math.inf):
            at_p = [row for row in rows if row.p == p]
            bound = [row.s_p for row in at_p if row.source == "bound"]
            conjectured = [row.s_p for row in at_p if row.source == "conjectured"]
            randoms = [row.s_p for row in at_p if row.source == "random"]
            assert bound == [pytest.approx(math.log(4.0))]
            assert len(conjectured) == 1
            assert min(randoms) >= conjectured[0] - 1e-9
            assert max(randoms) <= math.log(4.0) + 1e-12

    def test_rows_independent_of_workers(self):
        """Test per-cell substreams make rows identical for any worker count"""
        spec = SweepSpec(
            mode=SweepMode.FIG3,
            mu_grid=[0.1, 0.6],
            lambda_grid=[0.3, 0.8],
            p_grid=_orders("2"),
            trials=5,
            seed=8,
        )

        serial = self.sweep_service.collect(spec, workers=1)
        parallel = self.sweep_service.collect(spec, workers=2)

        assert [row.model_dump() for row in serial] == [row.model_dump() for row in parallel]


class TestConjectureReport:
    """Unit tests for the conjecture report rows"""

    def setup_method(self):
        """Set up test dependencies"""
        self.sweep_service = SweepService()

    def test_product_regime_has_no_gap(self):
        """Test nothing beats the product optimum at mu = 0"""
        # Arrange
        spec = SweepSpec(cells=2, mu_grid=[0.0], trials=20, seed=3, budget=SMALL_BUDGET)

        # Act
        rows = self.sweep_service.collect(spec, workers=1)

        # Assert
        assert len(rows) == 2 * 6
        assert all(isinstance(row, ReportRow) for row in rows)
        assert max(row.gap for row in rows) <= 1e-9
        assert not any(row.violation_flag for row in rows)
        assert all(row.violating_state == "" for row in rows)

    def test_sweep_writes_rows(self, tmp_path):
        """Test streamed rows land in the repository and read back"""
        # Arrange
        spec = SweepSpec(cells=1, mu_grid=[0.0], lambda_grid=[0.5], trials=10, lattice=False, seed=2)
        path = tmp_path / "report.csv"

        # Act
        with CsvRowRepository(row_model_for(SweepMode.REPORT), path) as repository:
            result = self.sweep_service.sweep(spec, repository, workers=1)
        rows = CsvRowRepository(ReportRow, path).read_all()

        # Assert
        assert result.cells == 1
        assert result.rows == len(rows) == 6
        assert result.violations == 0
        assert result.io_errors == 0
        assert result.path == str(path)
        assert [row.p for row in rows] == ["1.1", "1.5", "2", "3", "5", "inf"]
        assert all(row.best_lattice is None for row in rows)

    def test_write_failures_are_counted(self, tmp_path):
        """Test an OSError on append is counted and the sweep continues"""

        class FailingRepository(CsvRowRepository):
            def append(self, rows):
                raise OSError("disk full")

        spec = SweepSpec(mode=SweepMode.FIG1, mu_grid=[0.1, 0.2], lambda_grid=[0.5])

        with FailingRepository(Fig1Row, tmp_path / "fig1.csv") as repository:
            result = self.sweep_service.sweep(spec, repository, workers=1)

        assert result.cells == 2
        assert result.rows == 0
        assert result.io_errors == 2


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
