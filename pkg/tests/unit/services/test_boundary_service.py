# tests/unit/services/test_boundary_service.py
import math

import pytest
from hypothesis import given, strategies as st

from app.core.exceptions import InvalidOrderError
from app.schemas.analysis import BoundarySide
from app.schemas.purity import PurityOrder, default_p_grid
from app.services.boundary_service import BoundaryService, get_boundary_service

mus = st.floats(min_value=0.0, max_value=0.9)
lambdas = st.floats(min_value=0.05, max_value=0.95)
thetas = st.floats(min_value=0.0, max_value=math.pi / 2)


class TestBoundaryColumns:
    """Unit tests for the |a| = 0 and |a| = 1 columns"""

    def setup_method(self):
        """Set up test dependencies"""
        self.boundary_service = BoundaryService()

    @given(mus, lambdas, thetas, st.sampled_from(list(BoundarySide)))
    def test_closed_form_matches_eigensolver(self, mu, lam, theta, side):
        """Test both tabulated columns against the Jacobi eigenvalues"""
        column = BoundaryService().boundary_eigenvalues(mu, lam, theta, side)

        assert column.deviation <= 1e-10

    def test_middle_row_values(self):
        """Test the middle rows 1 - lambda^2 + M and 1 - lambda^2"""
        # Arrange
        mu, lam = 0.2, 0.5
        M = 4 * mu / (1 - mu)

        # Act
        a0 = self.boundary_service.boundary_eigenvalues(mu, lam, 0.7, BoundarySide.A0)
        a1 = self.boundary_service.boundary_eigenvalues(mu, lam, 0.7, BoundarySide.A1)

        # Assert
        assert a0.middle == pytest.approx(1 - lam * lam + M)
        assert a1.middle == pytest.approx(1 - lam * lam)
        assert a0.closed_form == (a0.upper, a0.middle, a0.lower)

    @pytest.mark.parametrize("mu", [0.0, 0.2, 0.5, 0.8])
    @pytest.mark.parametrize("lam", [0.2, 0.5, 0.8])
    def test_arrows_hold_row_wise(self, mu, lam):
        """Test upper and lower rows rise and the middle row falls from |a| = 0 to 1"""
        for theta in (0.0, 0.4, 0.9, 1.3, math.pi / 2):
            arrows = self.boundary_service.arrow_check(mu, lam, theta)

            assert all(arrows.values()), (theta, arrows)


class TestEntangledColumn:
    """Unit tests for sin(theta) = 1"""

    def setup_method(self):
        """Set up test dependencies"""
        self.boundary_service = get_boundary_service()

    @pytest.mark.parametrize("a_mod", [0.0, 0.3, 0.7, 1.0])
    def test_entangled_matrix_closed_form(self, a_mod):
        check = self.boundary_service.entangled_matrix_check(0.3, 0.6, a_mod)

        assert check.deviation <= 1e-10
        assert any(value == pytest.approx(1 - 0.36) for value in check.closed_form)

    def test_norms_maximal_at_unit_a(self):
        """Test every norm of the default grid peaks at |a| = 1"""
        # Act
        scan = self.boundary_service.entangled_norm_scan(0.3, 0.5, default_p_grid(), points=21)

        # Assert
        assert scan.maximal_at_one
        assert scan.top_increasing
        assert len(scan.a_values) == 21
        assert set(scan.norms) == {"1.1", "1.5", "2", "3", "5", "inf"}

    def test_norm_scan_rejects_entropy(self):
        with pytest.raises(InvalidOrderError):
            self.boundary_service.entangled_norm_scan(0.3, 0.5, [PurityOrder.entropy()])

    def test_monotonicity_scan_shape(self):
        """Test the intermediate scan covers |a|^2 from 0 to 1 and ends higher"""
        scan = self.boundary_service.scan_a_monotonicity(0.4, 0.5, 1.0, points=11)

        assert scan.a2_values[0] == 0.0 and scan.a2_values[-1] == 1.0
        assert len(scan.top_values) == 11
        assert scan.endpoint_increase


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
