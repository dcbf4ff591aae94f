# tests/unit/services/test_perturbation_service.py
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from pydantic import ValidationError

from app.core.exceptions import PreconditionError
from app.schemas.analysis import PerturbationDirection, PerturbationGrid
from app.schemas.purity import PurityOrder, ReducedParams
from app.services.perturbation_service import (
    CLAIM_C_PHI,
    CLAIMS,
    PerturbationService,
    get_perturbation_service,
    measured_power_change,
)

ORDERS = [PurityOrder.parse(label) for label in ("1.5", "2", "3", "inf")]


class TestComparisonLemmas:
    """Unit tests for the divided-difference identities and lemma shifts"""

    def setup_method(self):
        """Set up test dependencies"""
        self.perturbation_service = PerturbationService()

    def test_identity_sums_vanish(self):
        """Test sum 1/g_k = sum r_k/g_k = 0 on (3, 2, 1)"""
        first, second = self.perturbation_service.identity_check_sums((3.0, 2.0, 1.0))

        assert first == pytest.approx(0.0, abs=1e-15)
        assert second == pytest.approx(0.0, abs=1e-15)

    @given(
        st.floats(min_value=-2.0, max_value=2.0),
        st.floats(min_value=0.05, max_value=2.0),
        st.floats(min_value=0.05, max_value=2.0),
    )
    def test_identity_sums_vanish_for_any_distinct_roots(self, r1, gap1, gap2):
        # Arrange
        roots = (r1, r1 - gap1, r1 - gap1 - gap2)

        # Act
        first, second = PerturbationService().identity_check_sums(roots)

        # Assert
        assert abs(first) <= 1e-9 * (1.0 / gap1 ** 2 + 1.0 / gap2 ** 2)
        assert abs(second) <= 1e-9 * (1.0 + abs(r1)) * (1.0 / gap1 ** 2 + 1.0 / gap2 ** 2)

    def test_identity_rejects_unsorted(self):
        with pytest.raises(PreconditionError):
            self.perturbation_service.identity_check_sums((1.0, 2.0, 3.0))

    def test_root_shift_first_order(self):
        """Test s_1 = 3 + (3 d1 + d2)/g_1 = 3.002 at d1 = d2 = 1e-3"""
        # Act
        prediction = self.perturbation_service.root_shift_predict((3.0, 2.0, 1.0), 1e-3, 1e-3)

        # Assert
        assert prediction.predicted[0] == pytest.approx(3.002, abs=1e-12)
        assert prediction.reliable is False
        assert prediction.error <= 1e-5
        assert sum(prediction.actual) == pytest.approx(6.0, abs=1e-9)

    def test_prediction_error_is_second_order(self):
        """Test the first-order error shrinks like eps^2"""
        slope = self.perturbation_service.shift_error_slope((3.0, 2.0, 1.0))

        assert slope == pytest.approx(2.0, abs=0.2)

    def test_lemma_p_golden_shifts(self):
        """Test w - v = (1.5, -2, 0.5) eps on (3, 2, 1)"""
        # Arrange
        eps = 1e-4

        # Act
        result = self.perturbation_service.lemma_p_shift((3.0, 2.0, 1.0), eps, ORDERS)

        # Assert
        assert result.shifts == pytest.approx((1.5 * eps, -2.0 * eps, 0.5 * eps), abs=1e-18)
        assert result.sum_change == pytest.approx(0.0, abs=1e-18)
        assert result.failures == []
        assert all(order.claimed_sign == 1 for order in result.orders)
        assert all(order.agrees for order in result.orders)

    def test_lemma_q_signs(self):
        """Test w - v = (0.5, -1, 0.5) eps: p = 3 up, p = 3/2 down, p = 2 unclaimed"""
        # Arrange
        eps = 1e-4

        # Act
        result = self.perturbation_service.lemma_q_shift((3.0, 2.0, 1.0), eps, ORDERS)

        # Assert
        by_order = {order.order: order for order in result.orders}
        assert result.shifts == pytest.approx((0.5 * eps, -eps, 0.5 * eps), abs=1e-18)
        assert by_order["3"].claimed_sign == 1
        assert by_order["1.5"].claimed_sign == -1
        assert by_order["2"].claimed_sign is None
        assert by_order["inf"].claimed_sign is None
        assert by_order["3"].agrees and by_order["1.5"].agrees
        assert result.failures == []

    @pytest.mark.parametrize(
        "v,eps",
        [
            ((1.0, 2.0, 3.0), 1e-6),
            ((3.0, 2.0, 0.0), 1e-6),
            ((3.0, 2.0, 1.0), 0.0),
            ((3.0, 2.0, 1.0), 1e-2),
        ],
    )
    def test_lemma_preconditions(self, v, eps):
        """Test unsorted, non-positive and oversized inputs are rejected"""
        with pytest.raises(PreconditionError):
            self.perturbation_service.lemma_p_shift(v, eps, ORDERS)

    def test_measured_power_change_small_shift(self):
        """Test the cancellation-free difference against direct evaluation"""
        v = np.array([0.5, 0.3, 0.2])
        shifts = np.array([1e-3, -5e-4, -5e-4])

        change = measured_power_change(v, shifts, 3.0)

        assert change == pytest.approx(float(np.sum((v + shifts) ** 3) - np.sum(v ** 3)), rel=1e-9)


class TestParameterShifts:
    """Unit tests for shifts of c_phi and |a|^2"""

    def setup_method(self):
        """Set up test dependencies"""
        self.perturbation_service = get_perturbation_service()
        self.rp = ReducedParams(theta=1.0, phi=0.5, a_mod=0.7)

    @pytest.mark.parametrize("direction", list(PerturbationDirection))
    def test_predicted_shifts_match_measured(self, direction):
        """Test first-order eigenvalue shifts at a well-separated point"""
        # Act
        report = self.perturbation_service.perturb_point(0.2, 0.5, self.rp, direction, 1e-6, ORDERS)

        # Assert
        assert not report.degenerate
        assert report.reliable
        assert report.shift_error <= 1e-9
        assert report.eps == 1e-6
        assert report.mu_c == pytest.approx(0.75 / 1.75)

    @pytest.mark.parametrize("direction", list(PerturbationDirection))
    def test_shift_error_is_second_order(self, direction):
        """Test the Delta-shift error falls by a factor of 100 per decade of eps"""
        slope = self.perturbation_service.point_shift_slope(0.2, 0.5, self.rp, direction)

        assert slope is not None
        assert 1.95 <= slope <= 2.05

    def test_shift_error_slope_skips_degenerate_point(self):
        """Test a repeated Delta eigenvalue gives no slope"""
        rp = ReducedParams(theta=math.pi / 2, phi=0.0, a_mod=1.0)

        slope = self.perturbation_service.point_shift_slope(0.4, 0.5, rp, PerturbationDirection.A2)

        assert slope is None

    @pytest.mark.parametrize("direction", list(PerturbationDirection))
    def test_proven_claims_agree(self, direction):
        """Test every resolved claimed sign matches the measured one"""
        report = self.perturbation_service.perturb_point(0.2, 0.5, self.rp, direction, 1e-6, ORDERS)

        claimed = [order for order in report.orders if order.claim is not None]

        assert claimed
        assert all(order.agrees is not False for order in claimed)

    def test_step_flips_at_upper_edge(self):
        """Test c_phi = 1 steps down and flips the claimed sign"""
        # Arrange
        rp = ReducedParams(theta=1.0, phi=0.0, a_mod=0.7)

        # Act
        report = self.perturbation_service.perturb_point(
            0.2, 0.5, rp, PerturbationDirection.C_PHI, 1e-6, ORDERS
        )

        # Assert
        assert report.eps == -1e-6
        c_phi_claims = [order for order in report.orders if order.claim == CLAIM_C_PHI]
        assert c_phi_claims
        assert all(order.claimed_sign == -1 for order in c_phi_claims)

    def test_scan_and_summary(self):
        """Test two reports per grid point and claim counts"""
        # Arrange
        grid = PerturbationGrid(
            mu=[0.1, 0.3],
            lam=[0.5],
            theta=[0.6, 1.2],
            phi=[0.4],
            a_mod=[0.8],
            eps=1e-6,
            orders=ORDERS,
        )

        # Act
        reports = self.perturbation_service.perturb_eigen_scan(grid, workers=1)
        summaries = self.perturbation_service.summarize_claims(reports)

        # Assert
        assert len(reports) == 2 * grid.size()
        assert [report.index for report in reports[:4]] == [0, 0, 1, 1]
        assert [summary.claim for summary in summaries] == list(CLAIMS)
        assert all(summary.passed for summary in summaries)
        assert sum(summary.checked for summary in summaries) > 0

    def test_grid_rejects_entropy_order(self):
        with pytest.raises(ValidationError):
            PerturbationGrid(
                mu=[0.1], lam=[0.5], theta=[0.6], a_mod=[0.8], orders=[PurityOrder.entropy()]
            )

    def test_mean_value_points_lie_between_eigenvalues(self):
        """Test the mean-value points sit inside their intervals"""
        v = (0.6, 0.3, 0.1)

        diagnostics = self.perturbation_service.mean_value_diagnostics(v, 3.0, 0.75)

        a1, _, a3 = diagnostics.v_acute
        assert 0.3 < a1 < 0.6
        assert 0.1 < a3 < 0.3
        assert math.isfinite(diagnostics.acute_grave_gap)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
