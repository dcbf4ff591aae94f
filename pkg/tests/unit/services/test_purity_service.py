# tests/unit/services/test_purity_service.py
import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from app.core.exceptions import InvalidOrderError, NegativeEigenvalueError, ParameterRangeError
from app.numerics.linalg import eig_hermitian
from app.schemas.channel import ChannelParams
from app.schemas.purity import PurityOrder, ReducedParams, default_p_grid
from app.schemas.state import MaxEntangled
from app.services.purity_service import PurityService
from app.services.state_service import StateService

mus = st.floats(min_value=0.0, max_value=0.95)
lambdas = st.floats(min_value=0.05, max_value=0.95)
thetas = st.floats(min_value=0.0, max_value=math.pi / 2)
phis = st.floats(min_value=-math.pi, max_value=math.pi)
a_mods = st.floats(min_value=0.0, max_value=1.0)


class TestPurityFunctionals:
    """Unit tests for norms and entropies"""

    def setup_method(self):
        """Set up test dependencies"""
        self.purity_service = PurityService()
        self.mixed = np.eye(4) / 4.0
        self.pure = np.diag([1.0, 0.0, 0.0, 0.0])

    @pytest.mark.parametrize("p", ["1.5", "2", "3", "7"])
    def test_maximally_mixed_norm(self, p):
        """Test ||I/4||_p = 4^(1/p - 1)"""
        value = self.purity_service.p_norm(self.mixed, p)

        assert value == pytest.approx(4.0 ** (1.0 / float(p) - 1.0), abs=1e-14)

    def test_maximally_mixed_infinity_norm(self):
        assert self.purity_service.p_norm(self.mixed, "inf") == pytest.approx(0.25)

    @pytest.mark.parametrize("order", ["1.1", "2", "5", "inf", "entropy"])
    def test_maximally_mixed_entropy_is_ln4(self, order):
        """Test every Renyi entropy of I/4 is ln 4"""
        assert self.purity_service.renyi_entropy(self.mixed, order) == pytest.approx(math.log(4.0), abs=1e-12)

    def test_pure_state_values(self):
        """Test a pure output has norm 1 and zero entropy"""
        assert self.purity_service.p_norm(self.pure, 3) == pytest.approx(1.0)
        assert self.purity_service.renyi_entropy(self.pure, "entropy") == pytest.approx(0.0, abs=1e-15)

    def test_entropy_order_has_no_norm(self):
        """Test the von Neumann limit is rejected by p_norm"""
        with pytest.raises(InvalidOrderError):
            self.purity_service.p_norm(self.mixed, PurityOrder.entropy())

    def test_order_below_one_rejected(self):
        with pytest.raises(InvalidOrderError):
            self.purity_service.p_norm(self.mixed, "0.5")

    def test_clip(self):
        """Test tiny negatives are clipped and large ones raise"""
        # Act
        clipped = self.purity_service.clip(np.array([0.5, 0.5, 0.0, -1e-12]))

        # Assert
        assert clipped[-1] == 0.0
        with pytest.raises(NegativeEigenvalueError):
            self.purity_service.clip(np.array([1.0, -1e-6]))

    def test_purity_score_orders_entropy_by_negation(self):
        """Test the entropy score is -S_1 so larger is purer"""
        values = np.array([[0.7, 0.1, 0.1, 0.1], [0.25, 0.25, 0.25, 0.25]])

        scores = self.purity_service.purity_score(values, "entropy")

        assert scores[0] > scores[1]
        assert scores[1] == pytest.approx(-math.log(4.0))

    @given(st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=4, max_size=4))
    def test_renyi_entropy_strictly_decreasing_in_p(self, weights):
        """Test S_p falls strictly along the order grid for a non-flat spectrum"""
        # Arrange
        values = np.array(weights) / sum(weights)
        assume(values.max() - values.min() >= 0.05)
        rho = np.diag(values)

        # Act
        entropies = [
            PurityService().renyi_entropy(rho, label)
            for label in ("entropy", "1.1", "1.5", "2", "3", "5", "inf")
        ]

        # Assert
        assert all(low_p > high_p for low_p, high_p in zip(entropies, entropies[1:]))

    @given(st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=4, max_size=4), st.integers(0, 2**32 - 1))
    def test_renyi_entropy_continuous_at_one(self, weights, seed):
        """Test |S_1.001 - S_1| < 1e-2 for rotated random spectra"""
        # Arrange
        u = StateService().random_unitary(np.random.default_rng(seed), 4)
        rho = u @ np.diag(np.array(weights) / sum(weights)) @ u.conj().T
        purity_service = PurityService()

        # Act
        near = purity_service.renyi_entropy(rho, "1.001")
        limit = purity_service.renyi_entropy(rho, "entropy")

        # Assert
        assert abs(near - limit) < 1e-2


def _random_density(rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


class TestConvexity:
    """Unit tests for the p-norm along mixtures of inputs"""

    @given(
        mus,
        lambdas,
        st.floats(min_value=0.0, max_value=1.0),
        st.sampled_from(["1.5", "2", "3", "inf"]),
        st.integers(0, 2**32 - 1),
    )
    def test_mixture_never_beats_endpoints(self, mu, lam, t, order, seed):
        """Test ||Phi(t rho1 + (1-t) rho2)||_p <= max of the endpoint norms"""
        # Arrange
        rng = np.random.default_rng(seed)
        rho1, rho2 = _random_density(rng), _random_density(rng)
        purity_service = PurityService()
        params = ChannelParams(mu=mu, lam=lam, beta=MaxEntangled(u=StateService().random_unitary(rng)))

        # Act
        mixed = purity_service.p_norm(purity_service.channels.apply_channel(params, t * rho1 + (1.0 - t) * rho2), order)
        ends = [purity_service.p_norm(purity_service.channels.apply_channel(params, rho), order) for rho in (rho1, rho2)]

        # Assert
        assert mixed <= max(ends) + 1e-9


class TestReducedForm:
    """Unit tests for the reduced output form and Delta"""

    def setup_method(self):
        """Set up test dependencies"""
        self.purity_service = PurityService()
        self.rng = np.random.default_rng(17)

    def test_reduced_form_matches_channel_output(self):
        """Test spectra of the reduced form agree with the direct channel output"""
        for _ in range(20):
            # Arrange
            mu, lam = float(self.rng.uniform(0.0, 0.9)), float(self.rng.uniform(0.05, 0.95))
            psi = self.purity_service.states.random_pure(self.rng)
            beta = MaxEntangled(u=self.purity_service.states.random_unitary(self.rng))

            # Act
            rp = self.purity_service.reduced_params_for(psi, beta)
            reduced = eig_hermitian(self.purity_service.reduced_output(mu, lam, rp).m)
            direct = self.purity_service.output_spectrum(ChannelParams(mu=mu, lam=lam, beta=beta), psi)

            # Assert
            assert np.allclose(reduced.as_array(), direct.as_array(), atol=1e-9)

    @given(mus, lambdas, thetas, phis, a_mods)
    def test_decoupled_eigenvalue_present(self, mu, lam, theta, phi, a_mod):
        """Test (1 - mu)(1 - lambda^2)/4 is always an output eigenvalue"""
        # Arrange
        service = PurityService()
        rp = ReducedParams(theta=theta, phi=phi, a_mod=a_mod)

        # Act
        values = eig_hermitian(service.reduced_output_matrix(mu, lam, rp)).as_array()

        # Assert
        assert np.min(np.abs(values - service.decoupled_eigenvalue(mu, lam))) <= 1e-12

    @given(mus, lambdas, thetas, phis, a_mods)
    def test_char_poly_roots_match_eigensolver(self, mu, lam, theta, phi, a_mod):
        """Test R(x) = det(Delta - x I) through its roots"""
        # Arrange
        service = PurityService()
        rp = ReducedParams(theta=theta, phi=phi, a_mod=a_mod)
        expected = eig_hermitian(service.delta_matrix(mu, lam, rp)).as_array()
        polynomial = service.char_poly_delta(mu, lam, rp)
        scale = (2.0 + 4.0 * mu / (1.0 - mu)) ** 3

        # Act & Assert: the polynomial vanishes on the eigensolver values
        for x in expected:
            assert abs(polynomial.evaluate(x)) <= 1e-10 * scale

    def test_delta_roots_distinct_case(self):
        """Test the trigonometric roots on a point with well-separated eigenvalues"""
        rp = ReducedParams(theta=0.7, phi=0.4, a_mod=0.6)

        roots = self.purity_service.delta_roots(0.3, 0.5, rp)

        expected = eig_hermitian(self.purity_service.delta_matrix(0.3, 0.5, rp)).as_array()
        assert np.allclose(roots, expected, atol=1e-8)

    @given(mus, lambdas, thetas, phis, a_mods)
    def test_two_norm_closed_form(self, mu, lam, theta, phi, a_mod):
        """Test Tr(output^2) against the sum of squared eigenvalues"""
        # Arrange
        service = PurityService()
        rp = ReducedParams(theta=theta, phi=phi, a_mod=a_mod)

        # Act
        closed = service.two_norm_squared_closed_form(mu, lam, rp)

        # Assert
        values = eig_hermitian(service.reduced_output_matrix(mu, lam, rp)).as_array()
        assert closed == pytest.approx(float(np.sum(values ** 2)), abs=1e-12)

    def test_batch_spectra_match_single(self):
        """Test the vectorized reduced spectra"""
        theta = np.array([0.1, 0.8, 1.5])
        phi = np.array([0.0, 1.0, 2.0])
        a_mod = np.array([1.0, 0.4, 0.0])

        batch = self.purity_service.reduced_spectra_batch(0.35, 0.6, theta, phi, a_mod)

        for k in range(3):
            rp = ReducedParams(theta=theta[k], phi=phi[k], a_mod=a_mod[k])
            single = eig_hermitian(self.purity_service.reduced_output_matrix(0.35, 0.6, rp)).as_array()
            assert np.allclose(batch[k], single, atol=1e-12)

    def test_reduced_range(self):
        """Test mu = 1 and lambda outside (0, 1) are rejected"""
        rp = ReducedParams(theta=0.5, phi=0.0, a_mod=1.0)

        with pytest.raises(ParameterRangeError):
            self.purity_service.reduced_output(1.0, 0.5, rp)
        with pytest.raises(ParameterRangeError):
            self.purity_service.delta_matrix(0.5, 1.0, rp)

    def test_default_grid_has_infinity(self):
        labels = [order.label for order in default_p_grid()]

        assert labels == ["1.1", "1.5", "2", "3", "5", "inf"]


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
