# app/services/optimization_service.py
"""
Service for optimal output purity of the correlated channel.

Key Responsibilities:
- Threshold mu_c = (1 - lambda^2)/(2 - lambda^2) and the inner threshold
- Optimal Schmidt angle and closed-form optimal output spectrum at p = 2
- Conjectured optimum at any order (same input family as p = 2)
- Derivative-free numeric optimizer: Haar restarts, reduced lattice,
  compass pattern search
- Input witnesses for reduced variables and the optimal-family check
"""
import math
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from app.core.exceptions import ParameterRangeError
from app.core.logging_config import get_logger
from app.numerics.linalg import spectra_batch
from app.schemas.channel import ChannelParams
from app.schemas.optimum import (
    OptimizerBudget,
    Optimum,
    OptimumReport,
    Regime,
    WitnessFamilySpectra,
)
from app.schemas.purity import PurityOrder, ReducedParams
from app.schemas.spectrum import Spectrum
from app.schemas.state import EntanglementKind, MaxEntangled, PureState4
from app.services.purity_service import OrderLike, PurityService
from app.services.state_service import StateService

logger = get_logger(__name__)

Number = Union[float, Fraction]
HALF_PI = math.pi / 2


def _threshold(lam: Number) -> Number:
    return (1 - lam * lam) / (2 - lam * lam)


def _check_unit(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise ParameterRangeError(name, value, "[0, 1]")


def witness_batch(theta: np.ndarray, phi: np.ndarray, a_mod: np.ndarray) -> np.ndarray:
    """
    Amplitudes of (I x W^dagger)|psi_theta>, W = [[a, b], [-b, conj(a)]],
    a = |a| e^{i phi/2}, b = sqrt(1 - |a|^2); shape (..., 4).
    """
    theta, phi, a_mod = np.broadcast_arrays(
        np.asarray(theta, dtype=float), np.asarray(phi, dtype=float), np.asarray(a_mod, dtype=float)
    )
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    a = a_mod * np.exp(0.5j * phi)
    b = np.sqrt(np.clip(1.0 - a_mod * a_mod, 0.0, None))
    return np.stack([c * np.conj(a), c * b, -s * b, s * a], axis=-1).astype(complex)


class OptimizationService:
    """
    Service for optimal output purity of the correlated channel.

    Below mu_c the p = 2 optimum is the partially entangled state with
    sin(theta) = mu/((1 - mu)(1 - lambda^2)); at and above mu_c it is the
    shift state |beta_0> itself. The conjectured optimum at other orders
    evaluates the same input.
    """

    def __init__(self):
        self.purity = PurityService()
        self.states = StateService()

    # === Thresholds ===

    def mu_critical(self, lam: Number) -> Number:
        """
        mu_c = (1 - lambda^2)/(2 - lambda^2); exact for Fraction input.

        Raises:
            ParameterRangeError: If lambda is not in (0, 1)
        """
        if not (0 < lam < 1):
            raise ParameterRangeError("lambda", lam, "(0, 1)")
        return _threshold(lam)

    def mu_inner(self, lam: Number) -> Number:
        """(1 - lambda^2)/(3 - lambda^2), the lower edge of the proven c_phi region"""
        if not (0 < lam < 1):
            raise ParameterRangeError("lambda", lam, "(0, 1)")
        return (1 - lam * lam) / (3 - lam * lam)

    def regime(self, mu: float, lam: float) -> Regime:
        _check_unit("mu", mu)
        _check_unit("lambda", lam)
        if mu in (0.0, 1.0) or lam in (0.0, 1.0):
            return Regime.TRIVIAL
        return Regime.BELOW_THRESHOLD if mu < _threshold(lam) else Regime.AT_OR_ABOVE

    def theta_optimal(self, mu: float, lam: float) -> float:
        """
        Optimal Schmidt angle at p = 2.

        Returns 0 at mu = 0, pi/2 for mu >= mu_c (including mu = 1 and
        lambda = 1), otherwise arcsin(mu/((1 - mu)(1 - lambda^2))).
        """
        _check_unit("mu", mu)
        _check_unit("lambda", lam)
        if mu == 0.0:
            return 0.0
        if mu == 1.0 or lam == 1.0 or mu >= _threshold(lam):
            return HALF_PI
        return math.asin(min(1.0, mu / ((1.0 - mu) * (1.0 - lam * lam))))

    # === Analytic optimum ===

    def optimal_spectrum(self, mu: float, lam: float) -> Spectrum:
        """
        Output spectrum of the p = 2 optimal input.

        Below mu_c: (1-mu)(1+lam^2)/4 + mu/2 +- sqrt(mu^2/(1-lam^2) + (1-mu)^2 lam^2)/2
        and (1-mu)(1-lam^2)/4 twice. At or above: (1-mu)(1+3 lam^2)/4 + mu and
        (1-mu)(1-lam^2)/4 three times.
        """
        _check_unit("mu", mu)
        _check_unit("lambda", lam)
        floor = (1.0 - mu) * (1.0 - lam * lam) / 4.0
        if mu >= _threshold(lam):
            top = (1.0 - mu) * (1.0 + 3.0 * lam * lam) / 4.0 + mu
            return Spectrum.from_values([top, floor, floor, floor])
        centre = (1.0 - mu) * (1.0 + lam * lam) / 4.0 + mu / 2.0
        radius = 0.5 * math.sqrt(mu * mu / (1.0 - lam * lam) + (1.0 - mu) ** 2 * lam * lam)
        return Spectrum.from_values([centre + radius, centre - radius, floor, floor])

    def _analytic(self, mu: float, lam: float, order: PurityOrder, method: str) -> Optimum:
        theta = self.theta_optimal(mu, lam)
        spectrum = self.optimal_spectrum(mu, lam)
        regime = self.regime(mu, lam)
        value = float(self.purity.order_value(spectrum.as_array(), order))
        mu_c = _threshold(lam) if 0.0 < lam < 1.0 else None
        return Optimum(
            value=value,
            theta_opt=theta,
            regime=regime,
            witness=self.states.canonical_state(theta),
            order=order,
            mu=mu,
            lam=lam,
            mu_c=mu_c,
            spectrum=spectrum,
            method=method,
            reduced=ReducedParams(theta=theta, phi=0.0, a_mod=1.0),
            evaluations=1,
        )

    def two_norm_optimum(self, mu: float, lam: float) -> Optimum:
        """
        Exact maximal output 2-norm.

        The witness is the canonical member |psi_theta_opt> of the optimal
        family; its output under beta_0 has the optimal_spectrum.
        """
        optimum = self._analytic(mu, lam, PurityOrder.finite(2.0), "analytic")
        logger.info(
            "Two-norm optimum computed",
            extra={
                "extra_fields": {
                    "operation": "two_norm_optimum",
                    "mu": mu,
                    "lambda": lam,
                    "regime": optimum.regime.value,
                    "value": optimum.value,
                    "status": "success",
                }
            },
        )
        return optimum

    def conjectured_optimum(self, mu: float, lam: float, order: OrderLike) -> Optimum:
        """p = 2 optimal input evaluated at order p; proven for p = 2 and p = inf"""
        order = PurityOrder.parse(order)
        return self._analytic(mu, lam, order, "conjectured")

    def maximally_entangled_gap(self, mu: float, lam: float, order: OrderLike) -> float:
        """
        nu_p of the optimal-family witness minus nu_p of the beta_0 input.

        Positive for mu < mu_c and 1 < p <= 2: no maximally entangled input
        attains the optimum there. Zero at and above mu_c.

        Raises:
            InvalidOrderError: If the order is the entropy limit
        """
        order = PurityOrder.parse(order)
        params = ChannelParams(mu=mu, lam=lam)
        optimum = self.conjectured_optimum(mu, lam, order)
        witness = self.purity.output_spectrum(params, optimum.witness)
        entangled = self.purity.output_spectrum(params, MaxEntangled.beta0().state())
        return float(
            self.purity.norm_of_values(witness.as_array(), order)
            - self.purity.norm_of_values(entangled.as_array(), order)
        )

    # === Witnesses ===

    def witness_for(self, theta: float, phi: float, a_mod: float) -> PureState4:
        """Input whose output under beta_0 has the reduced-form spectrum of (theta, phi, |a|)"""
        return PureState4(amplitudes=witness_batch(theta, phi, a_mod))

    def witness_family_spectra(
        self, mu: float, lam: float, v: np.ndarray, theta: Optional[float] = None
    ) -> WitnessFamilySpectra:
        """
        Output spectra of (V^T x V^dagger)|psi_theta> and (V^T x V)|psi_theta>
        beside the canonical |psi_theta>, theta defaulting to theta_opt.
        """
        theta = self.theta_optimal(mu, lam) if theta is None else theta
        params = ChannelParams(mu=mu, lam=lam)
        base = self.states.canonical_state(theta)
        v = np.asarray(v, dtype=complex)

        canonical = self.purity.output_spectrum(params, base)
        conjugate = self.purity.output_spectrum(
            params, PureState4(amplitudes=np.kron(v.T, v.conj().T) @ base.amplitudes)
        )
        plain = self.purity.output_spectrum(
            params, PureState4(amplitudes=np.kron(v.T, v) @ base.amplitudes)
        )
        return WitnessFamilySpectra(
            canonical=canonical,
            conjugate_form=conjugate,
            plain_form=plain,
            conjugate_deviation=float(np.max(np.abs(conjugate.as_array() - canonical.as_array()))),
            plain_deviation=float(np.max(np.abs(plain.as_array() - canonical.as_array()))),
        )

    # === Numeric optimizer ===

    def _lattice(self, budget: OptimizerBudget):
        theta = np.linspace(0.0, HALF_PI, budget.theta_points)
        phi = np.linspace(0.0, math.pi, budget.phi_points)
        a_mod = np.linspace(0.0, 1.0, budget.a_points)
        grid = np.meshgrid(theta, phi, a_mod, indexing="ij")
        steps = np.array([theta[1] - theta[0], phi[1] - phi[0], a_mod[1] - a_mod[0]])
        return [axis.reshape(-1) for axis in grid], steps

    def _pattern_search(
        self,
        mu: float,
        lam: float,
        order: PurityOrder,
        start: np.ndarray,
        score: float,
        steps: np.ndarray,
        budget: OptimizerBudget,
    ):
        """Compass search on (theta, phi, |a|); halves all steps after a failed poll"""
        lower = np.array([0.0, 0.0, 0.0])
        upper = np.array([HALF_PI, math.pi, 1.0])
        directions = np.vstack([np.eye(3), -np.eye(3)])
        point, best, evaluations = start.copy(), score, 0

        for _ in range(budget.max_iterations):
            if float(np.max(steps)) < budget.step_tol:
                break
            candidates = np.clip(point + directions * steps, lower, upper)
            values = self.purity.reduced_spectra_batch(
                mu, lam, candidates[:, 0], candidates[:, 1], candidates[:, 2]
            )
            scores = self.purity.purity_score(values, order)
            evaluations += len(candidates)
            k = int(np.argmax(scores))
            if scores[k] > best:
                point, best = candidates[k], float(scores[k])
            else:
                steps = steps / 2.0
        return point, best, evaluations

    def numeric_optimize(
        self,
        mu: float,
        lam: float,
        order: OrderLike,
        budget: Optional[OptimizerBudget] = None,
        seed: int = 0,
        beta: Optional[MaxEntangled] = None,
    ) -> Optimum:
        """
        Derivative-free search for the optimal output purity.

        The reduced lattice and the pattern search run in the beta_0 frame;
        a winning lattice witness w is returned as (I x B) w for
        beta = (I x B)|beta_0>, whose output under beta has the same spectrum.

        Args:
            mu: Correlation probability in [0, 1]
            lam: Depolarizing parameter in [0, 1]
            order: Purity order; the entropy order minimizes S_1
            budget: Random-state count, lattice sizes and pattern-search limits
            seed: Seed of the Haar sampling stream
            beta: Shift state, beta_0 when omitted

        Returns:
            Best Optimum found; the value is recomputed through the channel
            with the Jacobi solver from the returned witness
        """
        order = PurityOrder.parse(order)
        budget = budget or OptimizerBudget()
        _check_unit("mu", mu)
        _check_unit("lambda", lam)
        rng = np.random.default_rng(seed)
        beta = MaxEntangled.beta0() if beta is None else beta
        params = ChannelParams(mu=mu, lam=lam, beta=beta)
        frame = np.kron(np.eye(2), beta.u)

        try:
            random_states = self.states.random_pure_batch(rng, budget.random_states)
            if budget.random_states:
                outputs = self.purity.channels.apply_to_pure_batch(params, random_states)
                random_scores = self.purity.purity_score(spectra_batch(outputs), order)
                best_random = int(np.argmax(random_scores))
                random_best = float(random_scores[best_random])
            else:
                random_best = -math.inf
            evaluations = budget.random_states

            (theta, phi, a_mod), steps = self._lattice(budget)
            reduced_form = mu < 1.0 and 0.0 < lam < 1.0
            if reduced_form:
                spectra = self.purity.reduced_spectra_batch(mu, lam, theta, phi, a_mod)
            else:
                # the reduced form needs finite M and lambda in (0, 1)
                lattice_states = witness_batch(theta, phi, a_mod) @ frame.T
                spectra = spectra_batch(self.purity.channels.apply_to_pure_batch(params, lattice_states))
            lattice_scores = self.purity.purity_score(spectra, order)
            k = int(np.argmax(lattice_scores))
            point = np.array([theta[k], phi[k], a_mod[k]])
            lattice_best = float(lattice_scores[k])
            evaluations += len(lattice_scores)

            if reduced_form:
                point, lattice_best, extra = self._pattern_search(
                    mu, lam, order, point, lattice_best, steps, budget
                )
                evaluations += extra

            if random_best > lattice_best:
                witness = PureState4(amplitudes=random_states[best_random])
                reduced = self.purity.reduced_params_for(witness, beta)
            else:
                reduced = ReducedParams(
                    theta=float(np.clip(point[0], 0.0, HALF_PI)),
                    phi=float(point[1]),
                    a_mod=float(np.clip(point[2], 0.0, 1.0)),
                )
                witness = PureState4(
                    amplitudes=frame @ self.witness_for(reduced.theta, reduced.phi, reduced.a_mod).amplitudes
                )

            spectrum = self.purity.output_spectrum(params, witness)
            value = float(self.purity.order_value(spectrum.as_array(), order))
        except Exception as e:
            logger.error(
                f"Numeric optimization failed: {str(e)}",
                extra={
                    "extra_fields": {
                        "operation": "numeric_optimize",
                        "mu": mu,
                        "lambda": lam,
                        "order": order.label,
                        "status": "error",
                    }
                },
                exc_info=True,
            )
            raise

        logger.info(
            "Numeric optimization completed",
            extra={
                "extra_fields": {
                    "operation": "numeric_optimize",
                    "mu": mu,
                    "lambda": lam,
                    "order": order.label,
                    "value": value,
                    "evaluations": evaluations,
                    "status": "success",
                }
            },
        )
        return Optimum(
            value=value,
            theta_opt=reduced.theta,
            regime=self.regime(mu, lam),
            witness=witness,
            order=order,
            mu=mu,
            lam=lam,
            mu_c=_threshold(lam) if 0.0 < lam < 1.0 else None,
            spectrum=spectrum,
            method="numeric",
            reduced=reduced,
            evaluations=evaluations,
        )

    # === Reporting ===

    def report(self, optimum: Optimum, gap: Optional[float] = None) -> OptimumReport:
        """Printable summary with the witness entanglement in both measures"""
        lam = optimum.lam
        return OptimumReport(
            method=optimum.method,
            order=optimum.order.label,
            mu=optimum.mu,
            lam=lam,
            value=optimum.value,
            theta_opt=optimum.theta_opt,
            regime=optimum.regime,
            mu_c=optimum.mu_c,
            mu_inner=self.mu_inner(lam) if 0.0 < lam < 1.0 else None,
            spectrum=optimum.spectrum.values,
            witness=optimum.witness.phase_canonical().as_pairs(),
            linear_entropy=self.states.entanglement(optimum.witness, EntanglementKind.LINEAR),
            vn_entropy=self.states.entanglement(optimum.witness, EntanglementKind.VON_NEUMANN),
            evaluations=optimum.evaluations,
            gap=gap,
        )


def get_optimization_service() -> OptimizationService:
    """Get OptimizationService instance for dependency injection."""
    return OptimizationService()
