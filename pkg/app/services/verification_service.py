# app/services/verification_service.py
"""
Service for the verification suites.

Key Responsibilities:
- lemmas: divided-difference identities, root-shift error order, the two
  comparison-lemma sign claims over random draws
- covariance: decoupled eigenvalue, local-unitary transport, singlet
  covariance, reduced form against the direct channel, shifted depolarizing
  optimality, candidate optimal-input families
- majorization: golden spectra, non-majorization verdicts, T-transform
  oracle, Ky Fan consistency
- tables: boundary columns, sin(theta) = 1 matrix, characteristic
  polynomial and 2-norm closed forms against the eigensolver, beta_0
  strictly below the optimum under mu_c
- perturbation: parameter-shift scan with per-claim agreement counts

Every suite is deterministic given (seed, trials).
"""
import math
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from app.core.exceptions import ComplexRootsError
from app.core.logging_config import get_logger
from app.numerics.linalg import PAULI, eig_hermitian
from app.schemas.analysis import (
    BoundarySide,
    CheckResult,
    ClaimSummary,
    PerturbationGrid,
    PerturbationReport,
    SuiteResult,
    VerificationSuite,
)
from app.schemas.channel import ChannelParams
from app.schemas.purity import PurityOrder, ReducedParams, default_p_grid
from app.schemas.state import MaxEntangled
from app.services.boundary_service import BoundaryService
from app.services.majorization_service import MajorizationService
from app.services.optimization_service import OptimizationService
from app.services.perturbation_service import PerturbationService

logger = get_logger(__name__)

SPECTRUM_TOL = 1e-10
GOLDEN_TOL = 5e-4
SLOPE_RANGE = (1.8, 2.2)
GAP_RESOLUTION = 1e-12
POINT_SLOPE_RANGE = (1.95, 2.05)

ENTANGLED_GAP_ORDERS = ("1.1", "1.5", "2")

LEMMA_P_ORDERS = ("1.1", "1.25", "1.5", "1.75", "2", "2.5", "3", "4", "6", "10", "inf")
LEMMA_Q_ORDERS = ("1.1", "1.25", "1.5", "1.75", "2.25", "2.5", "3", "4", "6", "10")

# Printed reference pairs, three decimals
PRODUCT_VS_BELL = ((0.611, 0.222, 0.111, 0.056), (0.667, 0.111, 0.111, 0.111))
PRODUCT_VS_OPTIMAL = ((0.422, 0.391, 0.141, 0.047), (0.596, 0.141, 0.141, 0.123))


def _check(
    name: str,
    passed: bool,
    detail: str = "",
    counterexample: Optional[Dict[str, Any]] = None,
    informational: bool = False,
) -> CheckResult:
    return CheckResult(
        name=name,
        passed=bool(passed),
        detail=detail,
        counterexample=None if passed else counterexample,
        informational=informational,
    )


def _floats(values) -> List[float]:
    return [float(v) for v in np.asarray(values, dtype=float).ravel()]


def _distinct_triple(
    rng: np.random.Generator, low: float = 0.05, min_gap: float = 0.05
) -> Tuple[float, float, float]:
    """Descending triple in [low, 1] with adjacent gaps of at least min_gap"""
    while True:
        v = np.sort(rng.uniform(low, 1.0, size=3))[::-1]
        if v[0] - v[1] >= min_gap and v[1] - v[2] >= min_gap:
            return float(v[0]), float(v[1]), float(v[2])


def _random_density(rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def default_perturbation_grid() -> PerturbationGrid:
    return PerturbationGrid(
        mu=[0.1, 0.3, 0.6],
        lam=[0.3, 0.5, 0.8],
        theta=[0.2, 0.5, 0.9, 1.2, math.pi / 2.0],
        phi=[0.0, 1.0, 2.5],
        a_mod=[0.2, 0.5, 0.8, 1.0],
        eps=1e-6,
        orders=list(default_p_grid()),
    )


class VerificationService:
    """Service for the verification suites"""

    def __init__(self):
        self.optimizer = OptimizationService()
        self.purity = self.optimizer.purity
        self.states = self.optimizer.states
        self.channels = self.purity.channels
        self.perturbation = PerturbationService()
        self.boundary = BoundaryService()
        self.majorization = MajorizationService()

    def run(self, suite: VerificationSuite, seed: int, trials: int, workers: int = 1) -> SuiteResult:
        """
        Run one suite.

        Args:
            suite: Suite name
            seed: Seed of the suite's random stream
            trials: Random draws per randomized check
            workers: Process count for the perturbation scan

        Returns:
            SuiteResult; informational checks never fail the suite
        """
        suite = VerificationSuite(suite)
        logger.info(
            "Starting verification suite",
            extra={
                "extra_fields": {
                    "operation": "verify",
                    "suite": suite.value,
                    "seed": seed,
                    "trials": trials,
                    "status": "started",
                }
            },
        )
        try:
            if suite == VerificationSuite.PERTURBATION:
                result, _, _ = self.perturbation_suite(seed, trials, workers)
            else:
                runner = {
                    VerificationSuite.LEMMAS: self.lemmas_suite,
                    VerificationSuite.COVARIANCE: self.covariance_suite,
                    VerificationSuite.MAJORIZATION: self.majorization_suite,
                    VerificationSuite.TABLES: self.tables_suite,
                }[suite]
                result = runner(seed, trials)
        except Exception as e:
            logger.error(
                f"Verification suite crashed: {str(e)}",
                extra={"extra_fields": {"operation": "verify", "suite": suite.value, "status": "error"}},
                exc_info=True,
            )
            raise

        logger.info(
            "Verification suite completed",
            extra={
                "extra_fields": {
                    "operation": "verify",
                    "suite": suite.value,
                    "passed": result.passed,
                    "checks": len(result.checks),
                    "status": "success",
                }
            },
        )
        return result

    # === lemmas ===

    def lemmas_suite(self, seed: int, trials: int) -> SuiteResult:
        rng = np.random.default_rng(seed)
        checks: List[CheckResult] = []

        worst, worst_triple = 0.0, None
        for triple in [(3.0, 2.0, 1.0), (1.5, 1.0, 0.1)] + [_distinct_triple(rng) for _ in range(trials)]:
            sums = self.perturbation.identity_check_sums(triple)
            size = max(abs(s) for s in sums)
            if size > worst:
                worst, worst_triple = size, triple
        checks.append(
            _check(
                "divided_difference_sums",
                worst <= 1e-9,
                f"max |sum| = {worst:.3e}",
                {"roots": list(worst_triple or ())},
            )
        )

        golden = self.perturbation.root_shift_predict((3.0, 2.0, 1.0), 1e-3, 1e-3)
        checks.append(
            _check(
                "root_shift_golden",
                abs(golden.predicted[0] - 3.002) <= 1e-12 and golden.error <= 1e-5,
                f"s1 = {golden.predicted[0]:.9f}, |predicted - actual| = {golden.error:.3e}",
                {"predicted": list(golden.predicted), "actual": list(golden.actual or ())},
            )
        )

        for roots in ((3.0, 2.0, 1.0), (1.5, 1.0, 0.1), (2.0, 1.2, 0.3)):
            slope = self.perturbation.shift_error_slope(roots)
            checks.append(
                _check(
                    f"root_shift_error_order[{roots[0]:g},{roots[1]:g},{roots[2]:g}]",
                    SLOPE_RANGE[0] <= slope <= SLOPE_RANGE[1],
                    f"log-log slope {slope:.3f}",
                    {"roots": list(roots), "slope": slope},
                )
            )

        shifted = self.perturbation.lemma_p_shift((3.0, 2.0, 1.0), 1e-4, [PurityOrder.parse("2")])
        expected = (1.5e-4, -2e-4, 0.5e-4)
        checks.append(
            _check(
                "lemma_p_golden",
                max(abs(a - b) for a, b in zip(shifted.shifts, expected)) <= 1e-15
                and abs(shifted.orders[0].measured_change - 2e-4) <= 1e-7,
                f"shifts {shifted.shifts}, 2-norm^2 change {shifted.orders[0].measured_change:.6e}",
                {"shifts": list(shifted.shifts)},
            )
        )

        p_orders = [PurityOrder.parse(p) for p in LEMMA_P_ORDERS]
        q_orders = [PurityOrder.parse(p) for p in LEMMA_Q_ORDERS]
        for kind, orders in (("p", p_orders), ("q", q_orders)):
            failures, checked, unresolved, worst_sum = 0, 0, 0, 0.0
            counterexample = None
            for _ in range(trials):
                v = _distinct_triple(rng)
                gap = min(v[0] - v[1], v[1] - v[2])
                eps = 10.0 ** rng.uniform(-8.0, -6.0) * gap * gap
                shift = self.perturbation.lemma_p_shift if kind == "p" else self.perturbation.lemma_q_shift
                result = shift(v, eps, orders)
                worst_sum = max(worst_sum, abs(result.sum_change) / max(abs(s) for s in result.shifts))
                for order in result.orders:
                    if order.claimed_sign is None:
                        continue
                    if not order.resolved:
                        unresolved += 1
                        continue
                    checked += 1
                    if not order.agrees:
                        failures += 1
                        counterexample = counterexample or {"v": list(v), "eps": eps, "order": order.order}
            checks.append(
                _check(
                    f"lemma_{kind}_signs",
                    failures == 0 and checked > 0,
                    f"{checked} checked, {failures} failed, {unresolved} unresolved",
                    counterexample,
                )
            )
            checks.append(
                _check(
                    f"lemma_{kind}_one_norm",
                    worst_sum <= 1e-12,
                    f"max |sum of shifts|/max |shift| = {worst_sum:.3e}",
                )
            )
        return SuiteResult(suite=VerificationSuite.LEMMAS.value, seed=seed, trials=trials, checks=checks)

    # === covariance ===

    def covariance_suite(self, seed: int, trials: int) -> SuiteResult:
        rng = np.random.default_rng(seed)
        checks: List[CheckResult] = []
        orders = default_p_grid()

        decoupled_worst = transport_worst = singlet_worst = reduced_worst = 0.0
        decoupled_case = transport_case = singlet_case = reduced_case = None
        shifted_failures, shifted_case = 0, None
        singlet = self.states.named_shift("singlet")

        for _ in range(trials):
            mu = float(rng.uniform(0.0, 0.95))
            lam = float(rng.uniform(0.05, 0.95))
            psi = self.states.random_pure(rng)
            beta = MaxEntangled(u=self.states.random_unitary(rng))
            params = ChannelParams(mu=mu, lam=lam, beta=beta)

            spectrum = self.purity.output_spectrum(params, psi).as_array()
            floor = self.purity.decoupled_eigenvalue(mu, lam)
            distance = float(np.min(np.abs(spectrum - floor)))
            if distance > decoupled_worst:
                decoupled_worst, decoupled_case = distance, {"mu": mu, "lambda": lam, "psi": psi.as_pairs()}

            rp = self.purity.reduced_params_for(psi, beta)
            reduced = self.purity.spectrum_of(self.purity.reduced_output(mu, lam, rp)).as_array()
            distance = float(np.max(np.abs(reduced - spectrum)))
            if distance > reduced_worst:
                reduced_worst, reduced_case = distance, {"mu": mu, "lambda": lam, "psi": psi.as_pairs()}

            u, v = self.states.random_unitary(rng), self.states.random_unitary(rng)
            rho = _random_density(rng)
            left, moved = self.channels.covariance_transport(params, u, v, rho)
            right = self.channels.apply_channel(ChannelParams(mu=mu, lam=lam, beta=moved), rho)
            distance = float(
                np.max(np.abs(self.purity.spectrum_of(left).as_array() - self.purity.spectrum_of(right).as_array()))
            )
            if distance > transport_worst:
                transport_worst, transport_case = distance, {"mu": mu, "lambda": lam}

            singlet_params = ChannelParams(mu=mu, lam=lam, beta=singlet)
            local = np.kron(u, u)
            lhs = self.channels.apply_channel(singlet_params, local @ rho @ local.conj().T).m
            rhs = local @ self.channels.apply_channel(singlet_params, rho).m @ local.conj().T
            distance = float(np.max(np.abs(lhs - rhs)))
            if distance > singlet_worst:
                singlet_worst, singlet_case = distance, {"mu": mu, "lambda": lam}

            shift_input = params.beta.state().density_matrix()
            shifted_output = self.channels.apply_shifted_depolarizing(params, psi.density_matrix())
            shift_output = self.channels.apply_shifted_depolarizing(params, shift_input)
            for order in orders:
                if self.purity.purity_score(
                    self.purity.spectrum_of(shifted_output).as_array(), order
                ) > self.purity.purity_score(self.purity.spectrum_of(shift_output).as_array(), order) + 1e-12:
                    shifted_failures += 1
                    shifted_case = shifted_case or {"mu": mu, "lambda": lam, "order": order.label}

        checks.append(_check("decoupled_eigenvalue", decoupled_worst <= SPECTRUM_TOL,
                             f"max distance {decoupled_worst:.3e}", decoupled_case))
        checks.append(_check("covariance_transport", transport_worst <= SPECTRUM_TOL,
                             f"max spectrum deviation {transport_worst:.3e}", transport_case))
        checks.append(_check("singlet_covariance", singlet_worst <= SPECTRUM_TOL,
                             f"max entry deviation {singlet_worst:.3e}", singlet_case))
        checks.append(_check("reduced_form_matches_channel", reduced_worst <= SPECTRUM_TOL,
                             f"max spectrum deviation {reduced_worst:.3e}", reduced_case))
        checks.append(_check("shifted_depolarizing_optimal_input", shifted_failures == 0,
                             f"{shifted_failures} inputs beat the shift state", shifted_case))

        conjugate_worst, plain_invariant = 0.0, 0
        for _ in range(trials):
            mu = float(rng.uniform(0.05, 0.95))
            lam = float(rng.uniform(0.05, 0.95))
            family = self.optimizer.witness_family_spectra(mu, lam, self.states.random_unitary(rng))
            conjugate_worst = max(conjugate_worst, family.conjugate_deviation)
            plain_invariant += int(family.plain_deviation <= SPECTRUM_TOL)
        sigma1 = self.optimizer.witness_family_spectra(0.25, 0.5, PAULI[1])
        checks.append(_check("witness_family_conjugate_form", conjugate_worst <= SPECTRUM_TOL,
                             f"max spectrum deviation {conjugate_worst:.3e}"))
        checks.append(_check("witness_family_plain_form_sigma1", sigma1.plain_deviation <= SPECTRUM_TOL,
                             f"deviation {sigma1.plain_deviation:.3e}"))
        checks.append(_check("witness_family_plain_form_random", True,
                             f"{plain_invariant}/{trials} random V leave the spectrum unchanged",
                             informational=True))
        return SuiteResult(suite=VerificationSuite.COVARIANCE.value, seed=seed, trials=trials, checks=checks)

    # === majorization ===

    def golden_spectra(self) -> Dict[str, Tuple[float, ...]]:
        """Output spectra of the paired inputs at (1/3, 1/2) and (1/2, 1/4)"""
        third = ChannelParams(mu=0.5, lam=1.0 / 3.0)
        half = ChannelParams(mu=0.25, lam=0.5)
        product = self.states.named_state("product-1")
        optimal = self.states.canonical_state(self.optimizer.theta_optimal(0.25, 0.5))
        return {
            "bell0_third": self.purity.output_spectrum(third, self.states.named_state("bell0")).values,
            "product_third": self.purity.output_spectrum(third, product).values,
            "optimal_half": self.purity.output_spectrum(half, optimal).values,
            "product_half": self.purity.output_spectrum(half, product).values,
        }

    def majorization_suite(self, seed: int, trials: int) -> SuiteResult:
        rng = np.random.default_rng(seed)
        checks: List[CheckResult] = []

        computed = self.golden_spectra()
        expected = {
            "bell0_third": PRODUCT_VS_BELL[1],
            "product_third": PRODUCT_VS_BELL[0],
            "optimal_half": PRODUCT_VS_OPTIMAL[1],
            "product_half": PRODUCT_VS_OPTIMAL[0],
        }
        for name, values in computed.items():
            deviation = max(abs(a - b) for a, b in zip(values, expected[name]))
            checks.append(
                _check(f"golden_spectrum[{name}]", deviation <= GOLDEN_TOL,
                       f"computed {tuple(round(x, 3) for x in values)}",
                       {"computed": list(values), "expected": list(expected[name])})
            )

        pairs = (
            ("bell0_third", "product_third", PRODUCT_VS_BELL),
            ("optimal_half", "product_half", PRODUCT_VS_OPTIMAL),
        )
        for name, product_name, (x, y) in pairs:
            report = self.majorization.majorization_check(x, y)
            checks.append(
                _check(f"not_majorized[{name}]",
                       not report.majorized and report.first_violation_index == 2,
                       f"first violation k={report.first_violation_index} sums {report.first_violation_sums}",
                       report.model_dump(mode="json"))
            )
            exact = self.majorization.majorization_check(computed[product_name], computed[name])
            checks.append(
                _check(f"p_dominance[{name}]", exact.p_dominated,
                       f"first violating order {exact.first_violating_p}", informational=True)
            )

        trivial = self.majorization.trumping_scan((0.5, 0.3, 0.2), (0.6, 0.3, 0.1), max_catalyst_dim=1)
        checks.append(_check("scalar_catalyst", trivial.catalyst == (1.0,),
                             f"catalyst {trivial.catalyst}"))

        oracle_failures, oracle_case = 0, None
        for _ in range(trials):
            y = rng.dirichlet(np.ones(3))
            weights = rng.dirichlet(np.ones(6))
            perms = [np.eye(3)[list(p)] for p in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))]
            x = sum(w * p for w, p in zip(weights, perms)) @ y
            report = self.majorization.majorization_check(x, y)
            witness = self.majorization.doubly_stochastic_witness(x, y)
            valid = (
                witness is not None
                and np.all(witness >= -1e-12)
                and np.allclose(witness.sum(axis=0), 1.0, atol=1e-9)
                and np.allclose(witness.sum(axis=1), 1.0, atol=1e-9)
                and np.allclose(witness @ y, x, atol=1e-9)
            )
            if not (report.majorized and valid):
                oracle_failures += 1
                oracle_case = oracle_case or {"x": _floats(x), "y": _floats(y)}

            a, b = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(3))
            agreed = self.majorization.majorization_check(a, b).majorized == (
                self.majorization.doubly_stochastic_witness(a, b) is not None
            )
            if not agreed:
                oracle_failures += 1
                oracle_case = oracle_case or {"x": _floats(a), "y": _floats(b)}
        checks.append(_check("doubly_stochastic_oracle", oracle_failures == 0,
                             f"{oracle_failures} disagreements over {2 * trials} pairs", oracle_case))

        ky_fan_failures, ky_fan_case = 0, None
        for _ in range(trials):
            size = int(rng.integers(2, 7))
            x = rng.dirichlet(np.ones(size)) * rng.uniform(0.5, 1.0)
            y = rng.dirichlet(np.ones(size))
            report = self.majorization.majorization_check(x, y)
            consistent = (not report.majorized or report.weakly_majorized) and (
                not report.weakly_majorized or report.p_dominated
            )
            if not consistent:
                ky_fan_failures += 1
                ky_fan_case = ky_fan_case or {"x": _floats(x), "y": _floats(y)}
        checks.append(_check("ky_fan_consistency", ky_fan_failures == 0,
                             f"{ky_fan_failures} inconsistent reports", ky_fan_case))
        return SuiteResult(suite=VerificationSuite.MAJORIZATION.value, seed=seed, trials=trials, checks=checks)

    # === tables ===

    def tables_suite(self, seed: int, trials: int) -> SuiteResult:
        rng = np.random.default_rng(seed)
        checks: List[CheckResult] = []
        mus, lams = (0.0, 0.2, 0.5, 0.8), (0.2, 0.5, 0.8)
        thetas = np.linspace(0.0, math.pi / 2.0, 7)

        boundary_worst, arrow_failures, arrow_case, non_monotone = 0.0, 0, None, 0
        for mu in mus:
            for lam in lams:
                for theta in thetas:
                    for side in BoundarySide:
                        column = self.boundary.boundary_eigenvalues(mu, lam, float(theta), side)
                        boundary_worst = max(boundary_worst, column.deviation)
                    arrows = self.boundary.arrow_check(mu, lam, float(theta))
                    if not all(arrows.values()):
                        arrow_failures += 1
                        arrow_case = arrow_case or {"mu": mu, "lambda": lam, "theta": float(theta), **arrows}
                    if mu > 0.0:
                        non_monotone += int(not self.boundary.scan_a_monotonicity(mu, lam, float(theta)).monotone)
        checks.append(_check("boundary_columns", boundary_worst <= SPECTRUM_TOL,
                             f"max deviation {boundary_worst:.3e}"))
        checks.append(_check("boundary_arrows", arrow_failures == 0,
                             f"{arrow_failures} grid points contradict the arrows", arrow_case))
        checks.append(_check("intermediate_monotonicity", True,
                             f"{non_monotone} (mu, lambda, theta) points not monotone in |a|^2",
                             informational=True))

        entangled_worst, scan_failures, scan_case = 0.0, 0, None
        for mu in mus:
            for lam in lams:
                for a_mod in (0.0, 0.25, 0.5, 0.75, 1.0):
                    entangled_worst = max(entangled_worst, self.boundary.entangled_matrix_check(mu, lam, a_mod).deviation)
                scan = self.boundary.entangled_norm_scan(mu, lam, default_p_grid())
                if not (scan.maximal_at_one and scan.top_increasing):
                    scan_failures += 1
                    scan_case = scan_case or {"mu": mu, "lambda": lam}
        checks.append(_check("entangled_matrix_closed_form", entangled_worst <= SPECTRUM_TOL,
                             f"max deviation {entangled_worst:.3e}"))
        checks.append(_check("entangled_norm_maximal_at_unit_a", scan_failures == 0,
                             f"{scan_failures} (mu, lambda) scans fail", scan_case))

        poly_worst, norm_worst, poly_case = 0.0, 0.0, None
        skipped = 0
        for _ in range(trials):
            mu = float(rng.uniform(0.0, 0.95))
            lam = float(rng.uniform(0.05, 0.95))
            rp = ReducedParams(
                theta=float(rng.uniform(0.0, math.pi / 2.0)),
                phi=float(rng.uniform(-math.pi, math.pi)),
                a_mod=float(rng.uniform(0.0, 1.0)),
            )
            eigen = eig_hermitian(self.purity.delta_matrix(mu, lam, rp)).values
            try:
                roots = self.purity.delta_roots(mu, lam, rp)
            except ComplexRootsError:
                skipped += 1
                continue
            distance = max(abs(a - b) for a, b in zip(roots, eigen))
            if distance > poly_worst:
                poly_worst, poly_case = distance, {"mu": mu, "lambda": lam, **rp.model_dump()}
            m = self.purity.reduced_output_matrix(mu, lam, rp)
            direct = float(np.real(np.trace(m @ m)))
            norm_worst = max(norm_worst, abs(direct - self.purity.two_norm_squared_closed_form(mu, lam, rp)))
        checks.append(_check("characteristic_polynomial_roots", poly_worst <= 1e-8,
                             f"max |root - eigenvalue| {poly_worst:.3e}, {skipped} skipped", poly_case))
        checks.append(_check("two_norm_closed_form", norm_worst <= 1e-12,
                             f"max deviation {norm_worst:.3e}"))

        mu_c = self.optimizer.mu_critical(Fraction(1, 2)), self.optimizer.mu_critical(Fraction(1, 3))
        checks.append(_check("thresholds", mu_c == (Fraction(3, 7), Fraction(8, 17)),
                             f"mu_c(1/2) = {mu_c[0]}, mu_c(1/3) = {mu_c[1]}"))

        gap_worst, gap_case = math.inf, None
        for lam in lams:
            threshold = float(self.optimizer.mu_critical(lam))
            for fraction in (0.25, 0.5, 0.75):
                for label in ENTANGLED_GAP_ORDERS:
                    gap = self.optimizer.maximally_entangled_gap(fraction * threshold, lam, label)
                    if gap < gap_worst:
                        gap_worst, gap_case = gap, {"mu": fraction * threshold, "lambda": lam, "p": label, "gap": gap}
        checks.append(_check("maximally_entangled_not_optimal", gap_worst > GAP_RESOLUTION,
                             f"min gap below mu_c {gap_worst:.3e}", gap_case))
        return SuiteResult(suite=VerificationSuite.TABLES.value, seed=seed, trials=trials, checks=checks)

    # === perturbation ===

    def perturbation_suite(
        self,
        seed: int,
        trials: int,
        workers: int = 1,
        grid: Optional[PerturbationGrid] = None,
    ) -> Tuple[SuiteResult, List[PerturbationReport], List[ClaimSummary]]:
        """
        Parameter-shift scan on a fixed grid; seed and trials are recorded only.

        Returns:
            The suite result, every report, and the per-claim summaries
        """
        grid = grid or default_perturbation_grid()
        reports = self.perturbation.perturb_eigen_scan(grid, workers=workers)
        summaries = self.perturbation.summarize_claims(reports)
        checks: List[CheckResult] = []
        for summary in summaries:
            failing = next(
                (
                    r for r in reports
                    if any(o.claim == summary.claim and o.agrees is False for o in r.orders)
                ),
                None,
            )
            checks.append(
                _check(
                    f"claim[{summary.claim}]",
                    summary.passed and summary.checked > 0,
                    f"{summary.agreed}/{summary.checked} agree, {summary.unresolved} unresolved",
                    failing.model_dump(mode="json", by_alias=True) if failing else None,
                )
            )

        slopes = []
        for r in reports:
            if r.degenerate:
                continue
            rp = ReducedParams(theta=r.theta, phi=r.phi, a_mod=r.a_mod)
            slope = self.perturbation.point_shift_slope(r.mu, r.lam, rp, r.direction)
            if slope is not None:
                slopes.append((slope, r))
        worst_error = max((r.shift_error for r in reports if r.reliable and r.shift_error is not None), default=0.0)
        off = [(s, r) for s, r in slopes if not POINT_SLOPE_RANGE[0] <= s <= POINT_SLOPE_RANGE[1]]
        slope_case = None
        if off:
            s, r = max(off, key=lambda item: abs(item[0] - 2.0))
            slope_case = {"mu": r.mu, "lambda": r.lam, "theta": r.theta, "phi": r.phi,
                          "a_mod": r.a_mod, "direction": r.direction.value, "slope": s}
        span = (min(s for s, _ in slopes), max(s for s, _ in slopes)) if slopes else (math.nan, math.nan)
        checks.append(_check("first_order_shift_error", bool(slopes) and not off,
                             f"log-log slopes in [{span[0]:.3f}, {span[1]:.3f}] at {len(slopes)} points, "
                             f"max |predicted - measured| {worst_error:.3e} at eps = {grid.eps:g}",
                             slope_case))
        floor_held = sum(
            1 for r in reports for d in r.diagnostics.values() if d.v_acute2_above_floor
        )
        floor_total = sum(
            1 for r in reports for d in r.diagnostics.values() if d.v_acute2_above_floor is not None
        )
        checks.append(_check("mean_value_assumptions", True,
                             f"middle mean value above 1 - lambda^2 in {floor_held}/{floor_total} cases",
                             informational=True))
        result = SuiteResult(suite=VerificationSuite.PERTURBATION.value, seed=seed, trials=trials, checks=checks)
        return result, reports, summaries


def get_verification_service() -> VerificationService:
    """Get VerificationService instance for dependency injection."""
    return VerificationService()
