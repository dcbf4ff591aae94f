# app/services/perturbation_service.py
"""
Service for first-order eigenvalue perturbation of Delta.

Key Responsibilities:
- Divided-difference identities for three distinct roots
- Root shifts of R(x) + delta1 x + delta2 (first-order and unexpanded forms)
- The two comparison-lemma shifts of a positive 3-vector and their norm signs
- Shifts c_phi -> c_phi + eps and |a|^2 -> |a|^2 + eps on a parameter grid:
  predicted and measured eigenvalue shifts, norm-change signs, proven
  sign claims and mean-value diagnostics
"""
import math
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.core.exceptions import PreconditionError
from app.core.logging_config import get_logger
from app.numerics.linalg import cubic_roots, eig_hermitian
from app.schemas.analysis import (
    ClaimSummary,
    LemmaShiftResult,
    MeanValueDiagnostics,
    OrderSignReport,
    PerturbationDirection,
    PerturbationGrid,
    PerturbationReport,
    RootShiftPrediction,
)
from app.schemas.purity import PurityOrder, PurityOrderKind, ReducedParams
from app.services.purity_service import PurityService

logger = get_logger(__name__)

RELIABILITY_FACTOR = 1e3
DEGENERATE_GAP = 1e-8
RESOLUTION = 1e-11
DEFAULT_SLOPE_EPS = (1e-2, 1e-3, 1e-4, 1e-5)
SLOPE_GAP_FACTOR = 20.0
SLOPE_NOISE = 1e-13

CLAIM_C_PHI = "c_phi_shift_increases_norm_for_1<p<=2"
CLAIM_A2_LOW_P = "a2_shift_increases_norm_for_1<p<2_sin>=1/2"
CLAIM_A2_HIGH_P = "a2_shift_increases_norm_for_p>2_sin<1/2"
CLAIM_TOP = "top_eigenvalue_increases_p=inf"
CLAIMS = (CLAIM_C_PHI, CLAIM_A2_LOW_P, CLAIM_A2_HIGH_P, CLAIM_TOP)


def _sign(value: float) -> int:
    return (value > 0) - (value < 0)


def _gaps(r: Sequence[float]) -> Tuple[float, float, float]:
    """g_k = (r_m - r_k)(r_n - r_k) for k = 1, 2, 3"""
    r1, r2, r3 = r
    return ((r2 - r1) * (r3 - r1), (r1 - r2) * (r3 - r2), (r1 - r3) * (r2 - r3))


def _secant(x: float, y: float, q: float) -> float:
    """(x^q - y^q)/(x - y)"""
    return (x ** q - y ** q) / (x - y)


def _brackets(v: Sequence[float], p: float) -> Tuple[float, float]:
    """Second divided differences of x^p and x^(p-1), each times (v1 - v3)"""
    v1, v2, v3 = v
    return (
        _secant(v1, v2, p) - _secant(v2, v3, p),
        _secant(v1, v2, p - 1.0) - _secant(v2, v3, p - 1.0),
    )


def measured_power_change(v: Sequence[float], shifts: Sequence[float], p: float) -> float:
    """sum (v + shifts)^p - sum v^p without cancellation for small shifts"""
    v = np.asarray(v, dtype=float)
    ratio = np.asarray(shifts, dtype=float) / v
    return float(np.sum(v ** p * np.expm1(p * np.log1p(ratio))))


def _validate_decreasing(v: Sequence[float], positive: bool = True) -> Tuple[float, float, float]:
    if len(v) != 3:
        raise PreconditionError(f"expected three values, got {len(v)}")
    v1, v2, v3 = (float(x) for x in v)
    if not (v1 > v2 > v3):
        raise PreconditionError(f"values must be strictly decreasing, got {(v1, v2, v3)}")
    if positive and v3 <= 0.0:
        raise PreconditionError(f"values must be positive, got {(v1, v2, v3)}")
    return v1, v2, v3


def _scan_point(task) -> List[PerturbationReport]:
    """Worker entry point for process pools"""
    index, mu, lam, rp, eps, orders = task
    service = PerturbationService()
    return [
        service.perturb_point(mu, lam, rp, direction, eps, orders, index=index)
        for direction in PerturbationDirection
    ]


class PerturbationService:
    """
    Service for first-order eigenvalue perturbation of Delta.

    R(x) = det(Delta - x I) is linear in c_phi and in |a|^2:
    R(x) = R0(x - 1 - lam^2) + M|a|^2 [(2 lam^2 + c_phi lam S) x
           + (1 - lam^2)(2 lam^2 - c_phi lam S - S^2)],
    so both shifts add delta1 x + delta2 to R exactly.
    """

    def __init__(self):
        self.purity = PurityService()

    # === Comparison lemmas ===

    def identity_check_sums(self, roots: Sequence[float]) -> Tuple[float, float]:
        """
        sum_k 1/g_k and sum_k r_k/g_k, both identically zero.

        Raises:
            PreconditionError: If the roots are not strictly decreasing
        """
        r = _validate_decreasing(roots, positive=False)
        g = _gaps(r)
        return (
            math.fsum(1.0 / gk for gk in g),
            math.fsum(rk / gk for rk, gk in zip(r, g)),
        )

    def actual_roots(self, roots: Sequence[float], delta1: float, delta2: float) -> List[float]:
        """Roots of -(x - r1)(x - r2)(x - r3) + delta1 x + delta2, descending"""
        r1, r2, r3 = roots
        e1, e2, e3 = r1 + r2 + r3, r1 * r2 + r1 * r3 + r2 * r3, r1 * r2 * r3
        return cubic_roots(-1.0, e1, -e2 + delta1, e3 + delta2)

    def root_shift_predict(
        self, roots: Sequence[float], delta1: float, delta2: float, with_actual: bool = True
    ) -> RootShiftPrediction:
        """
        Roots of Q(x) = R(x) + delta1 x + delta2 with R = -(x - r1)(x - r2)(x - r3).

        First order: s_k = r_k + (r_k delta1 + delta2)/g_k. Unexpanded:
        s_k = r_k/(1 - delta1/(g_k - delta1)) + delta2/(g_k - delta1).
        Predictions with a root gap below 1e3 max|delta| are flagged unreliable.
        """
        r = _validate_decreasing(roots, positive=False)
        g = _gaps(r)
        predicted = tuple(rk + (rk * delta1 + delta2) / gk for rk, gk in zip(r, g))
        exact = tuple(
            rk / (1.0 - delta1 / (gk - delta1)) + delta2 / (gk - delta1) for rk, gk in zip(r, g)
        )
        min_gap = min(r[0] - r[1], r[1] - r[2])
        actual = tuple(self.actual_roots(r, delta1, delta2)) if with_actual else None
        return RootShiftPrediction(
            roots=r,
            delta1=delta1,
            delta2=delta2,
            predicted=predicted,
            exact_form=exact,
            actual=actual,
            min_gap=min_gap,
            reliable=min_gap > RELIABILITY_FACTOR * max(abs(delta1), abs(delta2)),
        )

    def shift_error_slope(
        self,
        roots: Sequence[float],
        delta1_unit: float = 1.0,
        delta2_unit: float = 1.0,
        eps_values: Iterable[float] = DEFAULT_SLOPE_EPS,
    ) -> float:
        """Log-log slope of the first-order prediction error against eps"""
        eps_values = list(eps_values)
        errors = [
            self.root_shift_predict(roots, delta1_unit * eps, delta2_unit * eps).error
            for eps in eps_values
        ]
        slope, _ = np.polyfit(np.log(eps_values), np.log(errors), 1)
        return float(slope)

    def _lemma_shift(
        self, kind: str, v: Sequence[float], eps: float, orders: Sequence[PurityOrder]
    ) -> LemmaShiftResult:
        v = _validate_decreasing(v)
        if eps <= 0.0:
            raise PreconditionError(f"eps must be positive, got {eps}")
        min_gap = min(v[0] - v[1], v[1] - v[2])
        if eps > 1e-3 * min_gap ** 2:
            raise PreconditionError(
                f"eps={eps:.3e} exceeds 1e-3 * min_gap^2 = {1e-3 * min_gap ** 2:.3e}"
            )
        g = _gaps(v)
        if kind == "p":
            shifts = tuple(eps * vk / gk for vk, gk in zip(v, g))
        else:
            shifts = tuple(eps / gk for gk in g)
        w = tuple(vk + sk for vk, sk in zip(v, shifts))

        reports = []
        for order in orders:
            if order.kind == PurityOrderKind.INFINITY:
                change = w[0] - v[0]
                claimed = 1 if kind == "p" else None
                scale = v[0]
            else:
                change = measured_power_change(v, shifts, order.p)
                if kind == "p":
                    claimed = 1
                elif order.p > 2.0:
                    claimed = 1
                elif order.p < 2.0:
                    claimed = -1
                else:
                    claimed = None
                scale = float(np.sum(np.asarray(v) ** order.p))
            resolved = abs(change) >= RESOLUTION * scale
            measured_sign = _sign(change) if resolved else None
            reports.append(
                OrderSignReport(
                    order=order.label,
                    claim=f"lemma_{kind}" if claimed is not None else None,
                    measured_change=change,
                    claimed_sign=claimed,
                    measured_sign=measured_sign,
                    resolved=resolved,
                    agrees=(measured_sign == claimed) if (claimed is not None and resolved) else None,
                )
            )
        return LemmaShiftResult(
            kind=kind,
            v=v,
            eps=eps,
            w=w,
            shifts=shifts,
            sum_change=math.fsum(shifts),
            orders=reports,
        )

    def lemma_p_shift(
        self, v: Sequence[float], eps: float, orders: Sequence[PurityOrder]
    ) -> LemmaShiftResult:
        """
        w_k = v_k + eps v_k/g_k: the 1-norm is preserved and every p-norm,
        p > 1 including inf, increases.

        Raises:
            PreconditionError: If v is not strictly decreasing and positive,
                or eps is not in (0, 1e-3 min_gap^2]
        """
        return self._lemma_shift("p", v, eps, orders)

    def lemma_q_shift(
        self, v: Sequence[float], eps: float, orders: Sequence[PurityOrder]
    ) -> LemmaShiftResult:
        """
        w_k = v_k + eps/g_k: the 1-norm is preserved; the p-norm increases
        for p > 2 and decreases for 1 < p < 2.
        """
        return self._lemma_shift("q", v, eps, orders)

    # === Parameter shifts of Delta ===

    def _deltas(
        self, mu: float, lam: float, rp: ReducedParams, direction: PerturbationDirection, eps: float
    ) -> Tuple[float, float, float, ReducedParams]:
        """Signed step, (delta1, delta2) and the shifted parameters"""
        sh = rp.shorthand(mu, lam)
        lam2, g = lam * lam, 1.0 - lam * lam
        if direction == PerturbationDirection.C_PHI:
            step = eps if sh.c_phi + eps <= 1.0 else -eps
            weight = step * sh.M * sh.a2 * lam * sh.S
            shifted = ReducedParams(
                theta=rp.theta, phi=math.acos(min(1.0, max(-1.0, sh.c_phi + step))), a_mod=rp.a_mod
            )
            return step, weight, -weight * g, shifted
        step = eps if sh.a2 + eps <= 1.0 else -eps
        delta1 = step * sh.M * (2.0 * lam2 + sh.c_phi * lam * sh.S)
        delta2 = step * sh.M * g * (2.0 * lam2 - sh.c_phi * lam * sh.S - sh.S ** 2)
        shifted = ReducedParams(
            theta=rp.theta, phi=rp.phi, a_mod=math.sqrt(min(1.0, max(0.0, sh.a2 + step)))
        )
        return step, delta1, delta2, shifted

    def _claim(
        self, direction: PerturbationDirection, order: PurityOrder, sin_theta: float, c_phi: float
    ) -> Optional[str]:
        if order.kind == PurityOrderKind.INFINITY:
            return CLAIM_TOP
        p = order.p
        if direction == PerturbationDirection.C_PHI:
            return CLAIM_C_PHI if p <= 2.0 else None
        if p < 2.0 and sin_theta >= 0.5 and c_phi == 1.0:
            return CLAIM_A2_LOW_P
        if p > 2.0 and sin_theta < 0.5:
            return CLAIM_A2_HIGH_P
        return None

    def _heuristic(self, direction: PerturbationDirection, p: float, s: float, c_phi: float):
        if direction != PerturbationDirection.A2 or p == 2.0:
            return None
        if p < 2.0:
            return (p - 1.0) * (1.0 - s) + s
        return (p - 2.0) * (1.0 - s * s) + (1.0 + c_phi * s)

    def mean_value_diagnostics(self, v: Sequence[float], p: float, floor: float) -> MeanValueDiagnostics:
        """
        Mean-value points of the divided differences.

        (v1^p - v2^p)/(v1 - v2) = p v'_1^(p-1) and likewise v'_3 from (v2, v3);
        v''_k come from x^(p-1). v'_2 is the mean value of the outer difference.
        The assumptions v'_k ~ v''_k and v'_2 >= 1 - lambda^2 are checked, not assumed.
        """
        if p == 2.0:
            return MeanValueDiagnostics()
        v1, v2, v3 = v
        a1 = (_secant(v1, v2, p) / p) ** (1.0 / (p - 1.0))
        a3 = (_secant(v2, v3, p) / p) ** (1.0 / (p - 1.0))
        g1 = (_secant(v1, v2, p - 1.0) / (p - 1.0)) ** (1.0 / (p - 2.0))
        g3 = (_secant(v2, v3, p - 1.0) / (p - 1.0)) ** (1.0 / (p - 2.0))
        if a1 == a3:
            return MeanValueDiagnostics(v_grave=(g1, g3))
        a2 = ((a1 ** (p - 1.0) - a3 ** (p - 1.0)) / ((p - 1.0) * (a1 - a3))) ** (1.0 / (p - 2.0))
        return MeanValueDiagnostics(
            v_acute=(a1, a2, a3),
            v_grave=(g1, g3),
            acute_grave_gap=max(abs(a1 - g1), abs(a3 - g3)),
            v_acute2_above_floor=a2 >= floor,
        )

    def perturb_point(
        self,
        mu: float,
        lam: float,
        rp: ReducedParams,
        direction: PerturbationDirection,
        eps: float,
        orders: Sequence[PurityOrder],
        index: int = 0,
    ) -> PerturbationReport:
        """
        Predicted and measured effect of one parameter shift.

        The step is +eps when the parameter has room, otherwise -eps with
        every claimed sign flipped. Measured shifts come from
        re-diagonalizing Delta with the Jacobi solver.
        """
        step, delta1, delta2, shifted = self._deltas(mu, lam, rp, direction, eps)
        v = tuple(eig_hermitian(self.purity.delta_matrix(mu, lam, rp)).values)
        w = tuple(eig_hermitian(self.purity.delta_matrix(mu, lam, shifted)).values)
        measured_shifts = tuple(wk - vk for wk, vk in zip(w, v))
        min_gap = min(v[0] - v[1], v[1] - v[2])
        degenerate = min_gap < DEGENERATE_GAP * max(1.0, abs(v[0]))
        reliable = not degenerate and min_gap > RELIABILITY_FACTOR * max(abs(delta1), abs(delta2))

        predicted_shifts = shift_error = None
        if not degenerate:
            prediction = self.root_shift_predict(v, delta1, delta2, with_actual=False)
            predicted_shifts = tuple(pk - vk for pk, vk in zip(prediction.predicted, v))
            shift_error = max(abs(a - b) for a, b in zip(predicted_shifts, measured_shifts))

        sin_theta, c_phi = math.sin(rp.theta), math.cos(rp.phi)
        g = 1.0 - lam * lam
        orders_out: List[OrderSignReport] = []
        diagnostics: Dict[str, MeanValueDiagnostics] = {}
        for order in orders:
            claim = self._claim(direction, order, sin_theta, c_phi)
            if order.kind == PurityOrderKind.INFINITY:
                measured = measured_shifts[0]
                predicted = predicted_shifts[0] if predicted_shifts else None
                scale = abs(v[0])
                top_degenerate = v[0] - v[1] < DEGENERATE_GAP * max(1.0, abs(v[0]))
                resolved = not top_degenerate and abs(measured) >= RESOLUTION * scale
                bracket = heuristic = None
            else:
                p = order.p
                measured = measured_power_change(v, measured_shifts, p)
                scale = float(np.sum(np.asarray(v) ** p))
                resolved = reliable and abs(measured) >= RESOLUTION * scale
                bracket = heuristic = predicted = None
                if not degenerate:
                    bracket = _brackets(v, p)
                    predicted = p / (v[0] - v[2]) * (delta1 * bracket[0] + delta2 * bracket[1])
                    diagnostics[order.label] = self.mean_value_diagnostics(v, p, g)
                heuristic = self._heuristic(direction, p, sin_theta, c_phi)

            claimed_sign = _sign(step) if claim else None
            measured_sign = _sign(measured) if resolved else None
            orders_out.append(
                OrderSignReport(
                    order=order.label,
                    claim=claim,
                    predicted_change=predicted,
                    measured_change=measured,
                    claimed_sign=claimed_sign,
                    measured_sign=measured_sign,
                    resolved=resolved,
                    agrees=(measured_sign == claimed_sign) if (claim and resolved) else None,
                    bracket=bracket,
                    heuristic=heuristic,
                )
            )

        return PerturbationReport(
            index=index,
            mu=mu,
            lam=lam,
            theta=rp.theta,
            phi=rp.phi,
            a_mod=rp.a_mod,
            mu_c=(1.0 - lam * lam) / (2.0 - lam * lam),
            mu_inner=(1.0 - lam * lam) / (3.0 - lam * lam),
            direction=direction,
            eps=step,
            delta1=delta1,
            delta2=delta2,
            eigenvalues=v,
            predicted_shifts=predicted_shifts,
            measured_shifts=measured_shifts,
            shift_error=shift_error,
            reliable=reliable,
            degenerate=degenerate,
            orders=orders_out,
            diagnostics=diagnostics,
        )

    def point_shift_slope(
        self,
        mu: float,
        lam: float,
        rp: ReducedParams,
        direction: PerturbationDirection,
        eps_values: Iterable[float] = DEFAULT_SLOPE_EPS,
    ) -> Optional[float]:
        """
        Log-log slope of max |predicted - measured| Delta shift against eps.

        Returns None when the point is degenerate, when the largest step moves
        an eigenvalue by more than min gap / SLOPE_GAP_FACTOR, or when an
        error sinks to the eigensolver's rounding level.
        """
        eps_values = sorted(eps_values, reverse=True)
        errors = []
        for eps in eps_values:
            report = self.perturb_point(mu, lam, rp, direction, eps, orders=())
            if report.shift_error is None:
                return None
            if eps == eps_values[0]:
                min_gap = min(report.eigenvalues[0] - report.eigenvalues[1],
                              report.eigenvalues[1] - report.eigenvalues[2])
                if SLOPE_GAP_FACTOR * max(abs(s) for s in report.measured_shifts) >= min_gap:
                    return None
            if report.shift_error <= SLOPE_NOISE * max(1.0, abs(report.eigenvalues[0])):
                return None
            errors.append(report.shift_error)
        slope, _ = np.polyfit(np.log(eps_values), np.log(errors), 1)
        return float(slope)

    # === Scans ===

    def grid_points(self, grid: PerturbationGrid) -> List[Tuple[int, float, float, ReducedParams]]:
        points = []
        axes = product(grid.mu, grid.lam, grid.theta, grid.phi, grid.a_mod)
        for index, (mu, lam, theta, phi, a_mod) in enumerate(axes):
            points.append((index, mu, lam, ReducedParams(theta=theta, phi=phi, a_mod=a_mod)))
        return points

    def perturb_eigen_scan(self, grid: PerturbationGrid, workers: int = 1) -> List[PerturbationReport]:
        """
        Both shifts at every grid point, ordered by grid index then direction.

        Args:
            grid: Parameter axes, step and orders
            workers: Process count for the data-parallel map

        Returns:
            Two reports per grid point
        """
        tasks = [
            (index, mu, lam, rp, grid.eps, grid.orders) for index, mu, lam, rp in self.grid_points(grid)
        ]
        logger.info(
            "Starting perturbation scan",
            extra={
                "extra_fields": {
                    "operation": "perturb_eigen_scan",
                    "points": len(tasks),
                    "eps": grid.eps,
                    "status": "started",
                }
            },
        )
        if workers <= 1 or len(tasks) <= 1:
            batches = [_scan_point(task) for task in tasks]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                batches = list(pool.map(_scan_point, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
        return [report for batch in batches for report in batch]

    def summarize_claims(self, reports: Iterable[PerturbationReport]) -> List[ClaimSummary]:
        """Agreement counts per proven claim; unresolved points are excluded from checked"""
        summaries = {claim: ClaimSummary(claim=claim) for claim in CLAIMS}
        for report in reports:
            for order in report.orders:
                if order.claim is None:
                    continue
                summary = summaries[order.claim]
                if not order.resolved:
                    summary.unresolved += 1
                    continue
                summary.checked += 1
                summary.agreed += int(bool(order.agrees))
        return list(summaries.values())


def get_perturbation_service() -> PerturbationService:
    """Get PerturbationService instance for dependency injection."""
    return PerturbationService()
