# app/services/majorization_service.py
"""
Service for majorization, p-norm dominance and catalyst search.

Key Responsibilities:
- Partial-sum majorization and weak majorization with the first violating k
- p-norm dominance over a fixed order grid
- Finite catalyst search on a 1/32 rational lattice
- Doubly stochastic witnesses built from T-transforms
"""
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.exceptions import PreconditionError
from app.core.logging_config import get_logger
from app.schemas.analysis import DominanceReport, TrumpingResult
from app.schemas.purity import PurityOrder
from app.schemas.spectrum import Spectrum
from app.services.purity_service import PurityService

logger = get_logger(__name__)

VectorLike = Union[Spectrum, Sequence[float], np.ndarray]

DOMINANCE_P_GRID = ("1.05", "1.1", "1.5", "2", "3", "5", "10", "inf")
PARTIAL_SUM_TOL = 1e-9
NORM_TOL = 1e-12
CATALYST_DENOMINATOR = 32
EXHAUSTIVE_MAX_DIM = 4
MAX_CATALYST_DIM = 6


def _as_vector(x: VectorLike, name: str) -> np.ndarray:
    values = x.as_array() if isinstance(x, Spectrum) else np.asarray(x, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise PreconditionError(f"{name} must be a nonempty vector, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise PreconditionError(f"{name} has non-finite entries")
    if np.any(values < 0.0):
        raise PreconditionError(f"{name} has negative entry {float(np.min(values)):.3e}")
    return values


def _descending(values: np.ndarray) -> np.ndarray:
    return -np.sort(-values, axis=-1)


def partitions(total: int, parts: int, largest: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Non-increasing tuples of `parts` positive integers summing to `total`"""
    largest = total if largest is None else largest
    if parts == 1:
        if 1 <= total <= largest:
            yield (total,)
        return
    for first in range(min(total - parts + 1, largest), 0, -1):
        for rest in partitions(total - first, parts - 1, first):
            yield (first,) + rest


class MajorizationService:
    """
    Service for majorization, p-norm dominance and catalyst search.

    Vectors are compared through their descending rearrangements; x is
    majorized by y when every partial sum of x is at most that of y and
    the totals agree, both within PARTIAL_SUM_TOL.
    """

    def __init__(self):
        self.purity = PurityService()
        self.p_grid = tuple(PurityOrder.parse(p) for p in DOMINANCE_P_GRID)

    def _pair(self, x: VectorLike, y: VectorLike) -> Tuple[np.ndarray, np.ndarray]:
        xv, yv = _as_vector(x, "x"), _as_vector(y, "y")
        if xv.shape != yv.shape:
            raise PreconditionError(f"length mismatch: {xv.size} versus {yv.size}")
        return xv, yv

    # === Dominance ===

    def majorization_check(self, x: VectorLike, y: VectorLike) -> DominanceReport:
        """
        Compare x against y.

        Args:
            x: Candidate majorized vector, entries >= 0
            y: Candidate majorizing vector of the same length

        Returns:
            DominanceReport; first_violation_index is 1-based

        Raises:
            PreconditionError: On negative entries or a length mismatch
        """
        xv, yv = self._pair(x, y)
        xs, ys = _descending(xv), _descending(yv)
        x_sums, y_sums = np.cumsum(xs), np.cumsum(ys)

        violations = np.nonzero(x_sums > y_sums + PARTIAL_SUM_TOL)[0]
        first = int(violations[0]) if violations.size else None
        weakly = first is None
        majorized = weakly and abs(x_sums[-1] - y_sums[-1]) <= PARTIAL_SUM_TOL

        first_p = None
        for order in self.p_grid:
            if self.purity.norm_of_values(xs, order) > self.purity.norm_of_values(ys, order) + NORM_TOL:
                first_p = order.label
                break

        return DominanceReport(
            x=tuple(xs),
            y=tuple(ys),
            majorized=majorized,
            weakly_majorized=weakly,
            p_dominated=first_p is None,
            first_violation_index=None if first is None else first + 1,
            first_violation_sums=None if first is None else (float(x_sums[first]), float(y_sums[first])),
            first_violating_p=first_p,
        )

    def _majorized_rows(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Row-wise majorization of stacked vectors"""
        x_sums = np.cumsum(_descending(xs), axis=-1)
        y_sums = np.cumsum(_descending(ys), axis=-1)
        partial = np.all(x_sums <= y_sums + PARTIAL_SUM_TOL, axis=-1)
        return partial & (np.abs(x_sums[..., -1] - y_sums[..., -1]) <= PARTIAL_SUM_TOL)

    # === Catalysts ===

    def catalyst_candidates(self, dim: int, rng: np.random.Generator, samples: int) -> np.ndarray:
        """
        Probability vectors with entries in (1/32)Z, sorted descending.

        Exhaustive over partitions of 32 into `dim` parts up to dimension 4;
        above that, `samples` random compositions deduplicated by sorting.
        """
        if dim <= EXHAUSTIVE_MAX_DIM:
            rows = list(partitions(CATALYST_DENOMINATOR, dim))
        else:
            seen = set()
            for _ in range(samples):
                cuts = np.sort(rng.choice(np.arange(1, CATALYST_DENOMINATOR), size=dim - 1, replace=False))
                parts = np.diff(np.concatenate(([0], cuts, [CATALYST_DENOMINATOR])))
                seen.add(tuple(sorted(parts.tolist(), reverse=True)))
            rows = sorted(seen, reverse=True)
        return np.asarray(rows, dtype=float).reshape(-1, dim) / CATALYST_DENOMINATOR

    def trumping_scan(
        self,
        x: VectorLike,
        y: VectorLike,
        max_catalyst_dim: int = EXHAUSTIVE_MAX_DIM,
        seed: int = 0,
        samples: int = 2000,
    ) -> TrumpingResult:
        """
        Search for z with x (x) z majorized by y (x) z.

        A found catalyst proves trumping; absence says nothing beyond the
        searched lattice.

        Raises:
            PreconditionError: If max_catalyst_dim is outside [1, 6]
        """
        if not 1 <= max_catalyst_dim <= MAX_CATALYST_DIM:
            raise PreconditionError(
                f"max_catalyst_dim={max_catalyst_dim} outside [1, {MAX_CATALYST_DIM}]"
            )
        dominance = self.majorization_check(x, y)
        xs, ys = np.asarray(dominance.x), np.asarray(dominance.y)
        rng = np.random.default_rng(seed)

        searched: List[int] = []
        checked = 0
        for dim in range(1, max_catalyst_dim + 1):
            candidates = self.catalyst_candidates(dim, rng, samples)
            searched.append(dim)
            checked += len(candidates)
            xz = (candidates[:, None, :] * xs[None, :, None]).reshape(len(candidates), -1)
            yz = (candidates[:, None, :] * ys[None, :, None]).reshape(len(candidates), -1)
            hits = np.nonzero(self._majorized_rows(xz, yz))[0]
            if hits.size:
                catalyst = tuple(float(c) for c in candidates[hits[0]])
                logger.info(
                    "Catalyst found",
                    extra={
                        "extra_fields": {
                            "operation": "trumping_scan",
                            "dimension": dim,
                            "catalyst": catalyst,
                            "candidates_checked": checked,
                        }
                    },
                )
                return TrumpingResult(
                    p_dominance=dominance,
                    catalyst=catalyst,
                    catalyst_dimension=dim,
                    dimensions_searched=searched,
                    candidates_checked=checked,
                )

        return TrumpingResult(
            p_dominance=dominance,
            dimensions_searched=searched,
            candidates_checked=checked,
        )

    # === Birkhoff route ===

    def doubly_stochastic_witness(
        self, x: VectorLike, y: VectorLike, tolerance: float = PARTIAL_SUM_TOL
    ) -> Optional[np.ndarray]:
        """
        Doubly stochastic D with x = D y, or None when x is not majorized by y.

        Works on the descending rearrangements: take the largest j with
        z_j > x_j and the smallest k > j with x_k > z_k, then move
        delta = min(z_j - x_j, x_k - z_k) from z_j to z_k with the
        T-transform (1 - t) I + t P_jk, t = delta/(z_j - z_k). Each step
        matches one coordinate, so at most n - 1 steps are taken.
        """
        xv, yv = self._pair(x, y)
        if not self.majorization_check(xv, yv).majorized:
            return None
        x_order, y_order = np.argsort(-xv, kind="stable"), np.argsort(-yv, kind="stable")
        xs, z = xv[x_order], yv[y_order].copy()
        n = xs.size
        d = np.eye(n)

        for _ in range(n):
            excess = np.nonzero(z > xs + tolerance)[0]
            if not excess.size:
                break
            j = int(excess[-1])
            deficits = [k for k in range(j + 1, n) if xs[k] > z[k] + tolerance]
            if not deficits:
                break
            k = deficits[0]
            delta = min(z[j] - xs[j], xs[k] - z[k])
            t = delta / (z[j] - z[k])
            transform = np.eye(n)
            transform[j, j] = transform[k, k] = 1.0 - t
            transform[j, k] = transform[k, j] = t
            z = transform @ z
            d = transform @ d

        # back to the original coordinates: x = Px^T D Py y
        px, py = np.eye(n)[x_order], np.eye(n)[y_order]
        witness = px.T @ d @ py
        residual = float(np.max(np.abs(witness @ yv - xv)))
        if residual > tolerance:
            logger.warning(
                "T-transform witness residual above tolerance",
                extra={
                    "extra_fields": {
                        "operation": "doubly_stochastic_witness",
                        "residual": residual,
                        "tolerance": tolerance,
                    }
                },
            )
            return None
        return witness


def get_majorization_service() -> MajorizationService:
    """Get MajorizationService instance for dependency injection."""
    return MajorizationService()
