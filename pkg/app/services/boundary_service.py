# app/services/boundary_service.py
"""
Service for the boundary columns of Delta.

Key Responsibilities:
- Closed-form Delta eigenvalues at |a| = 0 and |a| = 1, labelled by row
- Endpoint comparison of the labelled rows between the two columns
- The sin(theta) = 1, c_phi = 1 matrix and its p-norms along |a|
- Intermediate monotonicity of the top eigenvalue in |a|^2
"""
import math
from typing import Dict, List, Sequence

import numpy as np

from app.core.exceptions import InvalidOrderError
from app.core.logging_config import get_logger
from app.numerics.linalg import eig_hermitian, spectra_batch
from app.schemas.analysis import (
    BoundaryEigenvalues,
    BoundarySide,
    EntangledMatrixCheck,
    EntangledNormScan,
    MonotonicityScan,
)
from app.schemas.purity import PurityOrder, PurityOrderKind, ReducedParams
from app.services.purity_service import PurityService

logger = get_logger(__name__)

MONOTONE_SLACK = 1e-12


class BoundaryService:
    """
    Service for the boundary columns of Delta.

    Rows are labelled, not sorted: the two smallest entries of a column can
    swap order for small M, and the endpoint comparison is row by row.
    """

    def __init__(self):
        self.purity = PurityService()

    def boundary_eigenvalues(
        self, mu: float, lam: float, theta: float, side: BoundarySide, c_phi: float = 1.0
    ) -> BoundaryEigenvalues:
        """
        Closed-form Delta eigenvalues on one boundary column.

        With X = 4 lam^2 - (1 - lam^2) S^2:
        |a| = 0: 1 + lam^2 + sqrt(X), 1 - lam^2 + M, 1 + lam^2 - sqrt(X)
        |a| = 1: 1 + lam^2 + M/2 +/- sqrt(M^2/4 + X + M c_phi lam S), 1 - lam^2

        Args:
            mu: Correlation weight in [0, 1)
            lam: Depolarizing parameter in (0, 1)
            theta: Schmidt angle
            side: Column to evaluate
            c_phi: cos(phi); the tabulated column uses c_phi = 1

        Returns:
            BoundaryEigenvalues with the eigensolver values alongside
        """
        rp = ReducedParams(
            theta=theta,
            phi=math.acos(min(1.0, max(-1.0, c_phi))),
            a_mod=0.0 if side == BoundarySide.A0 else 1.0,
        )
        sh = rp.shorthand(mu, lam)
        lam2 = lam * lam
        h, g = 1.0 + lam2, 1.0 - lam2
        x = max(0.0, 4.0 * lam2 - g * sh.S ** 2)

        if side == BoundarySide.A0:
            root = math.sqrt(x)
            upper, middle, lower = h + root, g + sh.M, h - root
        else:
            y = max(0.0, sh.M ** 2 / 4.0 + x + sh.M * sh.c_phi * lam * sh.S)
            root = math.sqrt(y)
            upper, middle, lower = h + sh.M / 2.0 + root, g, h + sh.M / 2.0 - root

        eigensolver = eig_hermitian(self.purity.delta_matrix(mu, lam, rp)).values
        closed = sorted((upper, middle, lower), reverse=True)
        deviation = max(abs(a - b) for a, b in zip(closed, eigensolver))
        return BoundaryEigenvalues(
            side=side,
            mu=mu,
            lam=lam,
            theta=theta,
            upper=upper,
            middle=middle,
            lower=lower,
            eigensolver=tuple(eigensolver),
            deviation=deviation,
        )

    def arrow_check(self, mu: float, lam: float, theta: float) -> Dict[str, bool]:
        """Row-wise change from |a| = 0 to |a| = 1 at c_phi = 1: upper up, middle down, lower up"""
        a0 = self.boundary_eigenvalues(mu, lam, theta, BoundarySide.A0)
        a1 = self.boundary_eigenvalues(mu, lam, theta, BoundarySide.A1)
        return {
            "upper_increases": a1.upper >= a0.upper - MONOTONE_SLACK,
            "middle_decreases": a1.middle <= a0.middle + MONOTONE_SLACK,
            "lower_increases": a1.lower >= a0.lower - MONOTONE_SLACK,
        }

    # === sin(theta) = 1 ===

    def entangled_closed_form(self, mu: float, lam: float, a_mod: float) -> tuple:
        M = 4.0 * mu / (1.0 - mu)
        lam2 = lam * lam
        h, g = 1.0 + lam2, 1.0 - lam2
        a2 = a_mod * a_mod
        root = math.sqrt(max(0.0, M * M / 4.0 + 4.0 * lam2 * lam2 - 2.0 * lam2 * M * (1.0 - 2.0 * a2)))
        return tuple(sorted((h + M / 2.0 + root, g, h + M / 2.0 - root), reverse=True))

    def entangled_matrix_check(self, mu: float, lam: float, a_mod: float) -> EntangledMatrixCheck:
        """
        Eigenvalues of Delta at sin(theta) = 1, c_phi = 1:
        {1 - lam^2, 1 + lam^2 + M/2 +/- sqrt(M^2/4 + 4 lam^4 - 2 lam^2 M (1 - 2|a|^2))}
        """
        rp = ReducedParams(theta=math.pi / 2.0, phi=0.0, a_mod=a_mod)
        eigensolver = eig_hermitian(self.purity.delta_matrix(mu, lam, rp)).values
        closed = self.entangled_closed_form(mu, lam, a_mod)
        return EntangledMatrixCheck(
            mu=mu,
            lam=lam,
            a_mod=a_mod,
            closed_form=closed,
            eigensolver=tuple(eigensolver),
            deviation=max(abs(a - b) for a, b in zip(closed, eigensolver)),
        )

    def entangled_norm_scan(
        self, mu: float, lam: float, orders: Sequence[PurityOrder], points: int = 41
    ) -> EntangledNormScan:
        """
        Output p-norms along |a| in [0, 1] at sin(theta) = 1, c_phi = 1.

        Raises:
            InvalidOrderError: If the entropy order is requested
        """
        if any(order.kind == PurityOrderKind.ENTROPY for order in orders):
            raise InvalidOrderError("entropy", "the sin(theta) = 1 scan compares norms")
        a_values = np.linspace(0.0, 1.0, points)
        spectra = self.purity.reduced_spectra_batch(mu, lam, math.pi / 2.0, 0.0, a_values)
        norms: Dict[str, List[float]] = {}
        maximal_at_one = True
        for order in orders:
            values = self.purity.norm_of_values(spectra, order)
            norms[order.label] = [float(v) for v in values]
            maximal_at_one &= bool(values[-1] >= np.max(values) - MONOTONE_SLACK)
        top = np.array([self.entangled_closed_form(mu, lam, a)[0] for a in a_values])
        return EntangledNormScan(
            mu=mu,
            lam=lam,
            a_values=[float(a) for a in a_values],
            norms=norms,
            maximal_at_one=maximal_at_one,
            top_increasing=bool(np.all(np.diff(top) >= -MONOTONE_SLACK)),
        )

    # === Between the columns ===

    def scan_a_monotonicity(
        self, mu: float, lam: float, theta: float, c_phi: float = 1.0, points: int = 41
    ) -> MonotonicityScan:
        """Top Delta eigenvalue along |a|^2 in [0, 1]; reported, never asserted"""
        a2_values = np.linspace(0.0, 1.0, points)
        phi = math.acos(min(1.0, max(-1.0, c_phi)))
        stack = self.purity.delta_batch(mu, lam, theta, phi, np.sqrt(a2_values))
        top = spectra_batch(stack)[:, 0]
        scan = MonotonicityScan(
            mu=mu,
            lam=lam,
            theta=theta,
            c_phi=c_phi,
            a2_values=[float(a) for a in a2_values],
            top_values=[float(t) for t in top],
            monotone=bool(np.all(np.diff(top) >= -MONOTONE_SLACK)),
            endpoint_increase=bool(top[-1] >= top[0] - MONOTONE_SLACK),
        )
        if not scan.monotone:
            logger.info(
                "Top eigenvalue not monotone in |a|^2",
                extra={
                    "extra_fields": {
                        "operation": "scan_a_monotonicity",
                        "mu": mu,
                        "lambda": lam,
                        "theta": theta,
                        "c_phi": c_phi,
                    }
                },
            )
        return scan


def get_boundary_service() -> BoundaryService:
    """Get BoundaryService instance for dependency injection."""
    return BoundaryService()
