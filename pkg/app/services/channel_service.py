# app/services/channel_service.py
"""
Service for the depolarizing and correlated two-qubit channels.

Key Responsibilities:
- Qubit depolarizing channel Psi_lambda(gamma) = (1-lambda) Tr(gamma) I/2 + lambda gamma
- Product channel Psi_lambda x Psi_lambda on two-qubit operators
- Correlated channel Phi(R) = (1-mu)(Psi x Psi)(R) + mu Tr(R)|beta><beta|
- Closed-form product output for the canonical state |psi_theta>
- Covariance transport of local unitaries into the shift state
- Shifted depolarizing comparison channel on M_4
- Batched outputs for pure-state scans
"""
import math
from typing import Tuple

import numpy as np

from app.core.exceptions import ParameterRangeError
from app.core.logging_config import get_logger
from app.numerics.linalg import dagger, partial_trace, require_unitary
from app.schemas.channel import ChannelParams, DensityMatrix4, Rho, matrix_of
from app.schemas.state import MaxEntangled

logger = get_logger(__name__)

LAMBDA_RANGE = "[-1/3, 1]"
HALF_IDENTITY = np.eye(2, dtype=complex) / 2.0


def _check_lambda(lam: float) -> None:
    if not (-1.0 / 3.0 <= lam <= 1.0):
        raise ParameterRangeError("lambda", lam, LAMBDA_RANGE)


def _batched_kron(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Kronecker product over the trailing two axes, broadcasting the rest"""
    out = np.einsum("...ij,...kl->...ikjl", left, right)
    return out.reshape(out.shape[:-4] + (4, 4))


class ChannelService:
    """
    Service for the depolarizing and correlated two-qubit channels.

    Channels act directly on operators through their convex-combination
    form; no Kraus decomposition is used.
    """

    # === Depolarizing channels ===

    def depolarize(self, gamma: np.ndarray, lam: float) -> np.ndarray:
        """
        Qubit depolarizing channel.

        Args:
            gamma: 2x2 operator
            lam: Depolarizing parameter in [-1/3, 1]

        Returns:
            (1 - lam) Tr(gamma) I/2 + lam gamma

        Raises:
            ParameterRangeError: If lam is out of range
        """
        _check_lambda(lam)
        gamma = np.asarray(gamma, dtype=complex)
        return (1.0 - lam) * np.trace(gamma) * HALF_IDENTITY + lam * gamma

    def product_channel(self, rho: np.ndarray, lam: float) -> np.ndarray:
        """
        (Psi_lambda x Psi_lambda)(R), vectorized over leading axes.

        Expanding Psi = lam id + (1 - lam) T with T(X) = Tr(X) I/2 gives
        lam^2 R + lam(1-lam)(Tr_2 R x I/2 + I/2 x Tr_1 R) + (1-lam)^2 Tr(R) I/4.
        """
        rho = np.asarray(rho, dtype=complex)
        trace = np.trace(rho, axis1=-2, axis2=-1)[..., None, None]
        first = partial_trace(rho, keep=0)
        second = partial_trace(rho, keep=1)
        half = np.broadcast_to(HALF_IDENTITY, first.shape)
        return (
            lam * lam * rho
            + lam * (1.0 - lam) * (_batched_kron(first, half) + _batched_kron(half, second))
            + (1.0 - lam) ** 2 * trace * np.eye(4) / 4.0
        )

    # === Correlated channel ===

    def apply_channel_raw(self, params: ChannelParams, rho: np.ndarray) -> np.ndarray:
        """Channel action without output validation; rho may be a stack"""
        rho = np.asarray(rho, dtype=complex)
        trace = np.trace(rho, axis1=-2, axis2=-1)[..., None, None]
        return (1.0 - params.mu) * self.product_channel(rho, params.lam) + (
            params.mu * trace * params.beta.projector()
        )

    def apply_channel(self, params: ChannelParams, rho: Rho) -> DensityMatrix4:
        """
        Correlated channel Phi_{beta, mu, lambda}.

        Args:
            params: Channel parameters with shift state
            rho: Input density matrix

        Returns:
            Validated output density matrix
        """
        return DensityMatrix4(m=self.apply_channel_raw(params, matrix_of(rho)))

    def apply_to_pure_batch(self, params: ChannelParams, states: np.ndarray) -> np.ndarray:
        """Outputs for a (N, 4) stack of pure-state amplitudes, shape (N, 4, 4)"""
        states = np.asarray(states, dtype=complex)
        projectors = np.einsum("ni,nj->nij", states, np.conj(states))
        return self.apply_channel_raw(params, projectors)

    def product_output_theta(self, lam: float, theta: float) -> DensityMatrix4:
        """
        Closed form of (Psi x Psi)(|psi_theta><psi_theta|).

        Diagonal 1/4 (1 + lam^2 + 2 lam cos(theta), 1 - lam^2, 1 - lam^2,
        1 + lam^2 - 2 lam cos(theta)) with corner entries 1/4 * 2 lam^2 sin(theta).
        """
        _check_lambda(lam)
        if not (0.0 <= theta <= math.pi / 2):
            raise ParameterRangeError("theta", theta, "[0, pi/2]")
        c, s = math.cos(theta), math.sin(theta)
        out = np.zeros((4, 4), dtype=complex)
        out[0, 0] = 1.0 + lam * lam + 2.0 * lam * c
        out[1, 1] = out[2, 2] = 1.0 - lam * lam
        out[3, 3] = 1.0 + lam * lam - 2.0 * lam * c
        out[0, 3] = out[3, 0] = 2.0 * lam * lam * s
        return DensityMatrix4(m=out / 4.0)

    def covariance_transport(
        self, params: ChannelParams, u: np.ndarray, v: np.ndarray, rho: Rho
    ) -> Tuple[DensityMatrix4, MaxEntangled]:
        """
        Move local unitaries through the channel.

        Phi_B((U x V) rho (U x V)^dagger) = (U x V) Phi_B'(rho) (U x V)^dagger
        with B' = V^dagger B conj(U); for B = I this is V^dagger conj(U).

        Returns:
            The left-hand output and the transported shift state

        Raises:
            NonUnitaryError: If U or V is not unitary
        """
        u = require_unitary(u)
        v = require_unitary(v)
        local = np.kron(u, v)
        rotated = local @ matrix_of(rho) @ dagger(local)
        output = self.apply_channel(params, rotated)
        beta = MaxEntangled(u=dagger(v) @ params.beta.u @ np.conj(u))

        logger.debug(
            "Transported local unitaries into shift state",
            extra={"extra_fields": {"operation": "covariance_transport", "status": "success"}},
        )
        return output, beta

    def apply_shifted_depolarizing(self, params: ChannelParams, rho: Rho) -> DensityMatrix4:
        """
        Shifted depolarizing channel on M_4.

        R -> (1-mu)[lam R + (1-lam) Tr(R) I/4] + mu Tr(R)|beta><beta|; its
        shift state is an optimal input for every order p.
        """
        m = matrix_of(rho)
        trace = np.trace(m)
        depolarized = params.lam * m + (1.0 - params.lam) * trace * np.eye(4) / 4.0
        return DensityMatrix4(
            m=(1.0 - params.mu) * depolarized + params.mu * trace * params.beta.projector()
        )


def get_channel_service() -> ChannelService:
    """Get ChannelService instance for dependency injection."""
    return ChannelService()
