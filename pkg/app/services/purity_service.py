# app/services/purity_service.py
"""
Service for output purity functionals and the reduced output form.

Key Responsibilities:
- Schatten p-norms, Renyi and von Neumann entropies of density matrices
- Vectorized purity scores over stacks of spectra for scans
- The reduced 4x4 output in the variables (theta, phi, |a|)
- The effective 3x3 operator Delta and its characteristic polynomial
- Closed-form output 2-norm
- Mapping an arbitrary (input, shift state) pair to reduced variables
"""
import math
from typing import Union

import numpy as np

from app.core.config import settings
from app.core.exceptions import InvalidOrderError, NegativeEigenvalueError, ParameterRangeError
from app.core.logging_config import get_logger
from app.numerics.linalg import cubic_roots, eig_hermitian, spectra_batch
from app.schemas.channel import ChannelParams, DensityMatrix4, Rho, matrix_of
from app.schemas.purity import CharPolynomial, PurityOrder, PurityOrderKind, ReducedParams
from app.schemas.spectrum import Spectrum
from app.schemas.state import MaxEntangled, PureState4
from app.services.channel_service import ChannelService
from app.services.state_service import StateService

logger = get_logger(__name__)

OrderLike = Union[PurityOrder, str, float, int]
DELTA_INDICES = (0, 1, 3)


def _order(order: OrderLike) -> PurityOrder:
    return PurityOrder.parse(order)


def _check_reduced_range(mu: float, lam: float) -> None:
    if not (0.0 <= mu < 1.0):
        raise ParameterRangeError("mu", mu, "[0, 1)")
    if not (0.0 < lam < 1.0):
        raise ParameterRangeError("lambda", lam, "(0, 1)")


class PurityService:
    """
    Service for output purity functionals and the reduced output form.

    In the reduced variables, with h = 1 + lam^2, g = 1 - lam^2 and
    kappa = c_phi lam S, the output is (1 - mu)/4 times

        [[h + kappa + M|a|^2,  C + i s_phi lam S,  0,  M|a|b],
         [C - i s_phi lam S,   h - kappa,          0,  0    ],
         [0,                   0,                  g,  0    ],
         [M|a|b,               0,                  0,  g + M b^2]]

    where b = sqrt(1 - |a|^2). Row/column 2 decouples, leaving Delta on
    the indices (0, 1, 3).
    """

    def __init__(self):
        self.channels = ChannelService()
        self.states = StateService()

    # === Spectra ===

    def clip(self, values: np.ndarray) -> np.ndarray:
        """
        Clip eigenvalues in [-CLIP_TOL, 0) to zero.

        Raises:
            NegativeEigenvalueError: If any value lies below -CLIP_TOL
        """
        values = np.asarray(values, dtype=float)
        tolerance = settings.CLIP_TOL
        if values.size and float(np.min(values)) < -tolerance:
            raise NegativeEigenvalueError(float(np.min(values)), tolerance)
        return np.where(values < 0.0, 0.0, values)

    def spectrum_of(self, rho: Rho) -> Spectrum:
        """Clipped descending spectrum of a density matrix"""
        values = eig_hermitian(matrix_of(rho)).as_array()
        return Spectrum(values=tuple(self.clip(values)))

    def output_spectrum(self, params: ChannelParams, psi: PureState4) -> Spectrum:
        """Spectrum of Phi(|psi><psi|)"""
        output = self.channels.apply_channel(params, psi.density_matrix())
        return self.spectrum_of(output)

    # === Functionals on spectra (vectorized over leading axes) ===

    def norm_of_values(self, values: np.ndarray, order: OrderLike) -> np.ndarray:
        """
        Schatten norm of spectra stacked along the last axis.

        Raises:
            InvalidOrderError: For the entropy order, which has no norm
        """
        order = _order(order)
        v = self.clip(values)
        if order.kind == PurityOrderKind.INFINITY:
            return np.max(v, axis=-1)
        if order.kind == PurityOrderKind.ENTROPY:
            raise InvalidOrderError(order.label, "the von Neumann limit has no p-norm")
        return np.sum(v ** order.p, axis=-1) ** (1.0 / order.p)

    def entropy_of_values(self, values: np.ndarray, order: OrderLike) -> np.ndarray:
        """S_p = ln(sum v^p)/(1 - p); S_inf = -ln max v; S_1 = -sum v ln v"""
        order = _order(order)
        v = self.clip(values)
        if order.kind == PurityOrderKind.INFINITY:
            return -np.log(np.max(v, axis=-1))
        if order.kind == PurityOrderKind.ENTROPY:
            positive = v > 0.0
            logs = np.log(np.where(positive, v, 1.0))
            return -np.sum(np.where(positive, v * logs, 0.0), axis=-1)
        return np.log(np.sum(v ** order.p, axis=-1)) / (1.0 - order.p)

    def purity_score(self, values: np.ndarray, order: OrderLike) -> np.ndarray:
        """Quantity maximized by the optimizers: the norm, or -S_1 for the entropy order"""
        order = _order(order)
        if order.kind == PurityOrderKind.ENTROPY:
            return -self.entropy_of_values(values, order)
        return self.norm_of_values(values, order)

    def order_value(self, values: np.ndarray, order: OrderLike) -> np.ndarray:
        """Reported value: nu_p for norm orders, S_1 for the entropy order"""
        order = _order(order)
        if order.kind == PurityOrderKind.ENTROPY:
            return self.entropy_of_values(values, order)
        return self.norm_of_values(values, order)

    # === Functionals on density matrices ===

    def p_norm(self, rho: Rho, order: OrderLike) -> float:
        """
        [Tr rho^p]^(1/p), or the largest eigenvalue for p = inf.

        Args:
            rho: Density matrix
            order: Order p > 1 or inf

        Returns:
            Value in [4^(1/p - 1), 1]

        Raises:
            InvalidOrderError: If the order is the entropy limit or p <= 1
        """
        spectrum = self.spectrum_of(rho)
        return float(self.norm_of_values(spectrum.as_array(), order))

    def renyi_entropy(self, rho: Rho, order: OrderLike) -> float:
        """Renyi entropy in nats; the entropy order gives von Neumann"""
        spectrum = self.spectrum_of(rho)
        return float(self.entropy_of_values(spectrum.as_array(), order))

    # === Reduced output form ===

    def decoupled_eigenvalue(self, mu: float, lam: float) -> float:
        """(1 - mu)(1 - lam^2)/4, present in every pure-input output"""
        return (1.0 - mu) * (1.0 - lam * lam) / 4.0

    def reduced_output_matrix(self, mu: float, lam: float, rp: ReducedParams) -> np.ndarray:
        _check_reduced_range(mu, lam)
        sh = rp.shorthand(mu, lam)
        h, g = 1.0 + lam * lam, 1.0 - lam * lam
        kappa = sh.c_phi * lam * sh.S
        corner = sh.M * math.sqrt(max(0.0, sh.a2 * (1.0 - sh.a2)))

        out = np.zeros((4, 4), dtype=complex)
        out[0, 0] = h + kappa + sh.M * sh.a2
        out[0, 1] = sh.C + 1j * sh.s_phi * lam * sh.S
        out[1, 0] = np.conj(out[0, 1])
        out[1, 1] = h - kappa
        out[2, 2] = g
        out[3, 3] = g + sh.M * (1.0 - sh.a2)
        out[0, 3] = out[3, 0] = corner
        return (1.0 - mu) / 4.0 * out

    def reduced_output(self, mu: float, lam: float, rp: ReducedParams) -> DensityMatrix4:
        """
        Transformed output for the reduced variables.

        Its spectrum equals that of Phi_beta(|psi><psi|) for any pair whose
        reduced_params_for is rp.

        Raises:
            ParameterRangeError: If mu is not in [0, 1) or lambda not in (0, 1)
        """
        return DensityMatrix4(m=self.reduced_output_matrix(mu, lam, rp))

    def delta_matrix(self, mu: float, lam: float, rp: ReducedParams) -> np.ndarray:
        """Effective 3x3 operator, without the (1 - mu)/4 prefactor"""
        full = self.reduced_output_matrix(mu, lam, rp) * 4.0 / (1.0 - mu)
        return full[np.ix_(DELTA_INDICES, DELTA_INDICES)]

    def delta_batch(
        self, mu: float, lam: float, theta: np.ndarray, phi: np.ndarray, a_mod: np.ndarray
    ) -> np.ndarray:
        """Stack of Delta matrices over broadcast (theta, phi, |a|) arrays"""
        _check_reduced_range(mu, lam)
        theta, phi, a_mod = np.broadcast_arrays(
            np.asarray(theta, dtype=float), np.asarray(phi, dtype=float), np.asarray(a_mod, dtype=float)
        )
        M = 4.0 * mu / (1.0 - mu)
        S = 2.0 * lam * np.sin(theta)
        C = 2.0 * lam * np.cos(theta)
        a2 = a_mod * a_mod
        kappa = np.cos(phi) * lam * S

        out = np.zeros(theta.shape + (3, 3), dtype=complex)
        out[..., 0, 0] = 1.0 + lam * lam + kappa + M * a2
        out[..., 0, 1] = C + 1j * np.sin(phi) * lam * S
        out[..., 1, 0] = C - 1j * np.sin(phi) * lam * S
        out[..., 1, 1] = 1.0 + lam * lam - kappa
        out[..., 2, 2] = 1.0 - lam * lam + M * (1.0 - a2)
        corner = M * np.sqrt(np.clip(a2 * (1.0 - a2), 0.0, None))
        out[..., 0, 2] = corner
        out[..., 2, 0] = corner
        return out

    def reduced_spectra_batch(
        self, mu: float, lam: float, theta: np.ndarray, phi: np.ndarray, a_mod: np.ndarray
    ) -> np.ndarray:
        """Full descending output spectra, shape (..., 4), for broadcast reduced variables"""
        delta_values = spectra_batch(self.delta_batch(mu, lam, theta, phi, a_mod))
        scale = (1.0 - mu) / 4.0
        decoupled = np.full(delta_values.shape[:-1] + (1,), 1.0 - lam * lam)
        values = np.concatenate([delta_values, decoupled], axis=-1) * scale
        return -np.sort(-values, axis=-1)

    def char_poly_delta(self, mu: float, lam: float, rp: ReducedParams) -> CharPolynomial:
        """
        R(x) = det(Delta - x I).

        In zeta = x - h with Q = C^2 + lam^2 S^2 (using C^2 + S^2 = 4 lam^2):
        R = -zeta^3 + (M - 2 lam^2) zeta^2 + [Q + M|a|^2(2 lam^2 + c_phi lam S)] zeta
            + Q(2 lam^2 - M) + M|a|^2 (Q + 2 lam^3 c_phi S)
        """
        _check_reduced_range(mu, lam)
        sh = rp.shorthand(mu, lam)
        lam2 = lam * lam
        h = 1.0 + lam2
        q = sh.C ** 2 + lam2 * sh.S ** 2
        weight = sh.M * sh.a2

        z2 = sh.M - 2.0 * lam2
        z1 = q + weight * (2.0 * lam2 + sh.c_phi * lam * sh.S)
        z0 = q * (2.0 * lam2 - sh.M) + weight * (q + 2.0 * lam2 * lam * sh.c_phi * sh.S)

        coefficients = (
            -1.0,
            3.0 * h + z2,
            -3.0 * h * h - 2.0 * h * z2 + z1,
            h ** 3 + z2 * h * h - z1 * h + z0,
        )
        r0 = (-1.0, z2, q, q * (2.0 * lam2 - sh.M))
        return CharPolynomial(coefficients=coefficients, r0=r0, shift=h)

    def delta_roots(self, mu: float, lam: float, rp: ReducedParams) -> list:
        """Eigenvalues of Delta from its characteristic polynomial, descending"""
        return cubic_roots(*self.char_poly_delta(mu, lam, rp).coefficients)

    def two_norm_squared_closed_form(self, mu: float, lam: float, rp: ReducedParams) -> float:
        """
        Tr(output^2) = ((1-mu)/4)^2 {M^2 + 2M[2 lam^2 |a|^2 + (1 - lam^2)
        + c_phi lam S |a|^2] + 4(1 + lam^2)^2 - 2 S^2 (1 - lam^2)}
        """
        _check_reduced_range(mu, lam)
        sh = rp.shorthand(mu, lam)
        lam2 = lam * lam
        g = 1.0 - lam2
        bracket = 2.0 * lam2 * sh.a2 + g + sh.c_phi * lam * sh.S * sh.a2
        total = sh.M ** 2 + 2.0 * sh.M * bracket + 4.0 * (1.0 + lam2) ** 2 - 2.0 * sh.S ** 2 * g
        return ((1.0 - mu) / 4.0) ** 2 * total

    # === Reduction of arbitrary inputs ===

    def reduced_params_for(self, psi: PureState4, beta: MaxEntangled) -> ReducedParams:
        """
        Reduced variables of an (input, shift state) pair.

        With (U x V)|psi> = |psi_theta> and beta = (I x B)|beta_0>, the
        shift seen by |psi_theta> is W = V B U^T. Dividing W by a square
        root of det W puts it in SU(2) form [[a, conj(b)], [-b, conj(a)]],
        and phi = 2 arg(a). The square-root branch changes phi by 2 pi only.
        """
        schmidt = self.states.schmidt_canonicalize(psi)
        w = schmidt.v @ beta.u @ schmidt.u.T
        w = w / np.sqrt(complex(np.linalg.det(w)))
        a = complex(w[0, 0])
        a_mod = min(1.0, abs(a))
        phi = 2.0 * math.atan2(a.imag, a.real) if a_mod > 1e-15 else 0.0
        phi = math.remainder(phi, 2.0 * math.pi)

        logger.debug(
            "Reduced parameters computed",
            extra={
                "extra_fields": {
                    "operation": "reduced_params_for",
                    "theta": schmidt.theta,
                    "phi": phi,
                    "a_mod": a_mod,
                }
            },
        )
        return ReducedParams(theta=schmidt.theta, phi=phi, a_mod=a_mod)


def get_purity_service() -> PurityService:
    """Get PurityService instance for dependency injection."""
    return PurityService()
