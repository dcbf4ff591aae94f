# app/services/state_service.py
"""
Service for two-qubit pure-state operations.

Key Responsibilities:
- Bell basis construction and the C^4 <-> M_2 Pauli isomorphism
- Schmidt canonical form (U x V)|psi> = |psi_theta>
- Entanglement measures (von Neumann and linear entropy)
- Haar-random pure states and local unitaries
- Maximally entangled states from 2x2 unitaries
- Named inputs used by the command line
"""
import math

import numpy as np

from app.core.exceptions import PreconditionError
from app.core.logging_config import get_logger
from app.numerics.linalg import PAULI, SIGMA_X, SIGMA_Z, eig_hermitian, require_unitary, svd2
from app.schemas.state import (
    BETA0_AMPLITUDES,
    EntanglementKind,
    MaxEntangled,
    PauliCoeffs,
    PureState4,
    SchmidtForm,
    StateLiteral,
)

logger = get_logger(__name__)

SQRT2 = math.sqrt(2.0)

NAMED_STATES = ("bell0", "bell1", "bell2", "bell3", "singlet", "product00", "product-1")


def binary_entropy(x: float) -> float:
    """h(x) = -((1+x)/2) ln((1+x)/2) - ((1-x)/2) ln((1-x)/2), natural log"""
    total = 0.0
    for prob in ((1.0 + x) / 2.0, (1.0 - x) / 2.0):
        if prob > 0.0:
            total -= prob * math.log(prob)
    return total


class StateService:
    """
    Service for two-qubit pure-state operations.

    A state is written |psi> = (I x A)|beta_0> with A = sum_k a_k sigma_k,
    which in amplitude form reads A = sqrt(2) Psi^T where Psi[i, j] is the
    amplitude of |ij>.
    """

    # === Bell basis and Pauli isomorphism ===

    def bell_state(self, k: int) -> PureState4:
        """
        Bell state |beta_k> = (I x sigma_k)|beta_0>.

        Raises:
            ValueError: If k is not in {0, 1, 2, 3}
        """
        if k not in (0, 1, 2, 3):
            raise ValueError(f"Bell index must be 0..3, got {k}")
        return MaxEntangled(u=PAULI[k]).state()

    def bell_basis(self) -> np.ndarray:
        """Columns are |beta_0>, ..., |beta_3>"""
        return np.column_stack([self.bell_state(k).amplitudes for k in range(4)])

    def to_pauli(self, psi: PureState4) -> PauliCoeffs:
        """a_k = <beta_k|psi>"""
        coefficients = self.bell_basis().conj().T @ psi.amplitudes
        return PauliCoeffs(coefficients=coefficients)

    def from_pauli(self, coeffs: PauliCoeffs) -> PureState4:
        return PureState4(amplitudes=self.bell_basis() @ coeffs.coefficients)

    def pauli_matrix(self, coeffs: PauliCoeffs) -> np.ndarray:
        """A = sum_k a_k sigma_k"""
        return sum(a * sigma for a, sigma in zip(coeffs.coefficients, PAULI))

    def matrix_of(self, psi: PureState4) -> np.ndarray:
        """The matrix A with |psi> = (I x A)|beta_0>"""
        return SQRT2 * psi.amplitudes.reshape(2, 2).T

    def state_from_matrix(self, a: np.ndarray) -> PureState4:
        """(I x A)|beta_0> for A with Tr A^dagger A = 2"""
        return PureState4(amplitudes=np.kron(np.eye(2), a) @ BETA0_AMPLITUDES)

    def transposed_form(self, a: np.ndarray) -> np.ndarray:
        """Amplitudes of (A^T x I)|beta_0>; equal to (I x A)|beta_0>"""
        return np.kron(np.asarray(a).T, np.eye(2)) @ BETA0_AMPLITUDES

    def from_literal(self, literal: StateLiteral) -> PureState4:
        values = literal.as_array()
        if literal.basis == "bell":
            return self.from_pauli(PauliCoeffs(coefficients=values))
        return PureState4(amplitudes=values)

    # === Canonical form ===

    def canonical_state(self, theta: float) -> PureState4:
        """|psi_theta> = cos(theta/2)|00> + sin(theta/2)|11>"""
        return PureState4(
            amplitudes=[math.cos(theta / 2.0), 0.0, 0.0, math.sin(theta / 2.0)]
        )

    def schmidt_canonicalize(self, psi: PureState4) -> SchmidtForm:
        """
        Schmidt canonical form of a pure state.

        With V A U^T = diag(s0, s1) from svd2, (U x V)(I x A)|beta_0> equals
        (I x diag(s0, s1))|beta_0>, so cos(theta/2) = s0/sqrt(2) and
        sin(theta/2) = s1/sqrt(2).

        Returns:
            SchmidtForm with theta in [0, pi/2] and the local unitaries
        """
        u, d, v = svd2(self.matrix_of(psi))
        s0, s1 = float(d[0, 0].real), float(d[1, 1].real)
        theta = min(2.0 * math.atan2(s1, s0), math.pi / 2)
        return SchmidtForm(theta=theta, u=u, v=v)

    def reduced_density_matrix(self, psi: PureState4) -> np.ndarray:
        """Partial trace over the second qubit: Psi Psi^dagger"""
        m = psi.amplitudes.reshape(2, 2)
        return m @ m.conj().T

    def entanglement(self, psi: PureState4, kind: EntanglementKind) -> float:
        """
        Entanglement of a pure state from its reduced density matrix.

        von Neumann: -sum g ln g over the eigenvalues of gamma, equal to
        h(cos theta). Linear: E = 2(1 - Tr gamma^2), equal to sin^2 theta.
        """
        gamma = self.reduced_density_matrix(psi)
        if kind == EntanglementKind.LINEAR:
            purity = float(np.real(np.trace(gamma @ gamma)))
            return max(0.0, 2.0 * (1.0 - purity))
        values = np.clip(eig_hermitian(gamma).as_array(), 0.0, None)
        return float(-sum(g * math.log(g) for g in values if g > 0.0))

    # === Random sampling ===

    def random_pure(self, rng: np.random.Generator) -> PureState4:
        """Haar-random state: 8 standard normals as 4 complex amplitudes, normalized"""
        return PureState4(amplitudes=self.random_pure_batch(rng, 1)[0])

    def random_pure_batch(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Raw (count, 4) array of Haar-random unit vectors"""
        draws = rng.standard_normal((count, 8))
        vectors = draws[:, :4] + 1j * draws[:, 4:]
        return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)

    def random_unitary(self, rng: np.random.Generator, n: int = 2) -> np.ndarray:
        """Haar unitary from the QR decomposition of a complex Ginibre matrix"""
        z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / SQRT2
        q, r = np.linalg.qr(z)
        diag = np.diag(r)
        return q * (diag / np.abs(diag))

    # === Maximally entangled states ===

    def max_entangled_from_unitary(self, u: np.ndarray) -> PureState4:
        """
        |beta> = (I x u)|beta_0>.

        Raises:
            NonUnitaryError: If u deviates from unitarity beyond UNITARY_TOL
        """
        require_unitary(u)
        return MaxEntangled(u=u).state()

    def named_state(self, name: str) -> PureState4:
        """
        Named inputs: bell0..bell3, singlet (= |beta_2>, the singlet up to
        phase), product00 and product-1 = ((i sigma_1 + sigma_3)/sqrt(2))
        in the Pauli picture, a product state.
        """
        key = name.strip().lower()
        if key.startswith("bell") and key[4:].isdigit():
            return self.bell_state(int(key[4:]))
        if key == "singlet":
            return self.bell_state(2)
        if key == "product00":
            return PureState4(amplitudes=[1.0, 0.0, 0.0, 0.0])
        if key == "product-1":
            a = (1j * SIGMA_X + SIGMA_Z) / SQRT2
            return self.state_from_matrix(a)
        raise PreconditionError(
            f"unknown named state {name!r}; expected one of {', '.join(NAMED_STATES)}"
        )

    def named_shift(self, name: str) -> MaxEntangled:
        """Shift states by name: beta0, singlet (beta_2), bell1..bell3"""
        key = name.strip().lower()
        if key in ("beta0", "bell0"):
            return MaxEntangled.beta0()
        if key == "singlet":
            return MaxEntangled(u=PAULI[2])
        if key.startswith("bell") and key[4:] in ("1", "2", "3"):
            return MaxEntangled(u=PAULI[int(key[4:])])
        raise PreconditionError(f"unknown shift state {name!r}")

    def is_maximally_entangled(self, psi: PureState4, tolerance: float = 1e-10) -> bool:
        return abs(self.entanglement(psi, EntanglementKind.LINEAR) - 1.0) <= tolerance


def get_state_service() -> StateService:
    """Get StateService instance for dependency injection."""
    return StateService()
