# app/numerics/linalg.py
"""
Small dense complex linear algebra for the channel toolkit.

Key Responsibilities:
- Hermitian eigenvalues by cyclic Jacobi rotations (matrices up to 4x4)
- Stacked spectra for batched scans
- 2x2 singular value decomposition in the V a U^T = D convention
- Real cubic roots by the trigonometric (Viete) method with a Newton polish
- Kronecker products, partial traces and Hermiticity/unitarity predicates
"""
import math
from functools import reduce
from typing import List, Tuple

import numpy as np

from app.core.config import settings
from app.core.exceptions import (
    ComplexRootsError,
    ConvergenceError,
    NonHermitianError,
    NonUnitaryError,
)
from app.core.logging_config import get_logger
from app.schemas.spectrum import Spectrum

logger = get_logger(__name__)

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z)

MAX_JACOBI_SWEEPS = 64
RESIDUAL_TOL = 1e-10


def as_cmatrix(m) -> np.ndarray:
    """Coerce to a square complex matrix with finite entries"""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def hermitian_deviation(m) -> float:
    """Entry-wise max |M - M^dagger|"""
    arr = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(arr - dagger(arr)))) if arr.size else 0.0


def unitary_deviation(u) -> float:
    """Entry-wise max |U^dagger U - I|"""
    arr = as_cmatrix(u)
    return float(np.max(np.abs(dagger(arr) @ arr - np.eye(arr.shape[0]))))


def require_unitary(u, tolerance: float = None) -> np.ndarray:
    tolerance = settings.UNITARY_TOL if tolerance is None else tolerance
    arr = as_cmatrix(u)
    deviation = unitary_deviation(arr)
    if deviation > tolerance:
        raise NonUnitaryError(deviation, tolerance)
    return arr


def kron(*matrices: np.ndarray) -> np.ndarray:
    return reduce(np.kron, matrices)


def partial_trace(rho: np.ndarray, keep: int) -> np.ndarray:
    """Trace out one qubit of a two-qubit operator; keep=0 keeps the first factor"""
    r4 = np.asarray(rho, dtype=complex).reshape(rho.shape[:-2] + (2, 2, 2, 2))
    if keep == 0:
        return np.einsum("...ikjk->...ij", r4)
    if keep == 1:
        return np.einsum("...ikil->...kl", r4)
    raise ValueError(f"keep must be 0 or 1, got {keep}")


def _off_diagonal_mass(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def _rotation(n: int, p: int, q: int, a: np.ndarray) -> np.ndarray:
    """Unitary J with (J^dagger a J)[p, q] = 0"""
    apq = a[p, q]
    r = abs(apq)
    phase = apq / r
    tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.hypot(1.0, tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c

    j = np.eye(n, dtype=complex)
    j[p, p] = c
    j[p, q] = s
    j[q, p] = -s * np.conj(phase)
    j[q, q] = c * np.conj(phase)
    return j


def jacobi_eigh(m, tolerance: float = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cyclic Jacobi diagonalization of a Hermitian matrix.

    Each rotation first removes the phase of the pivot, then applies the
    real symmetric rotation that annihilates it. Sweeps continue until the
    off-diagonal Frobenius mass drops below JACOBI_OFFDIAG_TOL (relative to
    max(1, ||M||_F)).

    Args:
        m: Square complex matrix, Hermitian within HERMITIAN_TOL
        tolerance: Override for the Hermiticity check

    Returns:
        (eigenvalues, eigenvectors) sorted descending; eigenvectors are columns

    Raises:
        NonHermitianError: If max |M - M^dagger| exceeds the tolerance
        ConvergenceError: If an eigenpair residual exceeds 1e-10
    """
    tolerance = settings.HERMITIAN_TOL if tolerance is None else tolerance
    original = as_cmatrix(m)
    deviation = hermitian_deviation(original)
    if deviation > tolerance:
        raise NonHermitianError(deviation, tolerance)

    a = 0.5 * (original + dagger(original))
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    threshold = settings.JACOBI_OFFDIAG_TOL * scale

    for sweep in range(MAX_JACOBI_SWEEPS):
        if _off_diagonal_mass(a) < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < 1e-300:
                    continue
                j = _rotation(n, p, q, a)
                a = dagger(j) @ a @ j
                v = v @ j
    else:
        logger.warning(
            "Jacobi sweeps exhausted before off-diagonal threshold",
            extra={
                "extra_fields": {
                    "operation": "jacobi_eigh",
                    "off_diagonal": _off_diagonal_mass(a),
                    "threshold": threshold,
                }
            },
        )

    values = np.real(np.diag(a)).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = v[:, order]

    residual = float(np.max(np.linalg.norm(original @ vectors - vectors * values, axis=0)))
    if residual > RESIDUAL_TOL * scale:
        raise ConvergenceError(residual, RESIDUAL_TOL * scale)
    return values, vectors


def eig_hermitian(m, tolerance: float = None) -> Spectrum:
    """Eigenvalues of a Hermitian matrix, descending, ties in original order"""
    values, _ = jacobi_eigh(m, tolerance)
    return Spectrum(values=tuple(values))


def spectra_batch(stack: np.ndarray) -> np.ndarray:
    """Descending spectra of a stack of Hermitian matrices, shape (..., n)"""
    return np.linalg.eigvalsh(np.asarray(stack, dtype=complex))[..., ::-1]


def svd2(a) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Singular value decomposition of a 2x2 complex matrix.

    Returns unitaries U, V and D = diag(s0, s1), s0 >= s1 >= 0, with
    V @ a @ U.T == D, so that a == V^dagger D conj(U).
    """
    arr = as_cmatrix(a)
    if arr.shape != (2, 2):
        raise ValueError(f"svd2 expects a 2x2 matrix, got shape {arr.shape}")
    x, s, yh = np.linalg.svd(arr)
    v = dagger(x)
    u = np.conj(yh)
    d = np.diag(s).astype(complex)
    return u, d, v


def _polyval(coefficients: Tuple[float, float, float, float], x: float) -> float:
    c3, c2, c1, c0 = coefficients
    return ((c3 * x + c2) * x + c1) * x + c0


def _polish(coefficients: Tuple[float, float, float, float], x: float) -> float:
    c3, c2, c1, _ = coefficients
    fx = _polyval(coefficients, x)
    slope = (3.0 * c3 * x + 2.0 * c2) * x + c1
    if slope == 0.0:
        return x
    candidate = x - fx / slope
    # a polish step never travels; large steps happen only near double roots
    if abs(candidate - x) > 1e-6 * max(1.0, abs(x)):
        return x
    if abs(_polyval(coefficients, candidate)) <= abs(fx):
        return candidate
    return x


def cubic_roots(c3: float, c2: float, c1: float, c0: float) -> List[float]:
    """
    Three real roots of c3 x^3 + c2 x^2 + c1 x + c0, sorted descending.

    Uses the depressed cubic t^3 + p t + q with the trigonometric form
    t_k = 2 sqrt(-p/3) cos(acos(3q/(2p) sqrt(-3/p))/3 - 2 pi k/3), then one
    Newton step per root.

    Raises:
        ValueError: If c3 is zero
        ComplexRootsError: If the discriminant shows a complex pair
    """
    if c3 == 0:
        raise ValueError("leading coefficient must be non-zero")
    coefficients = (float(c3), float(c2), float(c1), float(c0))
    b, c, d = c2 / c3, c1 / c3, c0 / c3
    shift = -b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d

    discriminant = 4.0 * p ** 3 + 27.0 * q ** 2
    scale = max(abs(4.0 * p ** 3), 27.0 * q ** 2)
    if discriminant > 1e-9 * scale and discriminant > 0.0:
        raise ComplexRootsError(discriminant)

    if p >= 0.0:
        # triple root up to rounding
        roots = [shift + float(np.cbrt(-q))] * 3
    else:
        m = 2.0 * math.sqrt(-p / 3.0)
        argument = 3.0 * q / (2.0 * p) * math.sqrt(-3.0 / p)
        angle = math.acos(min(1.0, max(-1.0, argument))) / 3.0
        roots = [shift + m * math.cos(angle - 2.0 * math.pi * k / 3.0) for k in range(3)]

    polished = [_polish(coefficients, x) for x in roots]
    return sorted(polished, reverse=True)
