# app/core/exceptions.py
"""
Domain exceptions for the correlated channel toolkit.

Validation failures subclass ValueError so callers that only care about
"bad input" can catch them uniformly. Each error keeps the offending
magnitude as an attribute for diagnostics and CLI error envelopes.
"""
from typing import Optional


class ChannelToolkitError(Exception):
    """Base class for all toolkit errors"""

    code = "TOOLKIT_ERROR"


class ParameterRangeError(ChannelToolkitError, ValueError):
    """A channel or optimization parameter lies outside its admissible range"""

    code = "PARAMETER_RANGE"

    def __init__(self, name: str, value: float, allowed: str):
        self.name = name
        self.value = value
        self.allowed = allowed
        super().__init__(f"{name}={value!r} outside admissible range {allowed}")


class NonHermitianError(ChannelToolkitError, ValueError):
    code = "NON_HERMITIAN"

    def __init__(self, deviation: float, tolerance: float):
        self.deviation = deviation
        self.tolerance = tolerance
        super().__init__(
            f"matrix is not Hermitian: max |M - M^dagger| = {deviation:.3e} "
            f"exceeds tolerance {tolerance:.1e}"
        )


class NonUnitaryError(ChannelToolkitError, ValueError):
    code = "NON_UNITARY"

    def __init__(self, deviation: float, tolerance: float):
        self.deviation = deviation
        self.tolerance = tolerance
        super().__init__(
            f"matrix is not unitary: max |U^dagger U - I| = {deviation:.3e} "
            f"exceeds tolerance {tolerance:.1e}"
        )


class NormalizationError(ChannelToolkitError, ValueError):
    code = "NOT_NORMALIZED"

    def __init__(self, deviation: float, tolerance: float):
        self.deviation = deviation
        self.tolerance = tolerance
        super().__init__(
            f"state is not normalized: | ||psi|| - 1 | = {deviation:.3e} "
            f"exceeds tolerance {tolerance:.1e}"
        )


class NegativeEigenvalueError(ChannelToolkitError, ValueError):
    """Spectrum entry below the clipping window; the matrix is not PSD"""

    code = "NEGATIVE_EIGENVALUE"

    def __init__(self, value: float, tolerance: float):
        self.value = value
        self.tolerance = tolerance
        super().__init__(
            f"eigenvalue {value:.3e} is below -{tolerance:.1e}; matrix is not positive semidefinite"
        )


class InvalidOrderError(ChannelToolkitError, ValueError):
    code = "INVALID_ORDER"

    def __init__(self, order: object, reason: Optional[str] = None):
        self.order = order
        message = f"invalid purity order {order!r}"
        if reason:
            message = f"{message}: {reason}"
        super().__init__(message)


class ComplexRootsError(ChannelToolkitError, ValueError):
    """Raised when a cubic expected to have three real roots does not"""

    code = "COMPLEX_ROOTS"

    def __init__(self, discriminant: float):
        self.discriminant = discriminant
        super().__init__(
            f"cubic has complex roots: depressed discriminant 4p^3+27q^2 = {discriminant:.6e} > 0"
        )


class PreconditionError(ChannelToolkitError, ValueError):
    code = "PRECONDITION"


class UnsupportedMethodError(ChannelToolkitError, ValueError):
    code = "UNSUPPORTED_METHOD"


class ConvergenceError(ChannelToolkitError, ArithmeticError):
    """Eigenpair residual above tolerance after the Jacobi sweeps"""

    code = "NO_CONVERGENCE"

    def __init__(self, residual: float, tolerance: float):
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(
            f"eigenpair residual {residual:.3e} exceeds tolerance {tolerance:.1e}"
        )


class InputParseError(ChannelToolkitError, ValueError):
    """Malformed JSON or YAML given on the command line or in a config file"""

    code = "PARSE_ERROR"

    def __init__(self, source: str, reason: str, line: Optional[int] = None, column: Optional[int] = None):
        self.source = source
        self.reason = reason
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"could not parse {source}{where}: {reason}")
