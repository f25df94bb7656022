"""Exception types shared across the package.

Every exception derives from :class:`QdeskError` so callers can catch the
package's failures with a single handler.  Most are thin subclasses of
ValueError; the names mirror the failure they report.
"""


class QdeskError(Exception):
    """Base class for all qdesk errors."""


class DimensionMismatch(QdeskError, ValueError):
    """Operands have incompatible dimensions or qubit counts."""


class NonUnitary(QdeskError, ValueError):
    """A matrix expected to be unitary fails the u†u = I check."""


class NonHermitian(QdeskError, ValueError):
    """A matrix expected to be Hermitian fails the h = h† check."""


class TargetOutOfRange(QdeskError, IndexError):
    """A qubit index falls outside the state."""


class DuplicateTarget(QdeskError, ValueError):
    """The same qubit appears twice in a target list."""


class ValueOutOfRange(QdeskError, ValueError):
    """A register value does not fit in the requested width."""


class IndexOutOfRange(QdeskError, IndexError):
    """A bit position falls outside a register layout."""


class WidthOutOfRange(QdeskError, ValueError):
    """A requested register width is outside the supported range."""


class ModulusTooLarge(QdeskError, ValueError):
    """The modulus needs a wider network than the qubit cap allows."""


class InvalidOperand(QdeskError, ValueError):
    """An arithmetic operand violates a network precondition."""


class RegisterTooNarrow(QdeskError, ValueError):
    """An output register cannot hold the largest possible result."""


class NotCoprime(QdeskError, ValueError):
    """The base shares a factor with the modulus."""


class NotComposite(QdeskError, ValueError):
    """The number to factor is even, prime, or a prime power."""


class RetriesExhausted(QdeskError, RuntimeError):
    """All factoring attempts failed.

    Carries the final run record (with its stage log) as ``run``.
    """

    def __init__(self, message, run=None):
        super().__init__(message)
        self.run = run


class BothZero(QdeskError, ValueError):
    """gcd(0, 0) is undefined."""


class InvalidPulse(QdeskError, ValueError):
    """A laser pulse descriptor is inconsistent with the trap system."""


class PhononLeakage(QdeskError, RuntimeError):
    """Population reached the top of the truncated phonon ladder."""


class UncorrectableError(QdeskError, RuntimeError):
    """An error-correction cycle failed to restore the logical state.

    Carries the cycle result (with fidelity diagnostics) as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
