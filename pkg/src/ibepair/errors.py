"""Exception hierarchy shared by every ibepair module."""


class IbePairError(Exception):
    """Base class for all library errors."""


class FieldMismatchError(IbePairError, ValueError):
    """Operands belong to different fields."""


class SearchBudgetExceeded(IbePairError):
    """A randomized search (prime generation, hashing retries) gave up."""

    def __init__(self, what, budget, tried):
        super().__init__(f"{what}: no result after {tried} of {budget} allowed attempts")
        self.what = what
        self.budget = budget
        self.tried = tried


class PointError(IbePairError, ValueError):
    """A point is malformed or does not lie on the curve."""


class DegenerateHashError(IbePairError):
    """Cofactor clearing sent a hashed point to infinity."""


class MillerCollisionError(IbePairError, ArithmeticError):
    """A Miller-loop line or vertical vanished at the evaluation point."""


class DecodeError(IbePairError, ValueError):
    """Bytes or text could not be parsed.

    ``offset`` is a byte offset for binary formats, ``line`` a 1-based line
    number for text formats; either may be None.
    """

    def __init__(self, message, *, offset=None, line=None):
        where = ""
        if offset is not None:
            where = f" at offset {offset}"
        elif line is not None:
            where = f" on line {line}"
        super().__init__(message + where)
        self.offset = offset
        self.line = line


class ParameterError(IbePairError, ValueError):
    """System parameters violate a structural constraint."""


class MessageLengthError(IbePairError, ValueError):
    """A message does not fit the mode it was submitted to."""


class AuthenticationError(IbePairError):
    """A MAC tag did not verify; no plaintext is released."""


class KeyVerificationError(IbePairError):
    """An extracted private key failed the pairing consistency check."""


class ProtocolError(IbePairError):
    """A peer sent a frame that violates the wire protocol."""


class StateError(IbePairError):
    """An operation was attempted in a device state that forbids it."""


class EntropyExhausted(IbePairError):
    """A finite test-vector entropy source ran dry."""
