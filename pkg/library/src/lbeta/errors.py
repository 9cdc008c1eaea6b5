"""
Exceptions raised by the lbeta library.

Every exception carries the process exit code the `lbeta` command uses when the
exception escapes a subcommand. Precondition failures are also `ValueError`s
and numeric failures are also `ArithmeticError`s, so callers that do not care
about the library hierarchy can catch the builtin types.
"""

from typing import Optional


class LbetaError(Exception):
    """Base class for all lbeta errors"""

    exit_code = 1


###
# Preconditions (exit code 2)
###


class PreconditionError(LbetaError, ValueError):
    """An input violates the documented precondition of an operation"""

    exit_code = 2


class OutOfRange(PreconditionError):
    """A parameter lies outside its admissible range"""


class NegativeInput(PreconditionError):
    """A point of the half line [0, inf) was expected"""


class NonFinite(PreconditionError):
    """A finite real was expected"""


class OutOfUnitInterval(PreconditionError):
    """A point of [0, 1) was expected"""


class InvalidDegree(PreconditionError):
    """A polynomial degree is too small"""


class InvalidDigits(PreconditionError):
    """A digit word contains a symbol outside its alphabet"""


class AlphabetMismatch(InvalidDigits):
    """Two words that must share an alphabet do not"""


class NotLsm(PreconditionError):
    """A word is not lexicographically shift maximal"""


###
# Numeric failures (exit code 4)
###


class NumericError(LbetaError, ArithmeticError):
    """A numeric procedure could not produce a reliable answer"""

    exit_code = 4


class NoSignChange(NumericError):
    """The function has the same sign at both ends of a bracket"""


class NonConvergence(NumericError):
    """An iterative solver hit its iteration cap"""


class PrefixTooShort(NumericError):
    """A digit prefix long enough to reach the requested tolerance is too long"""


class EmptyInterval(NumericError):
    """No parameter value realizes the requested word"""


class DivisionNearZero(NumericError):
    """
    A continued fraction evaluation hit a pole.

    Attributes:
        level: 1-based index of the partial quotient whose tail vanished
    """

    def __init__(self, message: str, level: Optional[int] = None):
        super().__init__(message)
        self.level = level
