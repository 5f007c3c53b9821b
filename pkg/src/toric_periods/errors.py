"""Exception types.

Every error carries a ``kind`` string (the class name) used in JSON reports.
``PrecisionError`` subclasses map to CLI exit code 2, the rest to exit code 1.
"""


class ToricPeriodError(Exception):
    """Base class for all library errors."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class InputError(ToricPeriodError):
    """The request itself is invalid."""


class PrecisionError(ToricPeriodError):
    """The computation needs more precision, a higher level or a larger bound."""


# padic-core
class PrimeTwoUnsupported(InputError):
    pass


class NotPrime(InputError):
    pass


class NotEisenstein(InputError):
    pass


class PrecisionExhausted(PrecisionError):
    pass


class DivisionByNearZero(PrecisionError):
    pass


class UnknownSubfield(InputError):
    pass


class LevelExceedsPrecision(PrecisionError):
    pass


class LogFailure(PrecisionError):
    pass


# etale-hermitian
class DimensionMismatch(InputError):
    pass


# characters-epsilon
class LevelTooLow(PrecisionError):
    pass


class ConductorUncertified(PrecisionError):
    pass


class NonDualInput(InputError):
    pass


class NotASign(InputError):
    pass


class SplittingCharacterInvalid(InputError):
    pass


class InvalidCharacter(InputError):
    pass


# dichotomy
class LevelMismatch(InputError):
    pass


class LiftVanishes(InputError):
    pass


# global
class EvenPlaceRamifiedCharacter(InputError):
    pass


class ParityObstruction(InputError):
    pass


class SearchExhausted(PrecisionError):
    pass


class BadSetIncomplete(InputError):
    pass


class LValueMissing(InputError):
    pass


class NotSelfDual(InputError):
    pass


class ConvergenceFailure(PrecisionError):
    pass


class UnsupportedField(InputError):
    pass


# cli
class SchemaError(InputError):
    def __init__(self, message: str, pointer: str = ""):
        super().__init__(message)
        self.pointer = pointer
