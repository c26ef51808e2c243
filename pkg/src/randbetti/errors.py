"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class BettiError(Exception):
    exit_code = 1


class ParameterError(BettiError, ValueError):
    exit_code = 2


class ModeError(ParameterError):
    """An exact-only operation received a float-mode table."""


class OutOfRegimeError(ParameterError):
    """Requested value lies outside the range where the closed formula holds."""


class NotFiniteLengthError(BettiError, ValueError):
    """Hilbert function of the table does not vanish in high degree."""

    exit_code = 4


class CapacityError(BettiError):
    exit_code = 3


class ConeError(BettiError, ValueError):
    exit_code = 4


class NotInSpanError(ConeError):
    pass


class NotInConeError(ConeError):
    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"coefficient at index {index} is negative: {value}")


class HypothesisViolation(BettiError, ValueError):
    exit_code = 5
