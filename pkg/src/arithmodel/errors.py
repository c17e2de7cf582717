"""Exception hierarchy. Each class carries the CLI exit code for its error family."""


class ArithModelError(Exception):
    exit_code = 1


class RationalInput(ArithModelError):
    exit_code = 10

    def __init__(self, level, msg=None):
        self.level = level
        super().__init__(msg or f"input is rational: alpha_{level} enclosure contains 0")


class PrecisionExhausted(ArithModelError):
    exit_code = 11

    def __init__(self, last_index, msg=None):
        self.last_index = last_index
        super().__init__(msg or f"digit ambiguous at current precision; last certified index {last_index}")


class HalfIntegerAmbiguity(ArithModelError):
    exit_code = 12

    def __init__(self, level, msg=None):
        self.level = level
        super().__init__(msg or f"1/alpha_{level} enclosure straddles a half-integer")


class DigitsExhausted(ArithModelError):
    exit_code = 13


class DigitOverflow(DigitsExhausted):
    """A growth-law digit is too large to represent even through its logarithm."""


class DepthExhausted(ArithModelError):
    exit_code = 14


class NonPositiveInput(ArithModelError):
    exit_code = 15


class DomainViolation(ArithModelError):
    exit_code = 16


class LevelMismatch(ArithModelError):
    exit_code = 17


class ResolutionTooCoarse(ArithModelError):
    exit_code = 18


class DivergentBrjuno(ArithModelError):
    exit_code = 19


class WrongLevel(ArithModelError):
    exit_code = 20


class EmptyProfile(ArithModelError):
    exit_code = 21


class ConfigError(ArithModelError):
    exit_code = 2
