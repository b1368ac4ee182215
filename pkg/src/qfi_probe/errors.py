"""Exception hierarchy.

Input problems derive from :class:`InvalidInput` (a ``ValueError``); numerical
breakdowns derive from :class:`NumericalError` (an ``ArithmeticError``). The CLI
maps the first family to exit code 2 and the second to exit code 3.
"""


class ProbeError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(ProbeError, ValueError):
    pass


class NumericalError(ProbeError, ArithmeticError):
    pass


class NonHermitian(InvalidInput):
    pass


class NotNormalized(InvalidInput):
    pass


class ThetaOutOfRange(InvalidInput):
    pass


class UnsupportedCombination(InvalidInput):
    pass


class ZeroCoefficient(InvalidInput):
    pass


class InconsistentDerivative(NumericalError):
    pass


class ZeroEigenvalue(NumericalError):
    pass


class Divergent(NumericalError):
    pass


class DegenerateDenominator(NumericalError):
    pass


class NoRootFound(NumericalError):
    pass


class SingularSystem(NumericalError):
    pass


class DegenerateOutcome(NumericalError):
    pass
