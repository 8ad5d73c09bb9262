"""Exception hierarchy.

Validation problems derive from :class:`ValueError`, numerical failures from
:class:`ArithmeticError`, so callers that do not care about the details can
catch the builtin families.
"""


class MorreyError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MorreyError, ValueError):
    """A parameter lies outside the domain of an operation."""


class NotInSpace(DomainError):
    """The function has infinite (centered) Morrey norm."""


class DivergentAtOrigin(NotInSpace):
    """``|f|^p r^(d-1)`` is not integrable at the origin."""


class MismatchedExponents(DomainError):
    """Two overlapping pieces carry different power exponents."""


class ZeroVector(DomainError):
    """A quotient received the zero function."""


class IdenticalInputs(DomainError):
    """``x - y`` vanishes (to working precision) in a Dunkl-Williams quotient."""


class NumericalFailure(MorreyError, ArithmeticError):
    """Base class for failures of the floating point machinery."""


class NumericalOverflow(NumericalFailure):
    pass


class ToleranceNotMet(NumericalFailure):
    pass
