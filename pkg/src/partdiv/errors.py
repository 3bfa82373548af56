"""Exception types raised by partdiv.

Every error derives from :class:`DivisibilityError`.  Input-shape problems
(bad weights, out-of-range points) additionally derive from ``ValueError``
so callers that only know about the builtin hierarchy still catch them.
"""


class DivisibilityError(Exception):
    """Base class for all partdiv errors."""


class InvalidMeasure(DivisibilityError, ValueError):
    pass


class NegativeWeight(InvalidMeasure):
    pass


class MassNotOne(InvalidMeasure):
    pass


class PointOutOfRange(InvalidMeasure):
    pass


class GroupMismatch(DivisibilityError, ValueError):
    pass


class SupportOverflow(DivisibilityError, OverflowError):
    pass


class OrderTooHigh(DivisibilityError, ValueError):
    pass


class BadGridSize(DivisibilityError, ValueError):
    pass


class OrderUndetermined(DivisibilityError):
    pass


class HasZeros(DivisibilityError):
    pass


class NoConvergence(DivisibilityError):
    pass


class NotAdmissible(DivisibilityError):
    pass


class UnsupportedGroup(DivisibilityError):
    pass


class Inconclusive(DivisibilityError):
    """Raised when a membership test lands between the accept and reject tolerances.

    The full :class:`~partdiv.fractional.MembershipVerdict` is kept on
    ``self.verdict`` for diagnostics.
    """

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class NotAMember(DivisibilityError):
    pass


class NoZeros(DivisibilityError):
    pass


class WrongGroup(DivisibilityError, ValueError):
    pass


class SearchTooLarge(DivisibilityError, ValueError):
    pass


class ZeroCharacterValue(DivisibilityError):
    pass
