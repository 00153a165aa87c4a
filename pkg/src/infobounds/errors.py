"""Exception hierarchy shared by every module.

Each class maps onto one CLI exit status (see :mod:`infobounds.cli`).
"""


class InfoBoundsError(Exception):
    """Base class for all library errors."""


class InvalidArgument(InfoBoundsError, ValueError):
    """A parameter is outside its admissible range or shapes disagree."""


class InvalidPMF(InvalidArgument):
    """Masses are negative or do not sum to one within tolerance."""


class NotMajorized(InfoBoundsError):
    """A doubly-stochastic witness was requested for a non-majorizing pair."""


class NotApplicable(InfoBoundsError):
    """A bound cannot be evaluated for this generator or instance."""


class PreconditionError(NotApplicable):
    """The decision rule does not satisfy a bound's structural hypothesis."""


class Infeasible(InfoBoundsError):
    """A monotone inversion has no solution on its search interval."""


class EnumerationLimit(InfoBoundsError):
    """An exhaustive oracle would exceed its enumeration budget."""
