"""Exception hierarchy shared across the package.

Everything raised on purpose derives from SomosError so callers can catch
domain failures without also swallowing programming errors.  Type-invariant
violations (a digit below 1, an empty interval) raise plain ValueError at
construction time instead.
"""

from __future__ import annotations


class SomosError(Exception):
    """Base class for all domain errors raised by this package."""


class OutOfRangeError(SomosError):
    """Input real is outside the half-open unit interval (0, 1]."""


class NotRepresentableError(SomosError):
    """The rational has no run-length digit expansion in this base.

    For b >= 3 only reals whose base-b expansion uses the digits 0 and b-1
    exclusively are representable; the first offending expansion digit is
    reported in the message.
    """


class GapPointError(SomosError):
    """The point falls between shift branches (b >= 3 only).

    Branch i of the shift map covers ((b-1)/b^i, b/b^i].  For b >= 3 these
    intervals leave gaps; points in a gap have no branch index.
    """


class UnsupportedBaseError(SomosError):
    """Operation is defined only for a restricted set of bases."""


class OutOfDomainError(SomosError):
    """Argument lies outside the series' domain of validity."""


class PrecisionUnreachableError(SomosError):
    """Requested enclosure radius cannot be met within the term budget."""


class ResourceLimitError(SomosError):
    """An explicit work cap (digit count, integer bit budget) was exceeded."""
