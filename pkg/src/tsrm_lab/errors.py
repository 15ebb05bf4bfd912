"""Exception types raised across the package."""


class FixedByInitialCondition(ValueError):
    """Rectangle filling was requested for a boundary row (h in {-1, 0}).

    Those rows carry no coin: their filling is dictated by the initial
    zigzag profile, and the column left of the origin has no line at all.
    """


class NotACoinTime(ValueError):
    """Profile surgery was requested at a step where no coin is pending."""


class Malformed(ValueError):
    """A profile fails the admissibility checks for a modified profile."""


class OutsideInterval(ValueError):
    """A position query lies outside the admissible interval of a profile."""


class Refused(ValueError):
    """An exact enumeration request is too deep to finish in reasonable time."""


class DomainError(ValueError):
    """A special-function argument lies outside the supported domain."""


class TailError(ArithmeticError):
    """A quadrature tail bound exceeds the requested tolerance."""


class UsageError(ValueError):
    """A command line was malformed or asked for an unknown experiment."""
