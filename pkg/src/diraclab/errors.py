"""Exception types shared across the package."""


class DiraclabError(Exception):
    pass


class ChartMismatchError(DiraclabError):
    """Operands live on different charts."""


class DegreeError(DiraclabError):
    """Operation not defined for the given tensor degree(s)."""


class ShapeError(DiraclabError):
    """Inconsistent dimensions in user-supplied data."""


class TransversalityError(DiraclabError):
    """A pointwise transversality condition failed.

    Carries the offending point so reports can name it.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = None if point is None else tuple(float(x) for x in point)


class DomainEscapeError(DiraclabError):
    """A trajectory left the declared admissible neighborhood."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = None if point is None else tuple(float(x) for x in point)


class PreconditionError(DiraclabError):
    """A documented precondition of an operation does not hold."""
