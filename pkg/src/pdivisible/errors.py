"""Exception hierarchy shared by all modules."""


class PdivError(Exception):
    """Base class for every error raised by this package."""


class PrecisionError(PdivError):
    """Working precision is too small for an exact answer.

    ``suggested_N`` carries a precision that should be sufficient when it
    can be estimated.
    """

    def __init__(self, message, suggested_N=None):
        super().__init__(message)
        self.suggested_N = suggested_N


class RingMismatchError(PdivError, ValueError):
    pass


class NotAUnitError(PdivError, ArithmeticError):
    pass


class PresentationError(PdivError, ValueError):
    """Malformed or invalid input data (presentations, polygons, JSON)."""


class BudgetError(PdivError):
    """A configured work bound would be exceeded."""


class CycleNotFoundError(PdivError):
    pass


class InternalCheckError(PdivError, AssertionError):
    """A proven identity failed to hold; always an implementation bug."""
