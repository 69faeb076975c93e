"""Exception hierarchy shared by all modules."""


class PermSurvError(ValueError):
    """Base class for errors raised by permsurv."""


class DataError(PermSurvError):
    """Input data is malformed or violates a dataset invariant."""


class NoEventsError(PermSurvError):
    """An operation needing at least one observed event received none."""


class DegenerateError(PermSurvError):
    """A variance or information quantity is zero, so no standardization is possible."""


class NotEstimableError(PermSurvError):
    """A requested quantity lies outside the support of the data."""


class EnumerationCapError(PermSurvError):
    """Exact enumeration would exceed the configured cap."""
