"""Exception types shared across the package."""


class DomainError(ValueError):
    """A point lies outside the domain of a disk map (pole, |z| >= 1, ...)."""


class PreconditionError(ValueError):
    """Inputs violate a documented precondition (length mismatch, ordering, ...)."""


class UnsupportedParameterError(ValueError):
    """A parameter value outside the supported set, e.g. p != 2 for exact bounds."""


class ExperimentAssertionError(AssertionError):
    """A checked inequality failed inside an experiment; carries the offending row."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row
