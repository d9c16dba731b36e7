"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class DegenerateEstimateError(DomainError):
    """An estimator's formula divides by zero on the given data (e.g. tied order statistics)."""


class AdmissibilityWarning(UserWarning):
    """The truncation level violates the growth condition the asymptotic theory assumes."""
