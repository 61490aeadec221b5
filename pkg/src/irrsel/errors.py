"""Exception types shared across the package."""


class IrrselError(Exception):
    """Base class for all errors raised by irrsel."""


class DomainError(IrrselError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class UnboundedQuantileError(DomainError):
    """Quantile requested at probability 0 or 1, where it is infinite."""


class ValidationError(IrrselError, ValueError):
    """A ratings table (or CSV input) violates a structural requirement."""


class DegenerateDataError(IrrselError):
    """Data carry no usable variance (or no latent variance where required)."""


class UnbalancedDataError(IrrselError):
    """Balanced-only estimator called on an unbalanced table; use REML."""


class InfeasibleProbabilityError(DomainError):
    """A joint probability is outside the band allowed by its margins."""


class ConvergenceError(IrrselError):
    """An iterative procedure did not converge within its iteration budget."""


class BootstrapError(IrrselError):
    """Too many bootstrap resamples were unusable to report intervals."""
