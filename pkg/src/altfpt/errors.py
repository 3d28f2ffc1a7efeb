"""Exception types raised by altfpt."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class PreconditionError(RuntimeError):
    """A sampler was invoked where its target distribution is degenerate."""


class HypothesisError(ValueError):
    """A bound was requested outside the hypothesis under which it holds."""


class RejectionLimitError(RuntimeError):
    """An acceptance-rejection loop exceeded its iteration cap."""
