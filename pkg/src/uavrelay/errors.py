"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the validity range of a model."""


class InfeasibleError(RuntimeError):
    """A search could not satisfy its constraint inside the configured bounds.

    ``details`` carries the boundary values that proved infeasibility so the
    CLI can serialize them.
    """

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class NoFeasibleDesign(InfeasibleError):
    """Every candidate in a design space violated at least one constraint."""


class NumericalError(RuntimeError):
    """An internal consistency check on a numerical procedure failed."""
