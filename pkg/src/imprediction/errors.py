"""Exception types shared across the package."""


class ParameterDomainError(ValueError):
    """A parameter or argument lies outside its admissible domain."""


class NumericalFailure(RuntimeError):
    """A numerical routine failed; ``diagnostics`` carries the offending inputs."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class SolverConvergenceError(NumericalFailure):
    """Root bracketing or bisection did not converge."""
