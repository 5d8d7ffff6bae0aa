"""Exception types shared across the package."""


class CompclassError(Exception):
    """Base class for all package errors."""


class ValidationError(CompclassError, ValueError):
    """Invalid input: bad shapes, out-of-range parameters, malformed files."""


class DesignInfeasibleError(CompclassError, ValueError):
    """A measurement design cannot be built for the requested target."""
