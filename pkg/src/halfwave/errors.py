"""Exception types shared across the package."""


class HalfwaveError(Exception):
    """Base class for all package errors."""


class RepresentationError(HalfwaveError):
    """A field/spectrum was supplied in the wrong representation."""


class GridMismatchError(HalfwaveError):
    """Operands live on different lattices."""


class ParameterError(HalfwaveError):
    """A parameter violates its stated constraint."""


class DivergentIntegralError(HalfwaveError):
    """The requested integral does not converge."""


class BudgetError(HalfwaveError):
    """A size guard (direct-convolution budget) was exceeded."""


class FieldLoadError(HalfwaveError):
    """A stored field container failed validation."""
