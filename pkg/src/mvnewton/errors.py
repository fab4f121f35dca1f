"""Exception types shared across the package."""


class InterpolationError(Exception):
    """Base class for numerical failures (singular systems, bad nodes, ...)."""


class SingularMatrixError(InterpolationError):
    """A linear system was singular to working tolerance."""


class SizeLimitError(InterpolationError):
    """A requested problem exceeds a configured size guard."""


class NodeError(InterpolationError):
    """A node family violates its invariants (duplicates, degenerate map)."""


class NonFiniteSampleError(InterpolationError):
    """A sampled function value was NaN or infinite."""
