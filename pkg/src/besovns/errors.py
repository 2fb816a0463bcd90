"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid grid, truncation, index or experiment configuration."""


class DataError(ValueError):
    """Field data violates a contract (symmetry, divergence, schema)."""


class NonConvergenceError(RuntimeError):
    """Picard inner iteration hit its iteration cap.

    Carries the last relative change and implicit-equation residual so the
    caller can tell how far from a fixed point the iteration stalled
    (typically a sign that the time step is too large for the current field).
    """

    def __init__(self, message, last_change=None, last_residual=None):
        super().__init__(message)
        self.last_change = last_change
        self.last_residual = last_residual
