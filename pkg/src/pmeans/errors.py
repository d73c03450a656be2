class NoDensityError(ValueError):
    """Raised when a density is requested from an atomic measure."""


class SingularPointError(ValueError):
    """Derivative requested where the potential is not differentiable."""


class DegenerateLimitError(ValueError):
    """Zero-temperature limit weights are undefined (nu(x') >= 1)."""


class StepSizeError(RuntimeError):
    """Euler step too coarse for the drift of the SDE variant."""


class ConfigError(ValueError):
    """Invalid run configuration."""
