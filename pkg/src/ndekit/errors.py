"""Exception types shared across the package.

Precondition violations raise :class:`ValueError` (or the subclass below);
numerical failures raise :class:`NumericalError`.  The CLI maps each family
to its own exit code.
"""


class NumericalError(RuntimeError):
    """Quadrature, root finding or fitting failed to reach its tolerance."""


class ConfigError(Exception):
    """A configuration or data file is missing, malformed or inconsistent."""


class NonSingleWellError(ValueError):
    """``V(R) = E`` has more than two roots in the validity range."""
