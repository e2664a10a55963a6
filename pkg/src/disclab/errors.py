"""Exception types shared across the package.

Exit-code mapping for the CLI lives in disclab.cli.
"""


class ParameterError(ValueError):
    """A parameter violates a documented invariant (e.g. N*gamma >= 1)."""


class DomainError(ValueError):
    """A point or threshold falls outside the geometric domain."""


class MeshError(ValueError):
    """Mesh construction or resolution failure (never silently extrapolate)."""


class InsufficientDataError(RuntimeError):
    """Too few usable data points for a requested fit."""


class NumericalError(RuntimeError):
    """A numerical routine failed its own consistency check (reported, never silent)."""
