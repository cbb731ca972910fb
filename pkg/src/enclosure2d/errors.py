"""Exception hierarchy shared by all modules.

The CLI maps these onto process exit codes: ConfigError -> 2,
ResolutionError -> 3, SolverError -> 4, ReconstructionError -> 5.
"""


class Enclosure2dError(Exception):
    """Base class for all package errors."""


class GeometryError(Enclosure2dError):
    """Invalid or degenerate geometric input."""


class DomainError(Enclosure2dError):
    """Argument outside the mathematical domain of a function."""


class ConfigError(Enclosure2dError):
    """Malformed or out-of-range configuration input."""


class ResolutionError(Enclosure2dError):
    """A grid or quadrature rule is too coarse for the requested computation."""


class SolverError(Enclosure2dError):
    """Forward solve failed or is untrustworthy (e.g. near-resonant system)."""


class NearFieldError(Enclosure2dError):
    """Evaluation point too close to the obstacle boundary for the quadrature."""


class ReconstructionError(Enclosure2dError):
    """Too little usable data to produce a reconstruction."""
