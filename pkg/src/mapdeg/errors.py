"""Exception types shared across the package."""


class MapdegError(Exception):
    """Base class for every error raised by mapdeg."""


class NearZeroVector(MapdegError):
    """A vector was too short to project onto the sphere."""


class DimensionMismatch(MapdegError):
    """Operands live on spheres of different dimensions."""


class InvalidResolution(MapdegError):
    """Requested grid resolution is below the supported minimum."""


class ParseError(MapdegError):
    """Malformed map-expression text.

    Carries the 1-based line and column of the offending token.
    """

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DomainError(MapdegError):
    """Constructor argument outside its legal range."""


class ResolutionExceeded(MapdegError):
    """Adaptive refinement hit the resolution cap without converging.

    Signals an inconclusive computation, never a wrong integer.
    """


class SymbolicNumericMismatch(MapdegError):
    """Structural degree and numeric degree disagree: one of them is buggy."""


class InvalidBlend(MapdegError):
    """A blend's pre-normalization norm came too close to zero."""


class DistanceTooLarge(MapdegError):
    """Sampled sup distance is not below the unit-ball radius (inconclusive)."""


class InvalidHomotopy(MapdegError):
    """The straight-line homotopy pinches through the origin."""


class ConsistencyError(MapdegError):
    """A cross-check that must hold by construction failed."""
