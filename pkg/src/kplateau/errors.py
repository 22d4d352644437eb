"""Exception types shared across the package."""


class KPlateauError(Exception):
    """Base class for all package-specific errors."""


class InvalidInput(KPlateauError):
    """Malformed or inconsistent input data."""


class OutOfSection(InvalidInput):
    """Section coordinates fall outside the cross-section."""


class NotClosed(InvalidInput):
    """An operation requiring a closed curve received an open one."""


class CurvesTouch(KPlateauError):
    """Curves are closer than the minimum separation an operation needs."""


class DegenerateProjection(KPlateauError):
    """No generic projection direction found within the retry budget."""


class OffsetTooLarge(KPlateauError):
    """Framing push-off collides with the midline."""


class ProbeConstructionFailed(KPlateauError):
    """A probe loop of the requested class could not be realized."""


class ResolutionError(InvalidInput):
    """A resolution parameter is too coarse for the geometry."""


class GradientUndefined(KPlateauError):
    """Finite differencing hit a non-finite energy value."""


class InitFailed(KPlateauError):
    """Seed mesh construction produced no valid spanning surface."""


class DegenerateMesh(KPlateauError):
    """Mesh quality collapsed and remeshing could not recover it."""


class InitInadmissible(KPlateauError):
    """Initial configuration violates the constraint set."""


class InvariantBroken(KPlateauError):
    """A topological invariant changed during a solve.

    Carries the partial trace so callers can inspect what happened.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class ConfigError(InvalidInput):
    """Scenario file could not be parsed or validated."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
