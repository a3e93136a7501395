"""Exception hierarchy shared by all motionkit modules."""


class MotionKitError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(MotionKitError):
    """Input document violates the expected structure (missing/extra field, wrong type)."""


class ReferenceError(SchemaError):  # noqa: A001 - mirrors the schema contract name
    """An id (agent, lane, successor, neighbor) does not resolve within the scenario."""


class GeometryError(MotionKitError):
    """Geometric invariant violated: non-monotonic time steps, degenerate centerline."""


class InvalidAnchor(MotionKitError):
    """The requested anchor step is invalid or out of range."""


class InsufficientPoints(MotionKitError):
    """Fewer than two valid points are available in the requested window."""


class NegativeSpeed(MotionKitError):
    """A speed value is negative where a magnitude is required."""


class CapError(MotionKitError):
    """A guideline book lists more than the allowed number of entries per type."""


class CoverageError(MotionKitError):
    """A guideline book leaves a behavior unlisted without declaring a default."""


class UnknownScenarioType(MotionKitError):
    """Lookup requested for a scenario type absent from the guideline book."""


class EmptyClass(MotionKitError):
    """The sampler was asked to draw from a class with zero rows."""


class NoValidOverlap(MotionKitError):
    """Ground truth and prediction share no jointly valid step."""


class NonPositiveSigma(MotionKitError):
    """A Gaussian scale parameter is zero or negative."""


class InvalidSpec(MotionKitError):
    """A synthetic-trajectory spec has out-of-range or inconsistent parameters."""


class ConfigError(MotionKitError):
    """A configuration file or flag value violates a parameter invariant."""
