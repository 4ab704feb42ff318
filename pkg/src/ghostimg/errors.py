"""Exception hierarchy for ghostimg."""


class GhostError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(GhostError, ValueError):
    pass


class NonPositiveParameter(ConfigError):
    pass


class UndersampledGrid(ConfigError):
    pass


class InvalidOrder(ConfigError):
    pass


class GeometryTooLargeForGrid(GhostError, ValueError):
    pass


class MalformedFile(GhostError, ValueError):
    pass


class VersionMismatch(MalformedFile):
    pass


class DimensionMismatch(GhostError, ValueError):
    pass


class UnequalArms(GhostError, ValueError):
    pass


class InsufficientSamples(GhostError, ValueError):
    pass


class AliasedPropagation(GhostError, ValueError):
    pass


class ZeroMeanPixel(GhostError, ValueError):
    pass


class ZeroMean(GhostError, ValueError):
    pass


class LengthMismatch(GhostError, ValueError):
    pass


class AllZeroImage(GhostError, ValueError):
    pass


class PassOrderViolation(GhostError, RuntimeError):
    pass


class IncompatibleAccumulators(GhostError, ValueError):
    pass


class EmptyEnsemble(GhostError, ValueError):
    pass


class EmptyRegion(GhostError, ValueError):
    pass


class PeakNotFound(GhostError, RuntimeError):
    pass


class TooFewFrames(GhostError, ValueError):
    pass


class ZeroVariance(GhostError, ValueError):
    pass


class UnknownKey(ConfigError):
    pass


class BadUnit(ConfigError):
    pass


class MissingRequired(ConfigError):
    pass


class RangeError(ConfigError):
    pass


class StageError(GhostError, RuntimeError):
    """Wraps a failure inside a scenario run with the name of the failing stage."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {type(cause).__name__}: {cause}")


class InvalidGeometry(GhostError, ValueError):
    pass
