"""Exception types shared across the toolkit."""


class GaitBenchError(Exception):
    """Base class for every error raised by this package."""


class MalformedAsf(GaitBenchError):
    """ASF document is incomplete or contains unusable fields."""


class MalformedAmc(GaitBenchError):
    """AMC document violates frame numbering or channel arity."""


class HeterogeneousTopology(GaitBenchError):
    """Skeletons passed to an averaging operation differ in structure."""


class UnboundMotion(GaitBenchError):
    """Motion channels do not match the skeleton they are applied to."""


class DimensionMismatch(GaitBenchError):
    """Operands have incompatible dimensionality."""


class EmptySequence(GaitBenchError):
    """A time series operation received an empty sequence."""


class RepresentationMismatch(GaitBenchError):
    """A feature extractor received a sample in the wrong representation."""


class DegenerateSample(GaitBenchError):
    """Sample has fewer frames than a statistic requires."""


class LayoutMismatch(GaitBenchError):
    """Templates being compared do not share a layout."""


class TooFewClasses(GaitBenchError):
    """Labeled data does not contain enough classes."""


class DegenerateScatter(GaitBenchError):
    """Scatter has no positive spectrum (all samples identical)."""


class SingularWithinScatter(GaitBenchError):
    """Within-class scatter is singular even after regularization."""


class InsufficientClasses(GaitBenchError):
    """Database does not have enough identity classes for the setup."""


class EmptyGallery(GaitBenchError):
    """Classification was attempted against an empty gallery."""
