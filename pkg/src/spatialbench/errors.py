"""Exception types shared across the package."""


class SpatialBenchError(Exception):
    """Base class for all package errors."""


class ShapeError(SpatialBenchError):
    """Invalid or degenerate shape input."""


class GenerationBudgetError(SpatialBenchError):
    """Rejection-sampling budget exhausted while generating an item."""


class RenderError(SpatialBenchError):
    """Scene geometry cannot be rasterized (e.g. out of canvas bounds)."""


class BinarizeTieError(SpatialBenchError):
    """Border-ring majority vote for the background level is tied."""


class NoObjectError(SpatialBenchError):
    """Classifier input has an empty foreground."""


class PredictionError(SpatialBenchError):
    """Prediction set does not line up with the manifest (missing/duplicate/unknown ids)."""


class DataError(SpatialBenchError):
    """Malformed manifest, image, or prediction file."""
