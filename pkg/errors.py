"""
Error hierarchy for the review sentiment toolkit.
Every error carries the process exit code the CLI reports for it.
"""
from typing import Optional


class ReviewSentimentError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ConfigError(ReviewSentimentError):
    """Invalid or missing configuration."""

    exit_code = 2


class DataError(ReviewSentimentError):
    """Input data could not be used."""

    exit_code = 3


class ExtractionError(DataError):
    """An HTML page could not be parsed at all."""


class BubbleDecodeError(DataError):
    """A bubble rating class attribute has no usable score suffix."""

    def __init__(self, attribute: str):
        self.attribute = attribute
        super().__init__(f"Cannot decode bubble score from class attribute {attribute!r}")


class CorpusFormatError(DataError):
    """A corpus CSV row is malformed."""

    def __init__(self, message: str, row_number: Optional[int] = None, path: Optional[str] = None):
        self.row_number = row_number
        self.path = path
        location = ""
        if path is not None:
            location += f"{path}: "
        if row_number is not None:
            location += f"row {row_number}: "
        super().__init__(location + message)


class RatingValidationError(CorpusFormatError):
    """A rating is outside 1..5."""


class SplitError(DataError):
    """A train/test split is infeasible."""


class VectorizationError(DataError):
    """Vocabulary or term-weight inputs are invalid."""


class OversampleError(DataError):
    """The minority set cannot support the requested oversampling."""


class DimensionMismatchError(DataError):
    """Two vectors that must share a dimension do not."""


class TrainingDataError(DataError):
    """Training data cannot produce a binary classifier."""


class EvaluationError(DataError):
    """Predictions and truths cannot be scored."""


class ConvergenceError(ReviewSentimentError):
    """The solver hit its iteration cap and the run treats that as fatal."""

    exit_code = 4


class ModelBundleError(DataError):
    """A model bundle cannot be used."""


class BundleVersionError(ModelBundleError):
    """The bundle was written by an unknown format version."""


class FingerprintMismatchError(ModelBundleError):
    """The preprocessing environment differs from the one the model was trained with."""


class CorruptBundleError(ModelBundleError):
    """The bundle file is truncated or not a bundle at all."""


class StageError(ReviewSentimentError):
    """Wraps an error raised inside one pipeline stage."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 1)
        super().__init__(f"{stage}: {cause}")
