"""Exception types raised across the pipeline."""


class PipelineError(Exception):
    """Base class for all errors raised by this package."""


class UnreadableFile(PipelineError):
    """Input file is missing or cannot be decoded."""


class UnsupportedBitDepth(PipelineError):
    """Image channels are not 8-bit."""


class DimensionMismatch(PipelineError):
    """Mask dimensions do not match the image."""


class InvalidBinCount(PipelineError):
    """Requested gray-level count is below 2."""


class EmptyGrid(PipelineError):
    """No tile passed the mask-coverage gate."""


class NoValidPairs(PipelineError):
    """Tile is too fragmented to contain a single co-occurring pixel pair."""


class TooFewPoints(PipelineError):
    """Fewer data points than requested clusters."""


class OutOfRangeScore(PipelineError):
    """Annotation score outside the grading scheme bounds."""


class UnknownTile(PipelineError):
    """Annotation references a tile that was never sampled."""


class MissingClassScore(PipelineError):
    """A class has a cluster label but no class-level grade."""


class ConfigInvalid(PipelineError):
    """Run configuration failed validation."""


class StageInputMissing(PipelineError):
    """A stage's input artifact does not exist."""
