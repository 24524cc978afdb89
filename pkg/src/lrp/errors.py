"""Exception hierarchy shared by all lrp modules."""


class LrpError(Exception):
    """Base class for all errors raised by this package."""


class ImageTooSmall(LrpError):
    """Image has fewer than 3 rows or columns, so no 3x3 window exists."""


class MethodMismatch(LrpError):
    """Two descriptors use different binarization methods."""


class LengthMismatch(LrpError):
    """Two descriptors have different bin counts."""


class NormalizationMismatch(LrpError):
    """One descriptor is normalized and the other holds raw counts."""


class HeterogeneousEntries(LrpError):
    """Index entries disagree on method, bin count, or normalization."""


class EmptyIndex(LrpError):
    """An index was built from, or loaded with, zero entries."""


class IncompatibleQuery(LrpError):
    """Query descriptor does not match the index profile."""


class TooFewEntries(LrpError):
    """Leave-one-out needs at least two entries."""


class EmptyResults(LrpError):
    """An accuracy metric was asked to summarize zero results."""


class MissingScanSize(LrpError):
    """A result references a scan with no known (or non-positive) size."""


class LayoutMismatch(LrpError):
    """Dataset directory does not match any documented layout."""


class DecodeError(LrpError):
    """File exists but cannot be decoded into an 8-bit grayscale image."""


class TooSmallAfterResize(LrpError):
    """Loaded image is smaller than 3x3 after the resize policy is applied."""


class FormatError(LrpError):
    """A descriptor or index file is malformed."""


class VerificationFailure(LrpError):
    """The convolution path disagreed with the brute-force oracle."""
