"""Local Radon Patterns descriptor: projections, binarization, histogram.

An image descriptor is built in three steps:

1. For every interior pixel, sum the 3x3 window along the lines of four
   directions (see `lrp.kernels`), giving a vector of 12 small integers.
2. Binarize the vector: either threshold at its median (12 bits) or compare
   each element with its successor (11 bits).  First element becomes the
   most significant bit.
3. Count the codes in a histogram of 4096 (median) or 2048 (minmax) bins,
   optionally L1-normalized so images of different sizes are comparable.

Grayscale images are plain 2D uint8 arrays throughout.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .errors import ImageTooSmall


class Method(enum.Enum):
    """Binarization method; fixes code width and histogram length."""

    MEDIAN = "median"
    MINMAX = "minmax"

    @property
    def bit_width(self) -> int:
        return 12 if self is Method.MEDIAN else 11

    @property
    def n_bins(self) -> int:
        return 1 << self.bit_width

    @classmethod
    def from_string(cls, text: str) -> "Method":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown method {text!r}; expected 'median' or 'minmax'") from None


@dataclass
class LrpDescriptor:
    """Code histogram of one image.

    ``bins`` holds uint64 counts, or float64 weights summing to 1 when
    ``normalized``.  ``source_dims`` is (width, height) of the source image
    when known; descriptors read back from disk have ``None``.
    """

    method: Method
    bins: np.ndarray
    normalized: bool
    source_dims: tuple[int, int] | None = field(default=None)

    def __post_init__(self):
        if self.bins.shape != (self.method.n_bins,):
            raise ValueError(
                f"{self.method.value} descriptor needs {self.method.n_bins} bins, "
                f"got shape {self.bins.shape}"
            )

    def __eq__(self, other) -> bool:
        if not isinstance(other, LrpDescriptor):
            return NotImplemented
        return (
            self.method is other.method
            and self.normalized == other.normalized
            and np.array_equal(self.bins, other.bins)
        )


def require_gray_image(image) -> np.ndarray:
    """Validate and canonicalize an image to a C-contiguous uint8 2D array."""
    arr = np.asarray(image)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2D grayscale array, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"expected integer intensities, got dtype {arr.dtype}")
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("intensities must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    h, w = arr.shape
    if h < 3 or w < 3:
        raise ImageTooSmall(f"need at least 3x3 pixels, got {w}x{h}")
    return np.ascontiguousarray(arr)


def local_projections(image, backend_name: str | None = None) -> np.ndarray:
    """Projection vectors of every interior pixel.

    Returns an (H-2, W-2, 12) int16 grid; entry (r, c) belongs to the 3x3
    window centered at pixel (r+1, c+1).  Integer-exact.
    """
    arr = require_gray_image(image)
    return backend.projection_grid(arr, backend_name)


def binarize_median(values) -> int:
    """12-bit median-threshold code of one projection vector.

    Bit i (MSB-first) is 1 iff ``values[i] >= median(values)``; the median
    of 12 values is the mean of the 6th and 7th order statistics, compared
    without leaving integer arithmetic.
    """
    v = [int(x) for x in values]
    if len(v) != 12:
        raise ValueError(f"projection vector must have 12 entries, got {len(v)}")
    ordered = sorted(v)
    doubled_median = ordered[5] + ordered[6]
    code = 0
    for x in v:
        code = (code << 1) | (2 * x >= doubled_median)
    return code


def binarize_minmax(values) -> int:
    """11-bit shape code: bit i (MSB-first) is 1 iff ``values[i] >= values[i+1]``."""
    v = [int(x) for x in values]
    if len(v) != 12:
        raise ValueError(f"projection vector must have 12 entries, got {len(v)}")
    code = 0
    for current, following in zip(v, v[1:]):
        code = (code << 1) | (current >= following)
    return code


def descriptor(
    image,
    method: Method = Method.MEDIAN,
    normalize: bool = True,
    backend_name: str | None = None,
) -> LrpDescriptor:
    """LRP histogram of an image.

    Counts one code per interior pixel, so the unnormalized bin sum is
    (W-2) * (H-2).  With ``normalize`` the bins are divided by that total.
    """
    arr = require_gray_image(image)
    codes = backend.code_grid(arr, method.value, backend_name)
    counts = np.bincount(codes.ravel(), minlength=method.n_bins).astype(np.uint64)
    h, w = arr.shape
    if normalize:
        bins = counts / np.uint64((h - 2) * (w - 2))
    else:
        bins = counts
    return LrpDescriptor(method=method, bins=bins, normalized=normalize, source_dims=(w, h))
