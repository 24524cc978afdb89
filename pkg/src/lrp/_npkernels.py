"""Pure NumPy implementation of the hot kernels.

This is the fallback used when the compiled extension is unavailable.  It
must produce bit-identical results: integer projections, the same binarized
codes, the same ordering.  All arithmetic stays in exact integer dtypes.
"""

import numpy as np

from .kernels import LINE_CELLS, PROJECTION_LAYOUT

#: MSB-first bit weights for 12-bit and 11-bit codes.
_POW12 = (1 << np.arange(11, -1, -1)).astype(np.uint16)
_POW11 = (1 << np.arange(10, -1, -1)).astype(np.uint16)


def projection_grid(image: np.ndarray) -> np.ndarray:
    """Per-pixel projection vectors for all interior pixels.

    Parameters
    ----------
    image : (H, W) uint8 array, H, W >= 3.

    Returns
    -------
    (H-2, W-2, 12) int16 array; position (r, c, i) is line sum i of the
    3x3 window whose top-left corner is (r, c).
    """
    src = image.astype(np.int16)
    h, w = src.shape
    if h < 3 or w < 3:
        raise ValueError(f"image must be at least 3x3, got {w}x{h}")
    out = np.empty((h - 2, w - 2, 12), dtype=np.int16)
    for i, (direction, bin_index) in enumerate(PROJECTION_LAYOUT):
        plane = out[:, :, i]
        plane.fill(0)
        for dr, dc in LINE_CELLS[direction][bin_index]:
            plane += src[dr : dr + h - 2, dc : dc + w - 2]
    return out


def median_codes(vectors: np.ndarray) -> np.ndarray:
    """12-bit median-threshold codes for an (..., 12) integer array.

    Bit i (MSB-first) is 1 iff value i is >= the median, where the median
    of 12 values is the mean of the 6th and 7th order statistics.  The
    comparison is done as ``2*x >= s6 + s7`` so everything stays integral.
    """
    v = np.asarray(vectors)
    ordered = np.sort(v, axis=-1)
    doubled_median = ordered[..., 5].astype(np.int32) + ordered[..., 6]
    bits = (2 * v.astype(np.int32)) >= doubled_median[..., None]
    return bits.astype(np.uint16) @ _POW12


def minmax_codes(vectors: np.ndarray) -> np.ndarray:
    """11-bit codes: bit i (MSB-first) is 1 iff value i >= value i+1."""
    v = np.asarray(vectors)
    bits = v[..., :-1] >= v[..., 1:]
    return bits.astype(np.uint16) @ _POW11


def code_grid(image: np.ndarray, method: str) -> np.ndarray:
    """Binarized code of every interior pixel as an (H-2, W-2) uint16 grid."""
    grid = projection_grid(image)
    if method == "median":
        return median_codes(grid)
    if method == "minmax":
        return minmax_codes(grid)
    raise ValueError(f"unknown method: {method!r}")
