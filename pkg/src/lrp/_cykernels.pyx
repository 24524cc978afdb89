# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled hot kernels: per-pixel line sums and binarized codes.

Semantics are defined by the pure NumPy twin in ``_npkernels``; this module
only exists to make the per-pixel loop fast.  Results must be bit-identical.
"""

import numpy as np


cdef inline void _window_sums(const unsigned char[:, ::1] img,
                              Py_ssize_t r, Py_ssize_t c, int* v) noexcept nogil:
    # Canonical projection order: rows, anti-diagonals, columns, diagonals.
    cdef int a00 = img[r, c],     a01 = img[r, c + 1],     a02 = img[r, c + 2]
    cdef int a10 = img[r + 1, c], a11 = img[r + 1, c + 1], a12 = img[r + 1, c + 2]
    cdef int a20 = img[r + 2, c], a21 = img[r + 2, c + 1], a22 = img[r + 2, c + 2]
    v[0] = a00 + a01 + a02
    v[1] = a10 + a11 + a12
    v[2] = a20 + a21 + a22
    v[3] = a01 + a10
    v[4] = a02 + a11 + a20
    v[5] = a12 + a21
    v[6] = a00 + a10 + a20
    v[7] = a01 + a11 + a21
    v[8] = a02 + a12 + a22
    v[9] = a01 + a12
    v[10] = a00 + a11 + a22
    v[11] = a10 + a21


cdef inline void _ce(int* s, Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    # Branchless compare-exchange; compiles to conditional moves.
    cdef int a = s[i]
    cdef int b = s[j]
    cdef bint swap = a > b
    s[i] = b if swap else a
    s[j] = a if swap else b


cdef inline int _doubled_median(const int* v) noexcept nogil:
    # Selection network for the two middle order statistics of 12 values:
    # Batcher odd-even mergesort pruned to outputs 5 and 6, verified
    # exhaustively over all 0-1 inputs (see tests).
    cdef int s[12]
    cdef Py_ssize_t i
    for i in range(12):
        s[i] = v[i]
    _ce(s, 0, 8); _ce(s, 1, 9); _ce(s, 2, 10); _ce(s, 3, 11)
    _ce(s, 0, 4); _ce(s, 1, 5); _ce(s, 2, 6); _ce(s, 3, 7)
    _ce(s, 4, 8); _ce(s, 5, 9); _ce(s, 6, 10); _ce(s, 7, 11)
    _ce(s, 0, 2); _ce(s, 1, 3); _ce(s, 4, 6); _ce(s, 5, 7)
    _ce(s, 8, 10); _ce(s, 9, 11); _ce(s, 2, 8); _ce(s, 3, 9)
    _ce(s, 2, 4); _ce(s, 3, 5); _ce(s, 6, 8); _ce(s, 7, 9)
    _ce(s, 0, 1); _ce(s, 2, 3); _ce(s, 4, 5); _ce(s, 6, 7)
    _ce(s, 8, 9); _ce(s, 10, 11); _ce(s, 1, 8); _ce(s, 3, 10)
    _ce(s, 3, 6); _ce(s, 5, 8); _ce(s, 5, 6)
    return s[5] + s[6]


cdef inline unsigned short _median_code(const int* v) noexcept nogil:
    cdef int doubled_median = _doubled_median(v)
    cdef Py_ssize_t i
    cdef unsigned short code = 0
    for i in range(12):
        code = (code << 1) | (2 * v[i] >= doubled_median)
    return code


cdef inline unsigned short _minmax_code(const int* v) noexcept nogil:
    cdef int i
    cdef unsigned short code = 0
    for i in range(11):
        code = (code << 1) | (v[i] >= v[i + 1])
    return code


def projection_grid(const unsigned char[:, ::1] image):
    """(H-2, W-2, 12) int16 grid of per-pixel projection vectors."""
    cdef Py_ssize_t h = image.shape[0], w = image.shape[1]
    if h < 3 or w < 3:
        raise ValueError("image must be at least 3x3")
    out = np.empty((h - 2, w - 2, 12), dtype=np.int16)
    cdef short[:, :, ::1] o = out
    cdef Py_ssize_t r, c
    cdef int i
    cdef int v[12]
    with nogil:
        for r in range(h - 2):
            for c in range(w - 2):
                _window_sums(image, r, c, v)
                for i in range(12):
                    o[r, c, i] = <short> v[i]
    return out


def code_grid(const unsigned char[:, ::1] image, str method):
    """(H-2, W-2) uint16 grid of binarized codes ('median' or 'minmax')."""
    cdef Py_ssize_t h = image.shape[0], w = image.shape[1]
    if h < 3 or w < 3:
        raise ValueError("image must be at least 3x3")
    cdef bint use_median
    if method == "median":
        use_median = True
    elif method == "minmax":
        use_median = False
    else:
        raise ValueError(f"unknown method: {method!r}")
    out = np.empty((h - 2, w - 2), dtype=np.uint16)
    cdef unsigned short[:, ::1] o = out
    cdef Py_ssize_t r, c
    cdef int v[12]
    with nogil:
        if use_median:
            for r in range(h - 2):
                for c in range(w - 2):
                    _window_sums(image, r, c, v)
                    o[r, c] = _median_code(v)
        else:
            for r in range(h - 2):
                for c in range(w - 2):
                    _window_sums(image, r, c, v)
                    o[r, c] = _minmax_code(v)
    return out
