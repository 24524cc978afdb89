"""Brute-force reference implementation used as ground truth.

Everything here recomputes what `lrp.core` computes, but by direct
per-window summation in plain Python, from its own hard-coded line
membership tables.  It deliberately shares no computation with the kernel
path (and none of its speed): its only job is to make equivalence tests
meaningful.
"""

from dataclasses import dataclass

import numpy as np

from .core import LrpDescriptor, Method
from .errors import ImageTooSmall, VerificationFailure
from .kernels import Direction

# Line memberships written out independently of lrp.kernels: (row, col)
# offsets within the window, direction-major, three bins per direction.
_LINES_BY_DEGREES = {
    0: ([(0, 0), (0, 1), (0, 2)], [(1, 0), (1, 1), (1, 2)], [(2, 0), (2, 1), (2, 2)]),
    45: ([(0, 1), (1, 0)], [(0, 2), (1, 1), (2, 0)], [(1, 2), (2, 1)]),
    90: ([(0, 0), (1, 0), (2, 0)], [(0, 1), (1, 1), (2, 1)], [(0, 2), (1, 2), (2, 2)]),
    135: ([(0, 1), (1, 2)], [(0, 0), (1, 1), (2, 2)], [(1, 0), (2, 1)]),
}

_FLAT_LINES = [line for deg in (0, 45, 90, 135) for line in _LINES_BY_DEGREES[deg]]


def window_projection(window, direction: Direction) -> tuple[int, int, int]:
    """Three line sums of a 3x3 window for one direction, by direct summation."""
    cells = [[int(x) for x in row] for row in np.asarray(window)]
    if len(cells) != 3 or any(len(row) != 3 for row in cells):
        raise ValueError("window must be 3x3")
    lines = _LINES_BY_DEGREES[direction.degrees]
    return tuple(sum(cells[r][c] for r, c in line) for line in lines)


def window_vector(window) -> list[int]:
    """Full 12-entry projection vector of a 3x3 window, canonical order."""
    parts = []
    for direction in Direction:
        parts.extend(window_projection(window, direction))
    return parts


def reference_median_code(values) -> int:
    """Median-threshold code, reimplemented from scratch."""
    v = [int(x) for x in values]
    ordered = sorted(v)
    twice_median = ordered[5] + ordered[6]
    bits = ["1" if 2 * x >= twice_median else "0" for x in v]
    return int("".join(bits), 2)


def reference_minmax_code(values) -> int:
    """Successor-comparison code, reimplemented from scratch."""
    v = [int(x) for x in values]
    bits = ["1" if v[i] >= v[i + 1] else "0" for i in range(len(v) - 1)]
    return int("".join(bits), 2)


def reference_projections(image) -> np.ndarray:
    """(H-2, W-2, 12) int16 grid computed window by window."""
    arr = np.asarray(image)
    h, w = arr.shape
    if h < 3 or w < 3:
        raise ImageTooSmall(f"need at least 3x3 pixels, got {w}x{h}")
    rows = arr.tolist()
    out = np.empty((h - 2, w - 2, 12), dtype=np.int16)
    for r in range(h - 2):
        for c in range(w - 2):
            out[r, c] = [
                sum(rows[r + dr][c + dc] for dr, dc in line) for line in _FLAT_LINES
            ]
    return out


def reference_descriptor(image, method: Method, normalize: bool = True) -> LrpDescriptor:
    """Descriptor via sliding-window extraction; must equal the fast path exactly."""
    arr = np.asarray(image)
    h, w = arr.shape
    if h < 3 or w < 3:
        raise ImageTooSmall(f"need at least 3x3 pixels, got {w}x{h}")
    rows = arr.tolist()
    binarize = reference_median_code if method is Method.MEDIAN else reference_minmax_code
    counts = [0] * method.n_bins
    for r in range(h - 2):
        for c in range(w - 2):
            vector = [sum(rows[r + dr][c + dc] for dr, dc in line) for line in _FLAT_LINES]
            counts[binarize(vector)] += 1
    if normalize:
        total = (h - 2) * (w - 2)
        bins = np.array(counts, dtype=np.uint64) / np.uint64(total)
    else:
        bins = np.array(counts, dtype=np.uint64)
    return LrpDescriptor(method=method, bins=bins, normalized=normalize, source_dims=(w, h))


@dataclass
class VerifyOutcome:
    """Result of an oracle-equivalence run."""

    trials: int
    failures: list[str]

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_equivalence(
    seed: int = 0,
    trials: int = 1000,
    min_size: int = 3,
    max_size: int = 64,
    backend_name: str | None = None,
    max_reported: int = 10,
) -> VerifyOutcome:
    """Compare the kernel path against the oracle on seeded random images.

    Each trial draws a random image, then checks projection grids for
    integer equality and descriptors (both methods, raw counts) bin for
    bin.  Collects up to ``max_reported`` failure descriptions.
    """
    from . import core  # local import: oracle stays importable on its own

    rng = np.random.default_rng(seed)
    failures: list[str] = []
    for t in range(trials):
        h = int(rng.integers(min_size, max_size + 1))
        w = int(rng.integers(min_size, max_size + 1))
        image = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
        fast_grid = core.local_projections(image, backend_name=backend_name)
        ref_grid = reference_projections(image)
        if not np.array_equal(fast_grid, ref_grid):
            failures.append(f"trial {t}: projection grid mismatch on {w}x{h} image")
        for method in Method:
            fast = core.descriptor(image, method, normalize=False, backend_name=backend_name)
            ref = reference_descriptor(image, method, normalize=False)
            if not np.array_equal(fast.bins, ref.bins):
                failures.append(f"trial {t}: {method.value} descriptor mismatch on {w}x{h} image")
        if len(failures) >= max_reported:
            break
    return VerifyOutcome(trials=trials, failures=failures)


def require_equivalence(seed: int = 0, trials: int = 1000, **kwargs) -> None:
    """Raise VerificationFailure unless `verify_equivalence` passes."""
    outcome = verify_equivalence(seed=seed, trials=trials, **kwargs)
    if not outcome.passed:
        raise VerificationFailure("; ".join(outcome.failures))
