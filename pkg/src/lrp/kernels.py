"""The twelve 3x3 line-sum kernels behind the descriptor.

Each of the four directions contributes three binary kernels; convolving an
image with one kernel produces, at every pixel, the sum of the 3x3 window
cells lying on one projection line.  The diagonal directions keep only the
three lines with two or more pixels, so their outer kernels sum two cells
while every other kernel sums three.

Geometry conventions (fixed for reproducibility):

* 0 degrees: the three rows, top to bottom.
* 45 degrees: anti-diagonal families ``row + col`` in {1, 2, 3}; the
  single-pixel corners (0,0) and (2,2) are dropped.
* 90 degrees: the three columns, left to right.
* 135 degrees: diagonal families ``col - row`` in {+1, 0, -1}; the
  single-pixel corners (0,2) and (2,0) are dropped.

Projection vectors concatenate direction-major in the order
0, 45, 90, 135 with the three bins of each direction in the order above.
"""

import enum
from dataclasses import dataclass

import numpy as np


class Direction(enum.Enum):
    """The four projection directions, in canonical order."""

    DEG_0 = 0
    DEG_45 = 45
    DEG_90 = 90
    DEG_135 = 135

    @property
    def degrees(self) -> int:
        return self.value


#: Window cells (row, col) on each projection line, per direction, bin-minor.
LINE_CELLS: dict[Direction, tuple[tuple[tuple[int, int], ...], ...]] = {
    Direction.DEG_0: (
        ((0, 0), (0, 1), (0, 2)),
        ((1, 0), (1, 1), (1, 2)),
        ((2, 0), (2, 1), (2, 2)),
    ),
    Direction.DEG_45: (
        ((0, 1), (1, 0)),
        ((0, 2), (1, 1), (2, 0)),
        ((1, 2), (2, 1)),
    ),
    Direction.DEG_90: (
        ((0, 0), (1, 0), (2, 0)),
        ((0, 1), (1, 1), (2, 1)),
        ((0, 2), (1, 2), (2, 2)),
    ),
    Direction.DEG_135: (
        ((0, 1), (1, 2)),
        ((0, 0), (1, 1), (2, 2)),
        ((1, 0), (2, 1)),
    ),
}

#: Position i of a projection vector holds (direction, bin) = PROJECTION_LAYOUT[i].
PROJECTION_LAYOUT: tuple[tuple[Direction, int], ...] = tuple(
    (direction, bin_index) for direction in Direction for bin_index in range(3)
)


@dataclass(frozen=True)
class RadonKernel:
    """One binary 3x3 kernel: summing its support yields one line sum."""

    direction: Direction
    bin_index: int
    weights: np.ndarray  # 3x3 uint8 grid of {0, 1}

    @property
    def cells(self) -> tuple[tuple[int, int], ...]:
        """Window cells with weight 1, in row-major order."""
        return tuple(zip(*np.nonzero(self.weights)))


def kernel_bank() -> list[RadonKernel]:
    """Return the 12 kernels in canonical order (direction-major, bin-minor)."""
    bank = []
    for direction, bin_index in PROJECTION_LAYOUT:
        weights = np.zeros((3, 3), dtype=np.uint8)
        for r, c in LINE_CELLS[direction][bin_index]:
            weights[r, c] = 1
        weights.setflags(write=False)
        bank.append(RadonKernel(direction, bin_index, weights))
    return bank
