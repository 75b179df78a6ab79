"""Multi-level initial box grids.

Each pyramid level ``l`` with stride ``s`` tiles the image with one box
per grid cell, centered at ``((col + 0.5) * s, (row + 0.5) * s)``.  The
box size is a fixed fraction of the image that halves per level:
``w = 0.1 * 2**(-l) * W`` and ``h = 0.1 * 2**(-l) * H``.  Level 0 is the
coarsest (largest stride, largest boxes).  Boxes are not clipped to the
image, so border cells may extend past the edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Box

__all__ = [
    "DEFAULT_LEVELS",
    "AnchorGridSpec",
    "Anchor",
    "generate_initial_boxes",
    "anchor_box_array",
    "anchor_centers",
]

# (level index, stride): four levels, coarsest first.
DEFAULT_LEVELS: tuple[tuple[int, int], ...] = ((0, 64), (1, 32), (2, 16), (3, 8))

SIZE_FRACTION = 0.1


@dataclass(frozen=True)
class AnchorGridSpec:
    """Image size plus the pyramid levels to tile.

    ``levels`` holds ``(level_index, stride)`` pairs; level indices and
    strides must be positive/unique.  Grid shape per level is
    ``ceil(H / stride) x ceil(W / stride)``.
    """

    width: float
    height: float
    levels: tuple[tuple[int, int], ...] = DEFAULT_LEVELS

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError(
                f"image size must be positive, got {self.width}x{self.height}"
            )
        if not self.levels:
            raise ValueError("at least one pyramid level is required")
        indices = [l for l, _ in self.levels]
        strides = [s for _, s in self.levels]
        if len(set(indices)) != len(indices):
            raise ValueError(f"duplicate level indices in {self.levels}")
        if any(l < 0 for l in indices):
            raise ValueError(f"level indices must be >= 0, got {indices}")
        if any(s <= 0 for s in strides):
            raise ValueError(f"strides must be positive, got {strides}")

    def grid_shape(self, stride: int) -> tuple[int, int]:
        """(rows, cols) of the cell grid at the given stride."""
        return (math.ceil(self.height / stride), math.ceil(self.width / stride))

    def level_box_size(self, level: int) -> tuple[float, float]:
        """(w, h) of every box on the given level."""
        frac = SIZE_FRACTION * 2.0 ** (-level)
        return (frac * self.width, frac * self.height)

    @property
    def num_anchors(self) -> int:
        total = 0
        for _, stride in self.levels:
            rows, cols = self.grid_shape(stride)
            total += rows * cols
        return total


@dataclass(frozen=True)
class Anchor:
    """One grid cell's initial box plus its provenance on the pyramid."""

    box: Box
    level: int
    grid_pos: tuple[int, int]  # (row, col)
    center: tuple[float, float]


def generate_initial_boxes(spec: AnchorGridSpec) -> list[Anchor]:
    """Enumerate every level's grid, row-major, levels in declared order."""
    out: list[Anchor] = []
    for level, stride in spec.levels:
        rows, cols = spec.grid_shape(stride)
        w, h = spec.level_box_size(level)
        for row in range(rows):
            cy = (row + 0.5) * stride
            for col in range(cols):
                cx = (col + 0.5) * stride
                out.append(
                    Anchor(
                        box=Box.from_cxcywh(cx, cy, w, h),
                        level=level,
                        grid_pos=(row, col),
                        center=(cx, cy),
                    )
                )
    return out


def anchor_box_array(spec: AnchorGridSpec) -> np.ndarray:
    """Corner-form ``(N, 4)`` array of all initial boxes.

    Same boxes and ordering as :func:`generate_initial_boxes`, computed
    without building Anchor objects.
    """
    centers, levels = anchor_centers(spec)
    sizes = np.empty_like(centers)
    for level, _ in spec.levels:
        w, h = spec.level_box_size(level)
        mask = levels == level
        sizes[mask, 0] = w
        sizes[mask, 1] = h
    half = 0.5 * sizes
    return np.concatenate([centers - half, centers + half], axis=1)


def anchor_centers(spec: AnchorGridSpec) -> tuple[np.ndarray, np.ndarray]:
    """All grid-cell centers ``(N, 2)`` and their level indices ``(N,)``."""
    centers = []
    levels = []
    for level, stride in spec.levels:
        rows, cols = spec.grid_shape(stride)
        cy = (np.arange(rows, dtype=np.float64) + 0.5) * stride
        cx = (np.arange(cols, dtype=np.float64) + 0.5) * stride
        gx, gy = np.meshgrid(cx, cy)  # row-major to match generate_initial_boxes
        centers.append(np.stack([gx.ravel(), gy.ravel()], axis=1))
        levels.append(np.full(rows * cols, level, dtype=np.int64))
    return np.concatenate(centers, axis=0), np.concatenate(levels, axis=0)
