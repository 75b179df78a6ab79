"""Axis-aligned box primitives and overlap measures.

Boxes are corner-form ``(x1, y1, x2, y2)`` with ``x1 <= x2`` and
``y1 <= y2``.  Degenerate boxes (zero width or height) are legal inputs
everywhere except where noted; all arithmetic is double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "Box",
    "BoxLike",
    "as_box_array",
    "box_areas",
    "iou",
    "giou",
    "pairwise_iou",
    "pairwise_giou",
]


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle in corner form.

    Coordinates must be finite and ordered (``x1 <= x2``, ``y1 <= y2``).
    Zero-width or zero-height boxes are allowed and carry zero area.
    """

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self) -> None:
        coords = (self.x1, self.y1, self.x2, self.y2)
        if not all(math.isfinite(c) for c in coords):
            raise ValueError(f"box coordinates must be finite, got {coords}")
        if self.x2 < self.x1 or self.y2 < self.y1:
            raise ValueError(
                f"box corners must be ordered (x1 <= x2, y1 <= y2), got {coords}"
            )

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x1 + self.x2), 0.5 * (self.y1 + self.y2))

    @classmethod
    def from_xywh(cls, x: float, y: float, w: float, h: float) -> "Box":
        """Build from top-left corner plus size (COCO bbox layout)."""
        return cls(x, y, x + w, y + h)

    def to_xywh(self) -> tuple[float, float, float, float]:
        return (self.x1, self.y1, self.width, self.height)

    @classmethod
    def from_cxcywh(cls, cx: float, cy: float, w: float, h: float) -> "Box":
        """Build from center plus size."""
        return cls(cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h)

    def to_cxcywh(self) -> tuple[float, float, float, float]:
        cx, cy = self.center
        return (cx, cy, self.width, self.height)

    def translate(self, dx: float, dy: float) -> "Box":
        return Box(self.x1 + dx, self.y1 + dy, self.x2 + dx, self.y2 + dy)

    def clip(self, width: float, height: float) -> "Box":
        """Clip to the image rectangle ``[0, width] x [0, height]``."""
        return Box(
            min(max(self.x1, 0.0), width),
            min(max(self.y1, 0.0), height),
            min(max(self.x2, 0.0), width),
            min(max(self.y2, 0.0), height),
        )

    def astuple(self) -> tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)


BoxLike = Union[Box, Sequence[float]]


def as_box_array(boxes: Union[np.ndarray, Iterable[BoxLike]]) -> np.ndarray:
    """Coerce boxes to a float64 ``(N, 4)`` corner-form array.

    Accepts an ``(N, 4)`` array, an iterable of :class:`Box`, or an
    iterable of 4-sequences.  Validates ordering and finiteness.
    """
    if isinstance(boxes, np.ndarray):
        arr = np.asarray(boxes, dtype=np.float64)
    else:
        rows = [b.astuple() if isinstance(b, Box) else tuple(b) for b in boxes]
        arr = np.asarray(rows, dtype=np.float64).reshape(-1, 4)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise ValueError(f"expected an (N, 4) box array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("box coordinates must be finite")
    if (arr[:, 2] < arr[:, 0]).any() or (arr[:, 3] < arr[:, 1]).any():
        raise ValueError("box corners must be ordered (x1 <= x2, y1 <= y2)")
    return arr


def box_areas(boxes: np.ndarray) -> np.ndarray:
    arr = as_box_array(boxes)
    return (arr[:, 2] - arr[:, 0]) * (arr[:, 3] - arr[:, 1])


def _coerce(b: BoxLike) -> tuple[float, float, float, float]:
    if isinstance(b, Box):
        return b.astuple()
    box = Box(*map(float, b))  # reuses corner/finite validation
    return box.astuple()


def iou(a: BoxLike, b: BoxLike) -> float:
    """Intersection over union of two boxes.

    Defined as 0 when the union has zero area (two degenerate boxes),
    so the result always lies in ``[0, 1]``.
    """
    ax1, ay1, ax2, ay2 = _coerce(a)
    bx1, by1, bx2, by2 = _coerce(b)
    iw = min(ax2, bx2) - max(ax1, bx1)
    ih = min(ay2, by2) - max(ay1, by1)
    if iw <= 0.0 or ih <= 0.0:
        inter = 0.0
    else:
        inter = iw * ih
    area_a = (ax2 - ax1) * (ay2 - ay1)
    area_b = (bx2 - bx1) * (by2 - by1)
    union = area_a + area_b - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def giou(a: BoxLike, b: BoxLike) -> float:
    """Generalized IoU: ``iou - (hull - union) / hull`` in ``[-1, 1]``.

    ``hull`` is the area of the smallest axis-aligned box enclosing both
    inputs.  Undefined (raises) when both boxes have zero area.
    """
    ax1, ay1, ax2, ay2 = _coerce(a)
    bx1, by1, bx2, by2 = _coerce(b)
    area_a = (ax2 - ax1) * (ay2 - ay1)
    area_b = (bx2 - bx1) * (by2 - by1)
    if area_a <= 0.0 and area_b <= 0.0:
        raise ValueError("giou is undefined when both boxes have zero area")
    iw = min(ax2, bx2) - max(ax1, bx1)
    ih = min(ay2, by2) - max(ay1, by1)
    inter = iw * ih if (iw > 0.0 and ih > 0.0) else 0.0
    union = area_a + area_b - inter
    hull = (max(ax2, bx2) - min(ax1, bx1)) * (max(ay2, by2) - min(ay1, by1))
    return inter / union - (hull - union) / hull


def pairwise_iou(
    boxes_a: Union[np.ndarray, Iterable[BoxLike]],
    boxes_b: Union[np.ndarray, Iterable[BoxLike]],
) -> np.ndarray:
    """Vectorized IoU for every pair, shape ``(len(a), len(b))``."""
    a = as_box_array(boxes_a)
    b = as_box_array(boxes_b)
    inter, union = _pairwise_inter_union(a, b)
    out = np.zeros((a.shape[0], b.shape[0]), dtype=np.float64)
    np.divide(inter, union, out=out, where=union > 0.0)
    return out


def pairwise_giou(
    boxes_a: Union[np.ndarray, Iterable[BoxLike]],
    boxes_b: Union[np.ndarray, Iterable[BoxLike]],
) -> np.ndarray:
    """Vectorized generalized IoU for every pair, shape ``(len(a), len(b))``.

    Raises if any pair consists of two zero-area boxes.
    """
    a = as_box_array(boxes_a)
    b = as_box_array(boxes_b)
    inter, union = _pairwise_inter_union(a, b)
    if (union <= 0.0).any():
        raise ValueError("giou is undefined when both boxes have zero area")
    hull_w = np.maximum(a[:, None, 2], b[None, :, 2]) - np.minimum(
        a[:, None, 0], b[None, :, 0]
    )
    hull_h = np.maximum(a[:, None, 3], b[None, :, 3]) - np.minimum(
        a[:, None, 1], b[None, :, 1]
    )
    hull = hull_w * hull_h
    return inter / union - (hull - union) / hull


def _pairwise_inter_union(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    iw = np.minimum(a[:, None, 2], b[None, :, 2]) - np.maximum(
        a[:, None, 0], b[None, :, 0]
    )
    ih = np.minimum(a[:, None, 3], b[None, :, 3]) - np.maximum(
        a[:, None, 1], b[None, :, 1]
    )
    inter = np.clip(iw, 0.0, None) * np.clip(ih, 0.0, None)
    areas_a = (a[:, 2] - a[:, 0]) * (a[:, 3] - a[:, 1])
    areas_b = (b[:, 2] - b[:, 0]) * (b[:, 3] - b[:, 1])
    union = areas_a[:, None] + areas_b[None, :] - inter
    return inter, union
