"""Greedy non-maximum suppression and top-k prefilters.

Candidates are visited in descending score order (ties toward the lower
input index).  Each kept box suppresses every remaining candidate whose
IoU with it strictly exceeds the threshold; boxes exactly at the
threshold survive.  In class-aware mode suppression only acts within a
class.  Kept indices are returned in visit order, i.e. descending
score.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import Box, as_box_array

try:  # the compiled kernel is an optional accelerator; the numpy
    # fallback below produces bit-identical results
    from numba import njit
except Exception:  # pragma: no cover - exercised only without numba
    njit = None

__all__ = ["ScoredBox", "nms", "nms_arrays", "topk_prefilter"]


@dataclass(frozen=True)
class ScoredBox:
    """A box with a confidence score, class id, and optional pyramid level."""

    box: Box
    score: float
    class_id: int = 0
    level: int | None = None

    def __post_init__(self) -> None:
        if not np.isfinite(self.score):
            raise ValueError(f"score must be finite, got {self.score}")


def nms(
    dets: Sequence[ScoredBox], iou_threshold: float, class_aware: bool = False
) -> list[int]:
    """Indices (into ``dets``) of the boxes surviving suppression."""
    boxes = as_box_array([d.box for d in dets]) if dets else np.zeros((0, 4))
    scores = np.asarray([d.score for d in dets], dtype=np.float64)
    classes = np.asarray([d.class_id for d in dets], dtype=np.int64)
    kept = nms_arrays(boxes, scores, iou_threshold, classes if class_aware else None)
    return [int(i) for i in kept]


def nms_arrays(
    boxes: np.ndarray,
    scores: np.ndarray,
    iou_threshold: float,
    class_ids: np.ndarray | None = None,
) -> np.ndarray:
    """Array-based greedy suppression; pass ``class_ids`` for class-aware mode.

    Returns kept indices as int64, descending score.  Uses a compiled
    kernel when available and an equivalent vectorized fallback
    otherwise; both compact the candidate list after every kept box, so
    runtime scales with the number of survivors rather than the
    worst-case quadratic bound.
    """
    if not (0.0 <= iou_threshold <= 1.0):
        raise ValueError(f"iou_threshold must lie in [0, 1], got {iou_threshold}")
    boxes = as_box_array(boxes)
    scores = np.asarray(scores, dtype=np.float64)
    n = boxes.shape[0]
    if scores.shape != (n,):
        raise ValueError("scores must have one entry per box")
    if not np.isfinite(scores).all():
        raise ValueError("scores must be finite")
    if n == 0:
        return np.zeros(0, dtype=np.int64)

    areas = (boxes[:, 2] - boxes[:, 0]) * (boxes[:, 3] - boxes[:, 1])
    # descending score, ties broken toward the lower input index
    order = np.lexsort((np.arange(n), -scores))
    sx1 = np.ascontiguousarray(boxes[order, 0])
    sy1 = np.ascontiguousarray(boxes[order, 1])
    sx2 = np.ascontiguousarray(boxes[order, 2])
    sy2 = np.ascontiguousarray(boxes[order, 3])
    sareas = np.ascontiguousarray(areas[order])
    scls = None
    if class_ids is not None:
        scls = np.ascontiguousarray(np.asarray(class_ids, dtype=np.int64)[order])
    thr = float(iou_threshold)
    if _suppress_compiled is not None:
        live = np.arange(n, dtype=np.int64)
        dummy = scls if scls is not None else np.zeros(1, dtype=np.int64)
        nk = _suppress_compiled(
            sx1, sy1, sx2, sy2, sareas, dummy, scls is not None, thr, live
        )
        kept_pos = live[:nk]
    else:
        kept_pos = _suppress_positions_numpy(sx1, sy1, sx2, sy2, sareas, scls, thr)
    return np.asarray(order[kept_pos], dtype=np.int64)


def _suppress_positions(x1, y1, x2, y2, areas, classes, use_classes, thr, live):
    """Greedy suppression over score-sorted boxes.

    ``live`` starts as 0..n-1 and is compacted in place after every
    kept box; returns the number of kept entries (a prefix of
    ``live``).  A candidate survives unless its IoU with the kept box
    strictly exceeds ``thr`` (and, in class-aware mode, the classes
    match).  Non-positive intersections are skipped outright: their
    IoU is zero, which never strictly exceeds a threshold in [0, 1].
    """
    cnt = live.shape[0]
    pos = 0
    while pos < cnt:
        i = live[pos]
        ax1 = x1[i]
        ay1 = y1[i]
        ax2 = x2[i]
        ay2 = y2[i]
        aa = areas[i]
        w = pos + 1
        for t in range(pos + 1, cnt):
            j = live[t]
            if use_classes and classes[j] != classes[i]:
                live[w] = j
                w += 1
                continue
            iw = min(ax2, x2[j]) - max(ax1, x1[j])
            if iw <= 0.0:
                live[w] = j
                w += 1
                continue
            ih = min(ay2, y2[j]) - max(ay1, y1[j])
            if ih <= 0.0:
                live[w] = j
                w += 1
                continue
            inter = iw * ih
            union = (areas[j] + aa) - inter
            if union > 0.0:
                iou = inter / union
            else:
                iou = 0.0
            if not iou > thr:
                live[w] = j
                w += 1
        cnt = w
        pos += 1
    return pos


_suppress_compiled = njit(cache=True)(_suppress_positions) if njit is not None else None


def _suppress_positions_numpy(
    x1: np.ndarray,
    y1: np.ndarray,
    x2: np.ndarray,
    y2: np.ndarray,
    areas: np.ndarray,
    classes: np.ndarray | None,
    thr: float,
) -> np.ndarray:
    """Vectorized twin of :func:`_suppress_positions`, bit-identical output.

    Works on score-sorted copies compacted each round: the survivors
    stay contiguous, so every pass streams instead of gathering through
    an ever-more-scattered index vector.
    """
    pos = np.arange(x1.shape[0], dtype=np.int64)
    degenerate = bool((areas <= 0.0).any())
    kept: list[int] = []
    while pos.size:
        kept.append(int(pos[0]))
        if pos.size == 1:
            break
        iw = np.minimum(x2[0], x2[1:]) - np.maximum(x1[0], x1[1:])
        ih = np.minimum(y2[0], y2[1:]) - np.maximum(y1[0], y1[1:])
        np.maximum(iw, 0.0, out=iw)
        np.maximum(ih, 0.0, out=ih)
        iw *= ih  # iw now holds the intersection area
        union = areas[1:] + areas[0]
        union -= iw
        if degenerate:
            iou = np.zeros(union.size, dtype=np.float64)
            np.divide(iw, union, out=iou, where=union > 0.0)
        else:
            # positive areas guarantee a positive union
            iou = iw
            iou /= union
        suppress = iou > thr
        if classes is not None:
            suppress &= classes[1:] == classes[0]
        keep = ~suppress
        pos = np.compress(keep, pos[1:])
        x1 = np.compress(keep, x1[1:])
        y1 = np.compress(keep, y1[1:])
        x2 = np.compress(keep, x2[1:])
        y2 = np.compress(keep, y2[1:])
        areas = np.compress(keep, areas[1:])
        if classes is not None:
            classes = np.compress(keep, classes[1:])
    return np.asarray(kept, dtype=np.int64)


def topk_prefilter(
    dets: Sequence[ScoredBox], k: int, per_level: bool = False
) -> list[int]:
    """Indices of the k highest-scoring boxes, globally or within each level.

    Ties break toward the lower input index.  With ``per_level`` the cap
    applies independently per pyramid level (boxes with ``level=None``
    form their own trailing group) and groups are emitted in ascending
    level order.  Within a group indices come in descending score order.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if not per_level:
        return [int(i) for i in _topk_indices(dets, k)]
    groups: dict[object, list[int]] = {}
    for idx, det in enumerate(dets):
        groups.setdefault(det.level, []).append(idx)
    out: list[int] = []
    none_last = sorted(groups, key=lambda lv: (lv is None, lv if lv is not None else 0))
    for level in none_last:
        members = groups[level]
        sub = [dets[i] for i in members]
        out.extend(members[i] for i in _topk_indices(sub, k))
    return out


def _topk_indices(dets: Sequence[ScoredBox], k: int) -> np.ndarray:
    scores = np.asarray([d.score for d in dets], dtype=np.float64)
    order = np.lexsort((np.arange(scores.size), -scores))
    return order[:k]
