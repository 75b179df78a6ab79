"""Pairwise matching costs and the matched detection loss.

The classification cost of pairing prediction ``i`` with a ground truth
of class ``c`` is the focal-style matching cost

    alpha * (1 - p)**gamma * (-log p) - (1 - alpha) * p**gamma * (-log(1 - p))

evaluated at ``p = scores_i[c]``, i.e. the change in focal loss from
flipping class ``c`` of prediction ``i`` from a negative to a positive
target.  Box costs are an L1 distance on center-size coordinates
normalized by the image size, plus ``1 - giou``.  Because the
classification cost is exactly that focal-loss delta, the total loss of
an assignment decomposes as ``all-background classification loss + sum
of matched pair costs``, which :func:`min_cost_match` exploits to report
the minimized loss alongside the optimal labels.

Scores are probabilities in ``[0, 1]`` and are clamped to
``[1e-8, 1 - 1e-8]`` before any logarithm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .geometry import Box, as_box_array, pairwise_giou
from .matching import BACKGROUND, IGNORE, solve_assignment

__all__ = [
    "SCORE_EPS",
    "Prediction",
    "GroundTruth",
    "CostWeights",
    "LossBreakdown",
    "build_cost_matrix",
    "detection_loss",
    "background_cls_total",
    "min_cost_match",
]

SCORE_EPS = 1e-8


@dataclass(frozen=True, eq=False)
class Prediction:
    """One predicted box with per-class probabilities.

    ``scores`` has one entry per class, each in ``[0, 1]``.  An optional
    scalar ``objectness`` may carry a class-agnostic confidence.
    """

    box: Box
    scores: np.ndarray
    objectness: float | None = None

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 1 or scores.size < 1:
            raise ValueError(f"scores must be a 1-D vector, got shape {scores.shape}")
        if not np.isfinite(scores).all():
            raise ValueError("scores must be finite")
        if (scores < 0.0).any() or (scores > 1.0).any():
            raise ValueError("scores must lie in [0, 1]")
        object.__setattr__(self, "scores", scores)
        if self.objectness is not None and not (0.0 <= self.objectness <= 1.0):
            raise ValueError(f"objectness must lie in [0, 1], got {self.objectness}")

    @property
    def num_classes(self) -> int:
        return int(self.scores.size)

    @property
    def top_score(self) -> float:
        return float(self.scores.max())

    @property
    def top_class(self) -> int:
        return int(self.scores.argmax())


@dataclass(frozen=True)
class GroundTruth:
    """One annotated object: positive-area box, class index, crowd flag."""

    box: Box
    class_id: int
    is_crowd: bool = False

    def __post_init__(self) -> None:
        if self.box.area <= 0.0:
            raise ValueError(f"ground-truth box must have positive area: {self.box}")
        if self.class_id < 0:
            raise ValueError(f"class_id must be >= 0, got {self.class_id}")


@dataclass(frozen=True)
class CostWeights:
    """Weights of the three cost/loss terms plus focal parameters."""

    w_cls: float = 2.0
    w_l1: float = 5.0
    w_giou: float = 2.0
    focal_alpha: float = 0.25
    focal_gamma: float = 2.0

    def __post_init__(self) -> None:
        for name in ("w_cls", "w_l1", "w_giou"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        if self.w_cls == 0.0 and self.w_l1 == 0.0 and self.w_giou == 0.0:
            raise ValueError("at least one cost weight must be positive")
        if not (0.0 < self.focal_alpha < 1.0):
            raise ValueError(f"focal_alpha must lie in (0, 1), got {self.focal_alpha}")
        if self.focal_gamma < 0.0:
            raise ValueError(f"focal_gamma must be >= 0, got {self.focal_gamma}")


class LossBreakdown(NamedTuple):
    """Unweighted sums of the three loss terms."""

    cls: float
    l1: float
    giou: float

    def total(self, weights: CostWeights) -> float:
        return (
            weights.w_cls * self.cls
            + weights.w_l1 * self.l1
            + weights.w_giou * self.giou
        )


def _clamped_scores(preds: Sequence[Prediction]) -> np.ndarray:
    """Stacked ``(M, C)`` score matrix, clamped away from 0 and 1."""
    if not preds:
        return np.zeros((0, 1), dtype=np.float64)
    widths = {p.num_classes for p in preds}
    if len(widths) != 1:
        raise ValueError(f"predictions disagree on class count: {sorted(widths)}")
    scores = np.stack([p.scores for p in preds])
    return np.clip(scores, SCORE_EPS, 1.0 - SCORE_EPS)


def _focal_pos(p: np.ndarray, alpha: float, gamma: float) -> np.ndarray:
    """Focal loss of a positive target at probability ``p``."""
    return alpha * (1.0 - p) ** gamma * (-np.log(p))


def _focal_neg(p: np.ndarray, alpha: float, gamma: float) -> np.ndarray:
    """Focal loss of a negative target at probability ``p``."""
    return (1.0 - alpha) * p**gamma * (-np.log(1.0 - p))


def _normalized_cxcywh(boxes: np.ndarray, image_size: tuple[float, float]) -> np.ndarray:
    w, h = image_size
    if w <= 0 or h <= 0:
        raise ValueError(f"image size must be positive, got {image_size}")
    arr = as_box_array(boxes)
    cxcywh = np.stack(
        [
            0.5 * (arr[:, 0] + arr[:, 2]),
            0.5 * (arr[:, 1] + arr[:, 3]),
            arr[:, 2] - arr[:, 0],
            arr[:, 3] - arr[:, 1],
        ],
        axis=1,
    )
    return cxcywh / np.asarray([w, h, w, h], dtype=np.float64)


def _class_ids(gts: Sequence[GroundTruth], num_classes: int) -> np.ndarray:
    ids = np.asarray([g.class_id for g in gts], dtype=np.int64)
    if ids.size and ids.max() >= num_classes:
        raise ValueError(
            f"ground-truth class {ids.max()} out of range for {num_classes} classes"
        )
    return ids


def build_cost_matrix(
    preds: Sequence[Prediction],
    gts: Sequence[GroundTruth],
    weights: CostWeights = CostWeights(),
    image_size: tuple[float, float] = (1.0, 1.0),
) -> np.ndarray:
    """Pairwise matching cost, shape ``(len(preds), len(gts))``.

    ``cost[i, k] = w_cls * cls_cost + w_l1 * |norm(b_i) - norm(b_k)|_1
    + w_giou * (1 - giou(b_i, b_k))`` where ``cls_cost`` is the focal
    delta described in the module docstring and ``norm`` maps corner
    boxes to image-normalized center-size coordinates.
    """
    m, k = len(preds), len(gts)
    if m == 0 or k == 0:
        return np.zeros((m, k), dtype=np.float64)
    scores = _clamped_scores(preds)
    cls_ids = _class_ids(gts, scores.shape[1])
    p = scores[:, cls_ids]  # (M, K), probability of each gt's class
    alpha, gamma = weights.focal_alpha, weights.focal_gamma
    cls_cost = _focal_pos(p, alpha, gamma) - _focal_neg(p, alpha, gamma)

    pred_boxes = as_box_array([pr.box for pr in preds])
    gt_boxes = as_box_array([g.box for g in gts])
    pn = _normalized_cxcywh(pred_boxes, image_size)
    gn = _normalized_cxcywh(gt_boxes, image_size)
    l1 = np.abs(pn[:, None, :] - gn[None, :, :]).sum(axis=2)
    giou_cost = 1.0 - pairwise_giou(pred_boxes, gt_boxes)

    return weights.w_cls * cls_cost + weights.w_l1 * l1 + weights.w_giou * giou_cost


def detection_loss(
    preds: Sequence[Prediction],
    gts: Sequence[GroundTruth],
    labels: np.ndarray,
    weights: CostWeights = CostWeights(),
    image_size: tuple[float, float] = (1.0, 1.0),
) -> LossBreakdown:
    """Loss of a fixed assignment, as unweighted per-term sums.

    Classification is focal loss over every prediction and class: the
    matched class of an assigned prediction is a positive target, every
    other (prediction, class) pair is a negative.  Box terms are summed
    over matched predictions only.  Predictions labeled ``IGNORE``
    contribute to no term.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (len(preds),):
        raise ValueError(
            f"labels must have one entry per prediction, got shape {labels.shape}"
        )
    if labels.size and labels.max() >= len(gts):
        raise ValueError("assignment refers to a ground truth that does not exist")
    if ((labels < 0) & (labels != BACKGROUND) & (labels != IGNORE)).any():
        raise ValueError("labels must be gt indices, BACKGROUND, or IGNORE")
    if len(preds) == 0:
        return LossBreakdown(0.0, 0.0, 0.0)

    scores = _clamped_scores(preds)
    alpha, gamma = weights.focal_alpha, weights.focal_gamma
    keep = labels != IGNORE
    focal = _focal_neg(scores, alpha, gamma)  # negative target everywhere...
    matched_rows = np.flatnonzero(keep & (labels >= 0))
    if matched_rows.size:
        cls_ids = _class_ids(gts, scores.shape[1])
        tgt = cls_ids[labels[matched_rows]]
        p_tgt = scores[matched_rows, tgt]
        # ...except each matched prediction's target class, which is positive.
        focal[matched_rows, tgt] = _focal_pos(p_tgt, alpha, gamma)
    loss_cls = float(focal[keep].sum())

    if matched_rows.size:
        pred_boxes = as_box_array([preds[i].box for i in matched_rows])
        gt_boxes = as_box_array([gts[labels[i]].box for i in matched_rows])
        pn = _normalized_cxcywh(pred_boxes, image_size)
        gn = _normalized_cxcywh(gt_boxes, image_size)
        loss_l1 = float(np.abs(pn - gn).sum())
        # gt boxes have positive area, so every pair's giou is defined
        pair_giou = np.diagonal(pairwise_giou(pred_boxes, gt_boxes))
        loss_giou = float((1.0 - pair_giou).sum())
    else:
        loss_l1 = 0.0
        loss_giou = 0.0
    return LossBreakdown(loss_cls, loss_l1, loss_giou)


def background_cls_total(
    preds: Sequence[Prediction], weights: CostWeights = CostWeights()
) -> float:
    """Unweighted focal loss if every prediction were background."""
    if not preds:
        return 0.0
    scores = _clamped_scores(preds)
    return float(_focal_neg(scores, weights.focal_alpha, weights.focal_gamma).sum())


def min_cost_match(
    preds: Sequence[Prediction],
    gts: Sequence[GroundTruth],
    weights: CostWeights = CostWeights(),
    image_size: tuple[float, float] = (1.0, 1.0),
) -> tuple[np.ndarray, float]:
    """Optimal one-to-one labels plus the minimized total loss.

    The returned objective is the weighted detection loss of the optimal
    assignment: the sum of matched pair costs plus the all-background
    classification constant that no assignment can affect.
    """
    cost = build_cost_matrix(preds, gts, weights, image_size)
    labels = solve_assignment(cost)
    matched = labels >= 0
    pair_total = float(cost[matched, labels[matched]].sum())
    objective = pair_total + weights.w_cls * background_cls_total(preds, weights)
    return labels, objective
