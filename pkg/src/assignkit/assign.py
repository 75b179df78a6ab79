"""Overlap-based one-to-many label assignment.

Every box is considered for exactly one ground truth: the one it
overlaps most (lowest index on ties).  The plain rule marks a box
positive when that best overlap reaches a fixed threshold ``tau``; with
the fallback enabled, the single closest box of each ground truth (its
highest-IoU box, lowest index on ties) is additionally assigned even
below the threshold, so objects with weak overlap still receive a
training signal.

The balanced variant caps the number of positives each ground truth may
collect at ``n`` by raising its effective threshold to
``max(tau, mu_k_n)``, where ``mu_k_n`` is the n-th highest IoU any box
attains against ground truth ``k``; exact ties at the raised threshold
are broken toward lower box indices so the cap is strict.

Crowd-flagged ground truths are never assignment targets.  Background
boxes whose IoU with a crowd region reaches ``tau`` are relabeled
``IGNORE`` so they are excluded from supervision entirely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .costs import GroundTruth
from .geometry import BoxLike, as_box_array, pairwise_iou
from .matching import BACKGROUND, IGNORE

__all__ = [
    "UNBOUNDED",
    "AssignConfig",
    "iou_assign",
    "balanced_iou_assign",
    "sample_foreground",
    "assign_labels",
]

# Sentinel for "no per-ground-truth positive cap".
UNBOUNDED = None


@dataclass(frozen=True)
class AssignConfig:
    """Knobs of the overlap assignment pipeline.

    tau: positive threshold on IoU, in (0, 1].
    balance_k: per-ground-truth positive cap, or UNBOUNDED (None).
    gamma: foreground-ratio cap for random subsampling, or None to keep
        every positive.  At most ``floor(num_boxes * gamma)`` positives
        survive sampling.
    fallback: assign each ground truth's closest box even below tau.
    seed: seed for the foreground subsampling draw.
    sample_before_balance: apply the gamma subsample to the uncapped
        assignment and enforce the balance cap afterwards, instead of
        the default balance-then-sample order.
    """

    tau: float = 0.6
    balance_k: int | None = UNBOUNDED
    gamma: float | None = None
    fallback: bool = True
    seed: int = 0
    sample_before_balance: bool = False

    def __post_init__(self) -> None:
        if not (0.0 < self.tau <= 1.0):
            raise ValueError(f"tau must lie in (0, 1], got {self.tau}")
        if self.balance_k is not None and self.balance_k < 1:
            raise ValueError(f"balance_k must be >= 1 or None, got {self.balance_k}")
        if self.gamma is not None and not (0.0 < self.gamma <= 1.0):
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")


BoxesLike = Union[np.ndarray, Iterable[BoxLike]]


def _prepare(
    boxes: BoxesLike, gts: Sequence[GroundTruth]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """IoU matrix plus target (non-crowd) and crowd column indices."""
    box_arr = as_box_array(boxes)
    crowd = np.asarray([g.is_crowd for g in gts], dtype=bool)
    if len(gts) == 0:
        iou = np.zeros((box_arr.shape[0], 0), dtype=np.float64)
    else:
        iou = pairwise_iou(box_arr, [g.box for g in gts])
    return iou, np.flatnonzero(~crowd), np.flatnonzero(crowd)


def _best_targets(
    iou: np.ndarray, target_cols: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per box: best target column (subset space), its IoU; per target: owner box.

    All argmax ties resolve to the lowest index.  The owner of a target
    is the box with the highest IoU against it; owners are what the
    fallback assigns.
    """
    sub = iou[:, target_cols]
    best = sub.argmax(axis=1)
    best_iou = sub[np.arange(sub.shape[0]), best]
    owners = sub.argmax(axis=0)
    return best, best_iou, owners


def _mark_crowd_ignores(
    labels: np.ndarray, iou: np.ndarray, crowd_cols: np.ndarray, tau: float
) -> np.ndarray:
    if crowd_cols.size == 0 or labels.size == 0:
        return labels
    crowd_iou = iou[:, crowd_cols].max(axis=1)
    labels = labels.copy()
    labels[(labels == BACKGROUND) & (crowd_iou >= tau)] = IGNORE
    return labels


def iou_assign(
    boxes: BoxesLike, gts: Sequence[GroundTruth], config: AssignConfig = AssignConfig()
) -> np.ndarray:
    """Threshold assignment of every box to its highest-IoU ground truth.

    Box ``i`` is labeled with its best-overlap target when that IoU
    reaches ``config.tau``, or when the fallback is enabled and ``i`` is
    that target's owner (highest-IoU box, lowest index on ties).  All
    other boxes are BACKGROUND, except crowd overlaps, which become
    IGNORE.  No per-ground-truth cap is applied.
    """
    iou, target_cols, crowd_cols = _prepare(boxes, gts)
    m = iou.shape[0]
    labels = np.full(m, BACKGROUND, dtype=np.int64)
    if m == 0:
        return labels
    if target_cols.size:
        best, best_iou, owners = _best_targets(iou, target_cols)
        positive = best_iou >= config.tau
        if config.fallback:
            positive |= owners[best] == np.arange(m)
        labels[positive] = target_cols[best[positive]]
    return _mark_crowd_ignores(labels, iou, crowd_cols, config.tau)


def balanced_iou_assign(
    boxes: BoxesLike, gts: Sequence[GroundTruth], config: AssignConfig = AssignConfig()
) -> np.ndarray:
    """Threshold assignment with at most ``balance_k`` positives per ground truth.

    Each target's threshold is raised to ``max(tau, mu)`` with ``mu``
    the balance_k-th highest IoU reached against it (0 when fewer boxes
    exist), the fallback owner is admitted regardless, and any remaining
    excess from exact IoU ties is trimmed keeping the highest-IoU,
    lowest-index boxes.  ``balance_k=UNBOUNDED`` reduces to the uncapped
    rule.
    """
    iou, target_cols, crowd_cols = _prepare(boxes, gts)
    m = iou.shape[0]
    labels = np.full(m, BACKGROUND, dtype=np.int64)
    if m == 0:
        return labels
    n = config.balance_k
    if target_cols.size:
        best, best_iou, owners = _best_targets(iou, target_cols)
        if n is None:
            thresholds = np.full(target_cols.size, config.tau)
        else:
            thresholds = np.asarray(
                [
                    max(config.tau, _nth_highest(iou[:, col], n))
                    for col in target_cols
                ]
            )
        positive = best_iou >= thresholds[best]
        if config.fallback:
            positive |= owners[best] == np.arange(m)
        labels[positive] = target_cols[best[positive]]
        if n is not None:
            labels = _cap_per_target(labels, iou, target_cols, n)
    return _mark_crowd_ignores(labels, iou, crowd_cols, config.tau)


def _nth_highest(column: np.ndarray, n: int) -> float:
    """n-th highest value of a vector, counting duplicates; 0 if too short."""
    if column.size < n:
        return 0.0
    return float(np.partition(column, column.size - n)[column.size - n])


def _cap_per_target(
    labels: np.ndarray, iou: np.ndarray, target_cols: np.ndarray, n: int
) -> np.ndarray:
    """Trim each target's positives to its n best boxes (ties to lower index)."""
    labels = labels.copy()
    for col in target_cols:
        cand = np.flatnonzero(labels == col)
        if cand.size <= n:
            continue
        order = np.lexsort((cand, -iou[cand, col]))
        labels[cand[order[n:]]] = BACKGROUND
    return labels


def sample_foreground(
    labels: np.ndarray, gamma: float, seed: int = 0
) -> np.ndarray:
    """Cap the positive count at ``floor(len(labels) * gamma)``.

    When positives exceed the cap, a uniform random subset of exactly
    the cap size is kept and the rest are relabeled BACKGROUND; IGNORE
    entries are never touched.  Deterministic for a fixed seed.
    """
    if not (0.0 < gamma <= 1.0):
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    labels = np.asarray(labels, dtype=np.int64)
    cap = int(labels.size * gamma)
    positives = np.flatnonzero(labels >= 0)
    if positives.size <= cap:
        return labels.copy()
    rng = np.random.default_rng(seed)
    keep = rng.choice(positives, size=cap, replace=False)
    out = labels.copy()
    drop = np.setdiff1d(positives, keep)
    out[drop] = BACKGROUND
    return out


def assign_labels(
    boxes: BoxesLike, gts: Sequence[GroundTruth], config: AssignConfig = AssignConfig()
) -> np.ndarray:
    """Full assignment pipeline: balance cap plus foreground subsampling.

    Default order applies the balanced (or uncapped) rule first and the
    gamma subsample second.  With ``sample_before_balance`` the uncapped
    assignment is subsampled first and the balance thresholds and cap
    are enforced on the survivors.
    """
    if config.sample_before_balance and config.balance_k is not None:
        labels = iou_assign(boxes, gts, config)
        if config.gamma is not None:
            labels = sample_foreground(labels, config.gamma, config.seed)
        return _rebalance_survivors(labels, boxes, gts, config)
    labels = balanced_iou_assign(boxes, gts, config)
    if config.gamma is not None:
        labels = sample_foreground(labels, config.gamma, config.seed)
    return labels


def _rebalance_survivors(
    labels: np.ndarray,
    boxes: BoxesLike,
    gts: Sequence[GroundTruth],
    config: AssignConfig,
) -> np.ndarray:
    """Apply balanced thresholds and the per-target cap to existing positives."""
    iou, target_cols, _ = _prepare(boxes, gts)
    n = config.balance_k
    assert n is not None
    labels = labels.copy()
    if target_cols.size and labels.size:
        _, _, owners = _best_targets(iou, target_cols)
        col_pos = {int(c): i for i, c in enumerate(target_cols)}
        for col in target_cols:
            threshold = max(config.tau, _nth_highest(iou[:, col], n))
            cand = np.flatnonzero(labels == col)
            if cand.size == 0:
                continue
            owner = cand == int(owners[col_pos[int(col)]])
            below = iou[cand, col] < threshold
            if config.fallback:
                below &= ~owner
            labels[cand[below]] = BACKGROUND
        labels = _cap_per_target(labels, iou, target_cols, n)
    return labels
