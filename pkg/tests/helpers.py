"""Shared random-input builders for the test suites."""

from __future__ import annotations

import numpy as np

from assignkit.costs import GroundTruth, Prediction
from assignkit.geometry import Box


def random_boxes(rng: np.random.Generator, n: int, width=640.0, height=480.0):
    """Uniform random corner-form boxes inside the image."""
    x = np.sort(rng.uniform(0, width, (n, 2)), axis=1)
    y = np.sort(rng.uniform(0, height, (n, 2)), axis=1)
    return np.stack([x[:, 0], y[:, 0], x[:, 1], y[:, 1]], axis=1)


def random_gts(
    rng: np.random.Generator,
    k: int,
    width=640.0,
    height=480.0,
    num_classes=5,
    crowd_prob=0.0,
):
    gts = []
    for _ in range(k):
        side = float(np.exp(rng.uniform(np.log(8.0), np.log(0.5 * min(width, height)))))
        aspect = float(np.exp(rng.normal(0.0, 0.25)))
        w = min(side * aspect, width)
        h = min(side / aspect, height)
        cx = rng.uniform(0.5 * w, width - 0.5 * w)
        cy = rng.uniform(0.5 * h, height - 0.5 * h)
        gts.append(
            GroundTruth(
                box=Box.from_cxcywh(cx, cy, w, h),
                class_id=int(rng.integers(num_classes)),
                is_crowd=bool(rng.uniform() < crowd_prob),
            )
        )
    return gts


def assignment_scene(
    rng: np.random.Generator,
    max_boxes=300,
    max_gts=10,
    width=640.0,
    height=480.0,
    crowd_prob=0.0,
):
    """Boxes mixing jittered ground-truth copies with uniform noise.

    The jittered fraction guarantees overlaps all around the usual
    thresholds, so assignment decisions are actually exercised.
    """
    k = int(rng.integers(1, max_gts + 1))
    gts = random_gts(rng, k, width, height, crowd_prob=crowd_prob)
    n_noise = int(rng.integers(1, max(2, max_boxes // 3)))
    n_jitter = int(rng.integers(1, max(2, max_boxes - n_noise)))
    noise = random_boxes(rng, n_noise, width, height)
    src = rng.integers(k, size=n_jitter)
    gt_arr = np.asarray([g.box.astuple() for g in gts])
    cx = 0.5 * (gt_arr[src, 0] + gt_arr[src, 2])
    cy = 0.5 * (gt_arr[src, 1] + gt_arr[src, 3])
    w = gt_arr[src, 2] - gt_arr[src, 0]
    h = gt_arr[src, 3] - gt_arr[src, 1]
    cx = cx + rng.normal(0, 0.15, n_jitter) * w
    cy = cy + rng.normal(0, 0.15, n_jitter) * h
    w = w * np.exp(rng.normal(0, 0.2, n_jitter))
    h = h * np.exp(rng.normal(0, 0.2, n_jitter))
    jit = np.stack([cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2], axis=1)
    boxes = np.concatenate([jit, noise], axis=0)
    perm = rng.permutation(boxes.shape[0])
    return boxes[perm], gts


def random_predictions(
    rng: np.random.Generator, m: int, num_classes=4, width=640.0, height=480.0
):
    boxes = random_boxes(rng, m, width, height)
    preds = []
    for row in boxes:
        scores = rng.uniform(0.0, 1.0, num_classes)
        preds.append(Prediction(box=Box(*row), scores=scores))
    return preds


def clustered_scored_boxes(
    rng: np.random.Generator, n: int, num_clusters=None, width=640.0, height=480.0
):
    """Detector-like piles of near-duplicate boxes with random scores."""
    if n == 0:
        return np.zeros((0, 4)), np.zeros(0), np.zeros(0, dtype=np.int64)
    if num_clusters is None:
        num_clusters = max(1, n // 8)
    ccx = rng.uniform(0, width, num_clusters)
    ccy = rng.uniform(0, height, num_clusters)
    cw = rng.uniform(16, 120, num_clusters)
    ch = rng.uniform(16, 120, num_clusters)
    member = rng.integers(num_clusters, size=n)
    cx = ccx[member] + rng.normal(0, 3, n)
    cy = ccy[member] + rng.normal(0, 3, n)
    w = cw[member] * np.exp(rng.normal(0, 0.08, n))
    h = ch[member] * np.exp(rng.normal(0, 0.08, n))
    boxes = np.stack([cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2], axis=1)
    scores = rng.uniform(0, 1, n)
    classes = rng.integers(0, 4, size=n)
    return boxes, scores, classes
