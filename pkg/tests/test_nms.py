import importlib

import numpy as np
import pytest

import oracles
from helpers import clustered_scored_boxes, random_boxes
from assignkit.geometry import Box, pairwise_iou
from assignkit.nms import ScoredBox, nms, nms_arrays, topk_prefilter


def sb(x1, y1, x2, y2, score, class_id=0, level=None):
    return ScoredBox(Box(x1, y1, x2, y2), score, class_id, level)


def test_duplicate_is_suppressed_disjoint_survives():
    dets = [
        sb(0, 0, 10, 10, 0.9),
        sb(0, 0, 10, 10, 0.8),  # exact duplicate, lower score
        sb(50, 50, 60, 60, 0.7),
    ]
    assert nms(dets, 0.5) == [0, 2]


def test_kept_in_descending_score_order():
    dets = [
        sb(50, 50, 60, 60, 0.7),
        sb(0, 0, 10, 10, 0.9),
        sb(100, 0, 110, 10, 0.95),
    ]
    assert nms(dets, 0.5) == [2, 1, 0]


def test_score_ties_break_toward_low_index():
    dets = [sb(0, 0, 10, 10, 0.5), sb(0, 0, 10, 10, 0.5)]
    assert nms(dets, 0.5) == [0]
    disjoint = [sb(0, 0, 10, 10, 0.5), sb(50, 0, 60, 10, 0.5)]
    assert nms(disjoint, 0.5) == [0, 1]


def test_threshold_semantics_strictly_greater():
    # overlap exactly at the threshold is kept; just above is suppressed
    a = sb(0, 0, 10, 10, 0.9)
    b = sb(0, 5, 10, 15, 0.8)  # IoU with a = 50/150 = 1/3
    third = 50.0 / 150.0
    assert nms([a, b], third) == [0, 1]
    assert nms([a, b], third - 1e-9) == [0]


def test_threshold_one_keeps_everything():
    rng = np.random.default_rng(1)
    boxes, scores, _ = clustered_scored_boxes(rng, 64)
    kept = nms_arrays(boxes, scores, 1.0)
    assert sorted(int(i) for i in kept) == list(range(64))


def test_threshold_zero_keeps_only_disjoint():
    dets = [
        sb(0, 0, 10, 10, 0.9),
        sb(9, 9, 20, 20, 0.8),  # tiny corner overlap
        sb(30, 30, 40, 40, 0.7),
    ]
    assert nms(dets, 0.0) == [0, 2]


def test_validation():
    with pytest.raises(ValueError):
        nms_arrays(np.zeros((1, 4)), np.array([0.5]), -0.1)
    with pytest.raises(ValueError):
        nms_arrays(np.zeros((1, 4)), np.array([0.5]), 1.5)
    with pytest.raises(ValueError):
        nms_arrays(np.zeros((1, 4)), np.array([np.nan]), 0.5)
    with pytest.raises(ValueError):
        nms_arrays(np.zeros((2, 4)), np.array([0.5]), 0.5)  # length mismatch


def test_empty_input():
    assert nms([], 0.5) == []
    assert list(nms_arrays(np.zeros((0, 4)), np.zeros(0), 0.5)) == []


def test_matches_reference_on_random_sets():
    rng = np.random.default_rng(12)
    for _ in range(60):
        n = int(rng.integers(1, 120))
        boxes, scores, classes = clustered_scored_boxes(rng, n)
        thr = float(rng.uniform(0.2, 0.9))
        assert list(nms_arrays(boxes, scores, thr)) == oracles.reference_nms(
            boxes, scores, thr
        )


def test_matches_reference_class_aware():
    rng = np.random.default_rng(13)
    for _ in range(40):
        n = int(rng.integers(1, 120))
        boxes, scores, classes = clustered_scored_boxes(rng, n)
        thr = float(rng.uniform(0.2, 0.9))
        got = nms_arrays(boxes, scores, thr, class_ids=classes)
        want = oracles.reference_nms(boxes, scores, thr, class_ids=classes)
        assert list(got) == want


def test_class_aware_keeps_cross_class_overlaps():
    dets = [sb(0, 0, 10, 10, 0.9, class_id=0), sb(0, 0, 10, 10, 0.8, class_id=1)]
    assert nms(dets, 0.5) == [0]
    assert nms(dets, 0.5, class_aware=True) == [0, 1]


def test_compiled_and_fallback_paths_agree(monkeypatch):
    nms_mod = importlib.import_module("assignkit.nms")
    if nms_mod._suppress_compiled is None:
        pytest.skip("compiled kernel unavailable")
    rng = np.random.default_rng(18)
    cases = []
    for trial in range(50):
        n = int(rng.integers(1, 120))
        boxes, scores, classes = clustered_scored_boxes(rng, n)
        if trial % 5 == 0:
            flat = int(rng.integers(0, n))  # collapse one box to zero area
            boxes[flat, 2:] = boxes[flat, :2]
        if trial % 3 == 0:
            scores = np.round(scores, 1)  # force score ties
        thr = float(rng.uniform(0.0, 1.0))
        cls = classes if trial % 2 else None
        cases.append((boxes, scores, thr, cls))
    # at-threshold overlap: IoU exactly 50/150 against that same threshold
    cases.append(
        (
            np.array([[0.0, 0.0, 10.0, 10.0], [0.0, 5.0, 10.0, 15.0]]),
            np.array([0.9, 0.8]),
            50.0 / 150.0,
            None,
        )
    )
    compiled = [
        list(nms_arrays(b, s, t, class_ids=c)) for b, s, t, c in cases
    ]
    monkeypatch.setattr(nms_mod, "_suppress_compiled", None)
    fallback = [
        list(nms_arrays(b, s, t, class_ids=c)) for b, s, t, c in cases
    ]
    assert compiled == fallback


def test_idempotent():
    rng = np.random.default_rng(14)
    for _ in range(20):
        boxes, scores, _ = clustered_scored_boxes(rng, 100)
        kept = nms_arrays(boxes, scores, 0.5)
        again = nms_arrays(boxes[kept], scores[kept], 0.5)
        assert list(again) == list(range(len(kept)))


def test_survivors_pairwise_below_threshold():
    rng = np.random.default_rng(15)
    boxes, scores, _ = clustered_scored_boxes(rng, 200)
    thr = 0.55
    kept = nms_arrays(boxes, scores, thr)
    grid = pairwise_iou(boxes[kept], boxes[kept])
    np.fill_diagonal(grid, 0.0)
    assert grid.max(initial=0.0) <= thr


def test_wrapper_and_array_routes_agree():
    rng = np.random.default_rng(16)
    boxes, scores, classes = clustered_scored_boxes(rng, 80)
    dets = [
        ScoredBox(Box(*b), float(s), int(c))
        for b, s, c in zip(boxes, scores, classes)
    ]
    assert nms(dets, 0.6) == list(nms_arrays(boxes, scores, 0.6))
    assert nms(dets, 0.6, class_aware=True) == list(
        nms_arrays(boxes, scores, 0.6, class_ids=classes)
    )


def test_topk_prefilter_global():
    dets = [sb(i, 0, i + 5, 5, s) for i, s in enumerate((0.1, 0.9, 0.5, 0.7))]
    assert topk_prefilter(dets, 2) == [1, 3]
    assert topk_prefilter(dets, 10) == [1, 3, 2, 0]
    # score ties resolve to the lower index
    ties = [sb(0, 0, 5, 5, 0.5), sb(9, 0, 14, 5, 0.5)]
    assert topk_prefilter(ties, 1) == [0]


def test_topk_prefilter_per_level():
    rng = np.random.default_rng(17)
    dets = []
    for level in range(4):
        for _ in range(1500):
            x = float(rng.uniform(0, 600))
            dets.append(sb(x, 0, x + 10, 10, float(rng.uniform()), level=level))
    kept = topk_prefilter(dets, 1000, per_level=True)
    assert len(kept) == 4000
    levels = [dets[i].level for i in kept]
    assert levels == sorted(levels)  # level groups in ascending order
    for level in range(4):
        scores = [dets[i].score for i in kept if dets[i].level == level]
        assert len(scores) == 1000
        assert scores == sorted(scores, reverse=True)


def test_topk_prefilter_per_level_handles_missing_level():
    dets = [
        sb(0, 0, 5, 5, 0.3, level=1),
        sb(10, 0, 15, 5, 0.9, level=None),
        sb(20, 0, 25, 5, 0.7, level=0),
    ]
    # levelless detections form their own trailing group
    assert topk_prefilter(dets, 5, per_level=True) == [2, 0, 1]
