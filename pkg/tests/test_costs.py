import math

import numpy as np
import pytest

import oracles
from helpers import random_gts, random_predictions
from assignkit.costs import (
    CostWeights,
    GroundTruth,
    LossBreakdown,
    Prediction,
    background_cls_total,
    build_cost_matrix,
    detection_loss,
    min_cost_match,
)
from assignkit.geometry import Box
from assignkit.matching import BACKGROUND, IGNORE


ONES = np.ones(3)


def test_prediction_validation():
    Prediction(Box(0, 0, 1, 1), [0.0, 1.0])
    with pytest.raises(ValueError):
        Prediction(Box(0, 0, 1, 1), [[0.5]])
    with pytest.raises(ValueError):
        Prediction(Box(0, 0, 1, 1), [0.5, 1.5])
    with pytest.raises(ValueError):
        Prediction(Box(0, 0, 1, 1), [0.5, np.nan])
    with pytest.raises(ValueError):
        Prediction(Box(0, 0, 1, 1), [0.5], objectness=2.0)


def test_prediction_properties():
    p = Prediction(Box(0, 0, 1, 1), [0.1, 0.7, 0.2])
    assert p.num_classes == 3
    assert p.top_score == 0.7
    assert p.top_class == 1


def test_ground_truth_validation():
    with pytest.raises(ValueError):
        GroundTruth(Box(0, 0, 0, 5), class_id=0)  # zero area
    with pytest.raises(ValueError):
        GroundTruth(Box(0, 0, 1, 1), class_id=-1)


def test_weights_validation():
    with pytest.raises(ValueError):
        CostWeights(w_cls=0.0, w_l1=0.0, w_giou=0.0)
    with pytest.raises(ValueError):
        CostWeights(w_l1=-1.0)
    with pytest.raises(ValueError):
        CostWeights(focal_alpha=1.0)
    with pytest.raises(ValueError):
        CostWeights(focal_gamma=-0.5)


def test_l1_only_hand_value():
    # normalized centers differ by (0.25, 0.25); sizes are equal
    pred = Prediction(Box(0, 0, 2, 2), ONES)
    gt = GroundTruth(Box(1, 1, 3, 3), class_id=0)
    w = CostWeights(w_cls=0.0, w_l1=1.0, w_giou=0.0)
    cost = build_cost_matrix([pred], [gt], w, image_size=(4.0, 4.0))
    assert cost.shape == (1, 1)
    assert cost[0, 0] == 0.5


def test_giou_only_hand_values():
    w = CostWeights(w_cls=0.0, w_l1=0.0, w_giou=1.0)
    same = Prediction(Box(1, 1, 3, 3), ONES)
    gt = GroundTruth(Box(1, 1, 3, 3), class_id=0)
    assert build_cost_matrix([same], [gt], w)[0, 0] == 0.0
    # edge-adjacent unit squares: zero overlap, zero hull slack
    touching = Prediction(Box(3, 1, 5, 3), ONES)
    assert build_cost_matrix([touching], [gt], w)[0, 0] == 1.0


def test_cls_only_hand_value_can_be_negative():
    # at p = 0.5 the positive-target focal term is smaller than the
    # negative-target one, so the matching cost dips below zero
    pred = Prediction(Box(0, 0, 1, 1), [0.5])
    gt = GroundTruth(Box(0, 0, 1, 1), class_id=0)
    w = CostWeights(w_cls=1.0, w_l1=0.0, w_giou=0.0)
    expected = (0.25 * 0.25 - 0.75 * 0.25) * (-math.log(0.5))
    got = build_cost_matrix([pred], [gt], w)[0, 0]
    assert got == pytest.approx(expected, abs=1e-12)
    assert got < 0.0


def test_cost_decreases_as_target_probability_rises():
    gt = GroundTruth(Box(0, 0, 10, 10), class_id=1)
    w = CostWeights()
    costs = []
    for p in (0.0, 0.2, 0.5, 0.8, 1.0):
        pred = Prediction(Box(0, 0, 10, 10), [0.3, p, 0.3])
        costs.append(build_cost_matrix([pred], [gt], w)[0, 0])
    assert all(a > b for a, b in zip(costs, costs[1:]))


def test_extreme_scores_stay_finite():
    preds = [
        Prediction(Box(0, 0, 1, 1), [0.0, 1.0]),
        Prediction(Box(5, 5, 9, 9), [1.0, 0.0]),
    ]
    gts = [GroundTruth(Box(0, 0, 1, 1), 0), GroundTruth(Box(5, 5, 9, 9), 1)]
    cost = build_cost_matrix(preds, gts)
    assert np.isfinite(cost).all()
    loss = detection_loss(preds, gts, np.array([0, 1]))
    assert all(np.isfinite(v) for v in loss)


def test_empty_shapes():
    gts = [GroundTruth(Box(0, 0, 1, 1), 0)]
    preds = [Prediction(Box(0, 0, 1, 1), [0.5])]
    assert build_cost_matrix([], gts).shape == (0, 1)
    assert build_cost_matrix(preds, []).shape == (1, 0)
    assert detection_loss([], [], np.zeros(0, dtype=int)) == LossBreakdown(0, 0, 0)
    assert background_cls_total([]) == 0.0


def test_mismatched_class_counts_rejected():
    preds = [
        Prediction(Box(0, 0, 1, 1), [0.5, 0.5]),
        Prediction(Box(0, 0, 1, 1), [0.5, 0.5, 0.5]),
    ]
    with pytest.raises(ValueError):
        build_cost_matrix(preds, [GroundTruth(Box(0, 0, 1, 1), 0)])


def test_gt_class_out_of_range_rejected():
    preds = [Prediction(Box(0, 0, 1, 1), [0.5, 0.5])]
    with pytest.raises(ValueError):
        build_cost_matrix(preds, [GroundTruth(Box(0, 0, 1, 1), class_id=2)])


def test_label_validation():
    preds = [Prediction(Box(0, 0, 1, 1), [0.5])]
    gts = [GroundTruth(Box(0, 0, 1, 1), 0)]
    with pytest.raises(ValueError):
        detection_loss(preds, gts, np.array([0, 0]))  # wrong length
    with pytest.raises(ValueError):
        detection_loss(preds, gts, np.array([1]))  # no such gt
    with pytest.raises(ValueError):
        detection_loss(preds, gts, np.array([-3]))  # not a label value


def test_cost_entries_match_scalar_reference():
    rng = np.random.default_rng(31)
    size = (640.0, 480.0)
    for _ in range(20):
        preds = random_predictions(rng, int(rng.integers(1, 8)))
        gts = random_gts(rng, int(rng.integers(1, 6)), num_classes=4)
        w = CostWeights(
            w_cls=float(rng.uniform(0, 3)),
            w_l1=float(rng.uniform(0.1, 6)),
            w_giou=float(rng.uniform(0, 3)),
        )
        cost = build_cost_matrix(preds, gts, w, size)
        for i, pr in enumerate(preds):
            for k, gt in enumerate(gts):
                ref = oracles.reference_pair_cost(
                    pr.box.astuple(),
                    pr.scores,
                    gt.box.astuple(),
                    gt.class_id,
                    w,
                    size,
                )
                assert cost[i, k] == pytest.approx(ref, abs=1e-10)


def test_all_background_loss_vanishes_with_zero_scores():
    preds = [
        Prediction(Box(0, 0, 5, 5), np.zeros(7)),
        Prediction(Box(3, 3, 9, 9), np.zeros(7)),
    ]
    gts = [GroundTruth(Box(0, 0, 5, 5), 2)]
    loss = detection_loss(preds, gts, np.array([BACKGROUND, BACKGROUND]))
    assert loss.l1 == 0.0 and loss.giou == 0.0
    assert 0.0 <= loss.cls < 1e-12


def test_ignored_rows_contribute_nothing():
    rng = np.random.default_rng(8)
    preds = random_predictions(rng, 6)
    gts = random_gts(rng, 3, num_classes=4)
    labels = np.array([0, IGNORE, 1, BACKGROUND, IGNORE, 2])
    kept = [p for p, l in zip(preds, labels) if l != IGNORE]
    kept_labels = labels[labels != IGNORE]
    assert detection_loss(preds, gts, labels) == detection_loss(gts=gts, preds=kept, labels=kept_labels)


def test_loss_matches_scalar_reference():
    rng = np.random.default_rng(13)
    size = (640.0, 480.0)
    for _ in range(20):
        m = int(rng.integers(1, 10))
        k = int(rng.integers(1, 5))
        preds = random_predictions(rng, m)
        gts = random_gts(rng, k, num_classes=4)
        labels = rng.integers(-2, k, size=m)
        w = CostWeights()
        loss = detection_loss(preds, gts, labels, w, size)
        ref = oracles.reference_detection_loss(
            [(p.box.astuple(), p.scores) for p in preds],
            [(g.box.astuple(), g.class_id) for g in gts],
            labels,
            w,
            size,
        )
        assert loss.cls == pytest.approx(ref[0], abs=1e-9)
        assert loss.l1 == pytest.approx(ref[1], abs=1e-9)
        assert loss.giou == pytest.approx(ref[2], abs=1e-9)


def test_loss_decomposes_into_background_plus_pair_costs():
    # for any ignore-free labeling: weighted loss equals the constant
    # all-background classification loss plus the matched cost entries
    rng = np.random.default_rng(40)
    size = (640.0, 480.0)
    for _ in range(30):
        m = int(rng.integers(1, 12))
        k = int(rng.integers(1, 6))
        preds = random_predictions(rng, m)
        gts = random_gts(rng, k, num_classes=4)
        labels = rng.integers(-1, k, size=m)
        w = CostWeights(
            w_cls=float(rng.uniform(0.5, 3)),
            w_l1=float(rng.uniform(0.5, 6)),
            w_giou=float(rng.uniform(0.5, 3)),
        )
        total = detection_loss(preds, gts, labels, w, size).total(w)
        cost = build_cost_matrix(preds, gts, w, size)
        matched = labels >= 0
        decomposed = float(cost[matched, labels[matched]].sum()) + w.w_cls * (
            background_cls_total(preds, w)
        )
        assert total == pytest.approx(decomposed, abs=1e-9)


def test_min_cost_match_objective_is_its_own_loss():
    rng = np.random.default_rng(55)
    size = (640.0, 480.0)
    for _ in range(20):
        k = int(rng.integers(1, 6))
        m = int(rng.integers(k, 15))
        preds = random_predictions(rng, m)
        gts = random_gts(rng, k, num_classes=4)
        labels, objective = min_cost_match(preds, gts, image_size=size)
        loss = detection_loss(preds, gts, labels, image_size=size)
        assert objective == pytest.approx(loss.total(CostWeights()), abs=1e-9)


def test_min_cost_match_beats_random_assignments():
    rng = np.random.default_rng(70)
    size = (640.0, 480.0)
    k, m = 4, 9
    preds = random_predictions(rng, m)
    gts = random_gts(rng, k, num_classes=4)
    _, objective = min_cost_match(preds, gts, image_size=size)
    for _ in range(50):
        rows = rng.permutation(m)[:k]
        labels = np.full(m, BACKGROUND)
        labels[rows] = np.arange(k)
        alt = detection_loss(preds, gts, labels, image_size=size).total(CostWeights())
        assert objective <= alt + 1e-9


def test_background_total_matches_scalar_reference():
    rng = np.random.default_rng(90)
    preds = random_predictions(rng, 7)
    w = CostWeights()
    expected = sum(
        oracles.focal_neg(float(p), w.focal_alpha, w.focal_gamma)
        for pr in preds
        for p in pr.scores
    )
    assert background_cls_total(preds, w) == pytest.approx(expected, abs=1e-10)


def test_scale_invariance_of_normalized_terms():
    w = CostWeights(w_cls=0.0, w_l1=5.0, w_giou=2.0)
    small = build_cost_matrix(
        [Prediction(Box(0, 0, 2, 2), ONES)],
        [GroundTruth(Box(1, 1, 3, 3), 0)],
        w,
        image_size=(4.0, 4.0),
    )
    large = build_cost_matrix(
        [Prediction(Box(0, 0, 20, 20), ONES)],
        [GroundTruth(Box(10, 10, 30, 30), 0)],
        w,
        image_size=(40.0, 40.0),
    )
    assert small[0, 0] == pytest.approx(large[0, 0], abs=1e-12)
