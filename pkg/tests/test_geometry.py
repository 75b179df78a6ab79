import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from assignkit.geometry import (
    Box,
    as_box_array,
    giou,
    iou,
    pairwise_giou,
    pairwise_iou,
)
from helpers import random_boxes


def test_box_validation():
    Box(0, 0, 0, 0)  # degenerate is fine
    Box(1.5, 2.5, 1.5, 9.0)  # zero width is fine
    with pytest.raises(ValueError):
        Box(2, 0, 1, 1)
    with pytest.raises(ValueError):
        Box(0, 2, 1, 1)
    with pytest.raises(ValueError):
        Box(0, 0, math.nan, 1)
    with pytest.raises(ValueError):
        Box(0, 0, math.inf, 1)


def test_box_conversions_roundtrip():
    b = Box(3.0, 4.0, 10.0, 20.0)
    assert Box.from_xywh(*b.to_xywh()) == b
    assert Box.from_cxcywh(*b.to_cxcywh()) == b
    assert b.area == 7.0 * 16.0
    assert b.center == (6.5, 12.0)


def test_iou_known_values():
    assert iou(Box(0, 0, 2, 2), Box(1, 1, 3, 3)) == pytest.approx(1.0 / 7.0, abs=1e-15)
    assert iou(Box(0, 0, 1, 1), Box(0, 0, 1, 1)) == 1.0
    assert iou(Box(0, 0, 1, 1), Box(2, 2, 3, 3)) == 0.0
    # shared edge only: zero intersection
    assert iou(Box(0, 0, 1, 1), Box(1, 0, 2, 1)) == 0.0
    # both degenerate: union is empty, defined as 0
    assert iou(Box(1, 1, 1, 1), Box(1, 1, 1, 1)) == 0.0
    assert iou(Box(0, 0, 0, 5), Box(0, 0, 0, 5)) == 0.0


def test_giou_known_values():
    assert giou(Box(0, 0, 1, 1), Box(2, 0, 3, 1)) == pytest.approx(-1.0 / 3.0, abs=1e-15)
    assert giou(Box(0, 0, 2, 2), Box(1, 1, 3, 3)) == pytest.approx(-5.0 / 63.0, abs=1e-15)
    assert giou(Box(0, 0, 4, 4), Box(0, 0, 4, 4)) == 1.0


def test_giou_undefined_for_two_degenerate_boxes():
    with pytest.raises(ValueError):
        giou(Box(0, 0, 0, 0), Box(1, 1, 1, 1))
    # a single degenerate side is fine
    assert giou(Box(1, 1, 1, 1), Box(0, 0, 2, 2)) <= 1.0


def test_as_box_array_accepts_boxes_and_rows():
    arr = as_box_array([Box(0, 0, 1, 1), (1, 1, 2, 3)])
    assert arr.shape == (2, 4)
    assert arr.dtype == np.float64
    with pytest.raises(ValueError):
        as_box_array(np.array([[2.0, 0.0, 1.0, 1.0]]))
    with pytest.raises(ValueError):
        as_box_array(np.array([[0.0, 0.0, np.inf, 1.0]]))


def test_pairwise_matches_scalar_loop():
    rng = np.random.default_rng(7)
    a = random_boxes(rng, 20)
    b = random_boxes(rng, 15)
    got_iou = pairwise_iou(a, b)
    got_giou = pairwise_giou(a, b)
    for i in range(20):
        for j in range(15):
            assert got_iou[i, j] == oracles.box_iou(a[i], b[j])
            assert got_giou[i, j] == pytest.approx(
                oracles.box_giou(a[i], b[j]), abs=1e-14
            )


def test_pairwise_empty_shapes():
    assert pairwise_iou(np.zeros((0, 4)), np.zeros((3, 4))).shape == (0, 3)
    assert pairwise_iou(np.zeros((2, 4)), np.zeros((0, 4))).shape == (2, 0)


finite_coord = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@st.composite
def boxes(draw, min_size=0.0):
    x1 = draw(finite_coord)
    y1 = draw(finite_coord)
    w = draw(st.floats(min_size, 1e4))
    h = draw(st.floats(min_size, 1e4))
    return Box(x1, y1, x1 + w, y1 + h)


@given(boxes(), boxes())
def test_iou_symmetric_and_bounded(a, b):
    v = iou(a, b)
    assert v == iou(b, a)
    assert 0.0 <= v <= 1.0


@given(boxes(min_size=1e-3), boxes(min_size=1e-3))
def test_giou_never_exceeds_iou(a, b):
    g = giou(a, b)
    assert -1.0 <= g <= 1.0
    assert g <= iou(a, b) + 1e-12


@given(boxes(min_size=1e-3))
def test_identical_boxes_are_perfect(a):
    assert iou(a, a) == 1.0
    assert giou(a, a) == 1.0


# image-scale boxes: at extreme offset/size ratios the translation itself
# rounds the box dimensions, which no overlap formula can undo
@st.composite
def scaled_boxes(draw):
    x1 = draw(st.floats(-4e3, 4e3))
    y1 = draw(st.floats(-4e3, 4e3))
    w = draw(st.floats(50.0, 1e3))
    h = draw(st.floats(50.0, 1e3))
    return Box(x1, y1, x1 + w, y1 + h)


@given(scaled_boxes(), scaled_boxes(), st.floats(-4e3, 4e3), st.floats(-4e3, 4e3))
def test_translation_invariance(a, b, dx, dy):
    before = iou(a, b)
    after = iou(a.translate(dx, dy), b.translate(dx, dy))
    assert after == pytest.approx(before, abs=1e-12)
    gb = giou(a, b)
    ga = giou(a.translate(dx, dy), b.translate(dx, dy))
    assert ga == pytest.approx(gb, abs=1e-12)


def test_giou_decreases_with_separation():
    a = Box(0, 0, 10, 10)
    values = [giou(a, Box(0 + d, 0, 10 + d, 10)) for d in (0, 5, 12, 30, 100)]
    assert all(x > y for x, y in zip(values, values[1:]))
    assert values[0] == 1.0
    assert values[-1] < 0.0
