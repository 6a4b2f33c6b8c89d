from __future__ import annotations

import numpy as np
import pytest
from conftest import glyph
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bayes_fuzzy_ocr.datasets.glyphs import (
    LabeledGlyph,
    TouchingPair,
    build_training_set,
    crop_to_ink,
    decode_one_hot,
    encode_glyph,
    one_hot,
    pad_top,
    synth_touching,
)
from bayes_fuzzy_ocr.exceptions import CorpusError
from bayes_fuzzy_ocr.segmentation.image import GlyphImage

FIVE_WIDE = glyph("#...#", "#...#", "#####")


def test_labels_are_range_checked():
    with pytest.raises(ValueError):
        LabeledGlyph(FIVE_WIDE, 3, 3)
    with pytest.raises(ValueError):
        LabeledGlyph(FIVE_WIDE, -1, 3)


def test_truth_range_validation_and_tolerance():
    pair = TouchingPair(FIVE_WIDE, (2, 3))
    assert pair.is_correct(2) and pair.is_correct(3)
    assert not pair.is_correct(1)
    assert pair.is_correct(1, tolerance=1) and pair.is_correct(4, tolerance=1)
    for bad in [(0, 2), (3, 2), (2, 5)]:
        with pytest.raises(ValueError):
            TouchingPair(FIVE_WIDE, bad)


# ---------------------------------------------------------------- synth_touching


def test_one_column_overlap():
    pair = synth_touching(FIVE_WIDE, FIVE_WIDE, 1, 4, 7)
    assert pair.image.shape == (3, 9)
    assert pair.truth_range == (4, 5)
    assert (pair.left_label, pair.right_label) == (4, 7)
    assert pair.image == glyph("#...#...#", "#...#...#", "#########")


def test_zero_overlap_abuts():
    pair = synth_touching(FIVE_WIDE, glyph("##", "##"), 0)
    assert pair.image.cols == 7
    assert pair.truth_range == (5, 5)


def test_heights_are_bottom_aligned():
    pair = synth_touching(glyph("#", "#", "#"), glyph("##"), 0)
    assert pair.image == glyph("#..", "#..", "###")


@pytest.mark.parametrize("overlap", [-1, 2, 5])
def test_overlap_must_fit_both_glyphs(overlap):
    with pytest.raises(CorpusError):
        synth_touching(FIVE_WIDE, glyph("##", "##"), overlap)


binary = arrays(np.uint8, st.tuples(st.integers(1, 6), st.integers(2, 8)), elements=st.integers(0, 1))


@given(binary, binary, st.integers(0, 1))
def test_composite_ink_is_bounded(a, b, overlap):
    left, right = GlyphImage(a), GlyphImage(b)
    pair = synth_touching(left, right, overlap)
    assert max(left.ink_count, right.ink_count) <= pair.image.ink_count <= left.ink_count + right.ink_count
    assert pair.image.cols == left.cols + right.cols - overlap
    lo, hi = pair.truth_range
    assert 1 <= lo <= hi <= pair.image.cols - 1


# ---------------------------------------------------------------- encoding


def test_encode_same_shape_is_row_major_identity():
    x = encode_glyph(glyph("#.", ".#"), 2, 2)
    np.testing.assert_array_equal(x, [1.0, -1.0, -1.0, 1.0])
    np.testing.assert_array_equal(encode_glyph(glyph("#.", ".#"), 2, 2, "sigmoid"), [1.0, 0.0, 0.0, 1.0])


def test_encode_upsamples_nearest():
    np.testing.assert_array_equal(encode_glyph(glyph("#."), 1, 4), [1.0, 1.0, -1.0, -1.0])
    np.testing.assert_array_equal(encode_glyph(glyph("#.", ".#"), 4, 4).reshape(4, 4)[:, 0], [1, 1, -1, -1])


def test_encode_rejects_unknown_activation():
    with pytest.raises(ValueError):
        encode_glyph(FIVE_WIDE, 3, 5, "relu")


def test_one_hot_levels():
    np.testing.assert_array_equal(one_hot(2, 4), [-0.9, -0.9, 0.9, -0.9])
    np.testing.assert_array_equal(one_hot(0, 2, "sigmoid"), [0.9, 0.1])
    assert decode_one_hot(one_hot(3, 5)) == 3


# ---------------------------------------------------------------- cropping and subsets


def test_crop_to_ink():
    assert crop_to_ink(glyph("..#.", ".##.")) == glyph(".#", "##")
    blank = glyph("...", "...")
    assert crop_to_ink(blank) == blank


def test_pad_top():
    assert pad_top(glyph("#"), 3) == glyph(".", ".", "#")
    assert pad_top(FIVE_WIDE, 2) == FIVE_WIDE


def test_build_training_set(digit_glyphs):
    data = build_training_set(digit_glyphs, 7, 5)
    assert (data.input_size, data.target_size, len(data)) == (35, 3, 6)
    np.testing.assert_array_equal(data.labels, [0, 1, 2, 0, 1, 2])
    assert [decode_one_hot(t) for t in data.targets] == [0, 1, 2, 0, 1, 2]
    with pytest.raises(ValueError):
        build_training_set([], 7, 5)
