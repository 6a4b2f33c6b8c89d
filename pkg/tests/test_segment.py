from __future__ import annotations

import numpy as np
import pytest
from conftest import glyph
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bayes_fuzzy_ocr.exceptions import DimensionMismatchError, NoValidColumnsError
from bayes_fuzzy_ocr.segmentation import (
    CUT_METHODS,
    CutScore,
    FuzzyConfig,
    GlyphImage,
    baseline_cut,
    blank_cut,
    blank_gaps,
    locate_cut,
    peak_to_valley,
    score_columns,
    score_rows,
    second_difference,
    segment,
    select_cut,
    vertical_projection,
)

touching_images = arrays(np.uint8, st.tuples(st.integers(1, 9), st.integers(3, 12)), elements=st.integers(0, 1))


def _scores(rho) -> CutScore:
    rho = np.asarray(rho, dtype=float)
    return CutScore(rho=rho, valid=np.ones(len(rho), bool), features=None)


def _scan_min(values, allowed, tie_break="center"):
    """Linear scan for the smallest value; ties go to the column nearer the centre, then lower index."""
    c = (len(values) - 1) / 2
    best = None
    for i, ok in enumerate(allowed):
        if not ok:
            continue
        if best is None or values[i] < values[best]:
            best = i
        elif values[i] == values[best] and tie_break == "center" and abs(c - i) < abs(c - best):
            best = i
    return best


def _scan_baseline(img, method):
    V = vertical_projection(img)
    inked = np.flatnonzero(V)
    feature = peak_to_valley if method == "g_only" else second_difference
    values = np.full(len(V), np.inf)
    allowed = np.zeros(len(V), bool)
    for i in range(1, len(V) - 1):
        if V[i] == 0 and not (inked.size and inked[0] < i < inked[-1]):
            continue
        value = feature(V, i)
        if value is not None:
            values[i], allowed[i] = -value, True
    return _scan_min(values, allowed)


@st.composite
def gapped_images(draw):
    """Random ink with a white run forced between inked first and last columns."""
    rows = draw(st.integers(1, 6))
    cols = draw(st.integers(3, 12))
    pixels = draw(arrays(np.uint8, (rows, cols), elements=st.integers(0, 1)))
    start = draw(st.integers(1, cols - 2))
    stop = draw(st.integers(start + 1, cols - 1))
    pixels[:, start:stop] = 0
    pixels[draw(st.integers(0, rows - 1)), 0] = 1
    pixels[draw(st.integers(0, rows - 1)), cols - 1] = 1
    return GlyphImage(pixels)


# ---------------------------------------------------------------- select_cut


def test_select_cut_takes_the_minimum():
    assert select_cut(_scores([0.9, 0.2, 0.9])) == 1


def test_select_cut_ties_prefer_centre_then_index():
    assert select_cut(_scores([0.2, 0.9, 0.2])) == 0
    assert select_cut(_scores([0.2, 0.5, 0.5, 0.2, 0.9])) == 3
    assert select_cut(_scores([0.2, 0.5, 0.5, 0.2, 0.9]), tie_break="index") == 0


def test_select_cut_skips_invalid_columns():
    scores = CutScore(rho=np.array([0.0, 0.6, 0.4, 0.0]), valid=np.array([False, True, True, False]), features=None)
    assert select_cut(scores) == 2
    with pytest.raises(NoValidColumnsError):
        select_cut(CutScore(rho=np.zeros(3), valid=np.zeros(3, bool), features=None))


@settings(max_examples=300)
@given(
    st.lists(st.tuples(st.sampled_from([0.0, 0.25, 0.5, 1.0]), st.booleans()), min_size=1, max_size=12),
    st.sampled_from(["center", "index"]),
)
def test_select_cut_matches_linear_scan(cells, tie_break):
    rho = np.array([r for r, _ in cells])
    valid = np.array([v for _, v in cells])
    assume(valid.any())
    scores = CutScore(rho=rho, valid=valid, features=None)
    assert select_cut(scores, tie_break) == _scan_min(rho, valid, tie_break)


# ---------------------------------------------------------------- score_columns


def test_invalid_columns_score_one():
    scores = score_columns(glyph("##.##", "##.##", "#####"))
    assert scores.rho[0] == 1.0 and scores.rho[-1] == 1.0
    assert np.all((scores.rho >= 0) & (scores.rho <= 1))
    frame = scores.to_frame()
    assert list(frame.columns) == ["i", "d", "f", "g_t", "h_t", "rho", "valid"]
    assert frame["i"].tolist() == [0, 1, 2, 3, 4]


def test_narrow_patterns_are_rejected():
    with pytest.raises(DimensionMismatchError):
        score_columns(glyph("##", "##"))
    with pytest.raises(DimensionMismatchError):
        baseline_cut(glyph("##"), "g_only")


def test_row_scores_are_column_scores_of_the_transpose():
    img = glyph("###", "#.#", "###", "..#")
    np.testing.assert_array_equal(score_rows(img).rho, score_columns(img.transpose()).rho)


def test_symmetric_pattern_scores_symmetrically():
    img = glyph("##.##", "#####", "##.##", "#####")
    rho = score_columns(img).rho
    np.testing.assert_allclose(rho, rho[::-1])
    assert select_cut(score_columns(img)) == 2


@settings(max_examples=300)
@given(touching_images)
def test_mirrored_pattern_mirrors_scores_and_cut(pixels):
    img = GlyphImage(pixels)
    scores = score_columns(img)
    mirrored = score_columns(img.mirror())
    np.testing.assert_allclose(mirrored.rho, scores.rho[::-1], atol=1e-12)
    assert np.array_equal(mirrored.valid, scores.valid[::-1])

    valid_rho = scores.rho[scores.valid]
    assume(valid_rho.size > 0 and np.count_nonzero(valid_rho == valid_rho.min()) == 1)
    assert select_cut(mirrored) == img.cols - 1 - select_cut(scores)


# ---------------------------------------------------------------- blank runs


def test_blank_gaps_only_between_ink():
    assert blank_gaps(np.array([0, 2, 0, 0, 1, 0])) == [(2, 3)]
    assert blank_gaps(np.array([1, 0, 1, 0, 0, 1])) == [(1, 1), (3, 4)]
    assert blank_gaps(np.array([0, 3, 3, 0])) == []


def test_blank_cut_takes_widest_run_leftmost_on_ties():
    assert blank_cut(glyph("#.#..#")) == 3
    assert blank_cut(glyph("#..#..#")) == 1
    assert blank_cut(glyph("####")) is None


@pytest.mark.parametrize("method", CUT_METHODS)
def test_blank_column_dominates_every_method(method):
    img = glyph("##...###", "##...###", "##...###")
    assert locate_cut(img, method) == 3


@settings(max_examples=300)
@given(gapped_images())
def test_generated_blank_runs_dominate_every_method(img):
    cut = blank_cut(img)
    V = vertical_projection(img)
    inked = np.flatnonzero(V)
    assert cut is not None and V[cut] == 0
    assert inked[0] < cut < inked[-1]
    for method in CUT_METHODS:
        assert locate_cut(img, method) == cut


def test_locate_cut_rejects_unknown_method():
    with pytest.raises(ValueError):
        locate_cut(glyph("###", "###"), "widest")


# ---------------------------------------------------------------- baselines


def test_g_only_prefers_the_deepest_valley():
    img = glyph(*["#.#"] * 5)
    assert baseline_cut(img, "g_only") == 1
    with pytest.raises(NoValidColumnsError):
        baseline_cut(img, "h_only")


def test_flat_profile_baseline_picks_the_centre():
    img = glyph(*["#####"] * 3)
    assert baseline_cut(img, "g_only") == 2
    assert baseline_cut(img, "h_only") == 2
    assert baseline_cut(img, "g_only", FuzzyConfig(tie_break="index")) == 1


def test_h_only_prefers_the_sharpest_notch():
    img = glyph("######", "######", "##.###", "##.###")
    assert baseline_cut(img, "h_only") == 2


def test_baselines_never_cut_into_a_white_margin():
    # V = [0, 0, 4, 4, 4, 2, 4, 4, 4]; raw g peaks at the margin column 1
    img = glyph("..###.###", "..###.###", "..#######", "..#######")
    assert baseline_cut(img, "g_only") == 5
    assert baseline_cut(img, "h_only") == 5
    assert locate_cut(img, "g_only") == locate_cut(img, "fuzzy") == 5


@settings(max_examples=300)
@given(touching_images, st.sampled_from(["g_only", "h_only"]))
def test_baseline_cut_matches_linear_scan(pixels, method):
    img = GlyphImage(pixels)
    expected = _scan_baseline(img, method)
    if expected is None:
        with pytest.raises(NoValidColumnsError):
            baseline_cut(img, method)
    else:
        assert baseline_cut(img, method) == expected


# ---------------------------------------------------------------- segment


def test_single_character_is_the_identity():
    img = glyph("#.#", "###")
    assert segment(img, 1) == [img]


def test_two_glyphs_split_at_the_gap():
    img = glyph("##...###", "#....#.#", "##...###")
    left, right = segment(img, 2)
    assert (left.cols, right.cols) == (3, 5)
    np.testing.assert_array_equal(np.hstack([left.pixels, right.pixels]), img.pixels)


def test_widest_piece_is_cut_first():
    img = glyph("##..##..##")
    pieces = segment(img, 3)
    assert [p.cols for p in pieces] == [2, 4, 4]
    np.testing.assert_array_equal(np.hstack([p.pixels for p in pieces]), img.pixels)


def test_row_axis_splits_horizontally():
    img = glyph("##...###", "#....#.#", "##...###").transpose()
    top, bottom = segment(img, 2, axis="rows")
    assert (top.rows, bottom.rows) == (3, 5)
    assert top.cols == bottom.cols == img.cols


def test_unsplittable_pattern_stays_whole():
    img = glyph("##", "##")
    assert segment(img, 3) == [img]
    with pytest.raises(ValueError):
        segment(img, 0)


@settings(max_examples=100)
@given(touching_images, st.integers(1, 4))
def test_segment_preserves_every_pixel(pixels, max_chars):
    img = GlyphImage(pixels)
    pieces = segment(img, max_chars)
    assert 1 <= len(pieces) <= max_chars
    np.testing.assert_array_equal(np.hstack([p.pixels for p in pieces]), img.pixels)
