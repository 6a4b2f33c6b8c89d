from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from bayes_fuzzy_ocr.ann.mlp import TrainingSet
from bayes_fuzzy_ocr.exceptions import CorpusError
from bayes_fuzzy_ocr.segmentation.image import GlyphImage
from bayes_fuzzy_ocr.settings import PIXEL_LEVELS, SOFT_TARGETS


@dataclass(frozen=True)
class LabeledGlyph:
    image: GlyphImage
    label: int
    class_count: int

    def __post_init__(self):
        if not 0 <= self.label < self.class_count:
            raise ValueError(f"label {self.label} outside 0..{self.class_count - 1}")


@dataclass(frozen=True)
class TouchingPair:
    """Two glyphs merged into one pattern; any cut in [lo, hi] separates them."""

    image: GlyphImage
    truth_range: tuple[int, int]
    left_label: Optional[int] = None
    right_label: Optional[int] = None

    def __post_init__(self):
        lo, hi = self.truth_range
        if not 0 < lo <= hi < self.image.cols:
            raise ValueError(
                f"truth range {self.truth_range} must satisfy 0 < lo <= hi < {self.image.cols}"
            )

    def is_correct(self, cut: int, tolerance: int = 0) -> bool:
        lo, hi = self.truth_range
        return lo - tolerance <= cut <= hi + tolerance


def resample_nearest(img: GlyphImage, rows: int, cols: int) -> np.ndarray:
    """Nearest-neighbour resample; identity when the shape already matches."""
    r_idx = (np.arange(rows) * img.rows) // rows
    c_idx = (np.arange(cols) * img.cols) // cols
    return img.pixels[np.ix_(r_idx, c_idx)]


def encode_glyph(img: GlyphImage, rows: int, cols: int, activation: str = "tanh") -> np.ndarray:
    """Row-major input vector of length rows*cols; ink maps to the activation's high level."""
    if activation not in PIXEL_LEVELS:
        raise ValueError(f"unknown activation {activation!r}")
    white, ink = PIXEL_LEVELS[activation]
    grid = resample_nearest(img, rows, cols)
    return np.where(grid.ravel() == 1, ink, white).astype(float)


def one_hot(label: int, class_count: int, activation: str = "tanh") -> np.ndarray:
    on, off = SOFT_TARGETS[activation]
    y = np.full(class_count, off, dtype=float)
    y[label] = on
    return y


def decode_one_hot(output: np.ndarray) -> int:
    return int(np.argmax(output))


def crop_to_ink(img: GlyphImage) -> GlyphImage:
    """Drop the blank columns on both sides; blank glyphs come back unchanged."""
    inked = np.flatnonzero(img.pixels.any(axis=0))
    if inked.size == 0:
        return img
    return img.columns(int(inked[0]), int(inked[-1]) + 1)


def pad_top(img: GlyphImage, rows: int) -> GlyphImage:
    if img.rows >= rows:
        return img
    pad = np.zeros((rows - img.rows, img.cols), dtype=np.uint8)
    return GlyphImage(np.vstack([pad, img.pixels]))


def synth_touching(
    left: GlyphImage,
    right: GlyphImage,
    overlap: int,
    left_label: Optional[int] = None,
    right_label: Optional[int] = None,
) -> TouchingPair:
    """
    Place ``right`` so its first column sits ``overlap`` columns inside ``left`` and OR the
    rasters. Heights are bottom-aligned. The truth range spans the shared columns, clipped
    to [1, width - 1].
    """
    if overlap < 0:
        raise CorpusError(f"overlap must be >= 0, got {overlap}")
    if overlap >= min(left.cols, right.cols):
        raise CorpusError(
            f"overlap {overlap} must be smaller than both widths ({left.cols}, {right.cols})"
        )
    rows = max(left.rows, right.rows)
    a, b = pad_top(left, rows), pad_top(right, rows)
    width = a.cols + b.cols - overlap
    canvas = np.zeros((rows, width), dtype=np.uint8)
    canvas[:, : a.cols] |= a.pixels
    start = a.cols - overlap
    canvas[:, start:] |= b.pixels
    lo = max(1, start)
    hi = min(width - 1, a.cols)
    return TouchingPair(GlyphImage(canvas), (lo, max(lo, hi)), left_label, right_label)


def stratified_subset(glyphs: Sequence[LabeledGlyph], n: int) -> List[LabeledGlyph]:
    """First ``n`` glyphs taken round-robin by label, each class in file order."""
    by_label: "OrderedDict[int, List[LabeledGlyph]]" = OrderedDict()
    for g in glyphs:
        by_label.setdefault(g.label, []).append(g)
    queues = [by_label[k] for k in sorted(by_label)]
    picked: List[LabeledGlyph] = []
    depth = 0
    while len(picked) < n and any(depth < len(q) for q in queues):
        for q in queues:
            if depth < len(q) and len(picked) < n:
                picked.append(q[depth])
        depth += 1
    return picked


def build_training_set(
    glyphs: Sequence[LabeledGlyph],
    rows: int,
    cols: int,
    activation: str = "tanh",
) -> TrainingSet:
    if not glyphs:
        raise ValueError("no glyphs to encode")
    class_count = glyphs[0].class_count
    inputs = np.stack([encode_glyph(g.image, rows, cols, activation) for g in glyphs])
    targets = np.stack([one_hot(g.label, class_count, activation) for g in glyphs])
    labels = np.asarray([g.label for g in glyphs])
    return TrainingSet(inputs, targets, labels)
