from __future__ import annotations

from typing import Sequence

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bayes_fuzzy_ocr.ann.mlp import Mlp, TrainingSet
from bayes_fuzzy_ocr.datasets.glyphs import LabeledGlyph
from bayes_fuzzy_ocr.segmentation.image import GlyphImage

settings.register_profile(
    "bfocr", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("bfocr")


def glyph(*rows: str) -> GlyphImage:
    """Build a glyph from strings where '#' is ink and '.' is white."""
    return GlyphImage(np.array([[1 if ch == "#" else 0 for ch in row] for row in rows], dtype=np.uint8))


def random_net(sizes: Sequence[int], seed: int, scale: float = 0.5, activation: str = "tanh", use_bias: bool = True) -> Mlp:
    rng = np.random.default_rng(seed)
    net = Mlp.zeros(sizes, activation, use_bias)
    net.weights = [rng.uniform(-scale, scale, size=w.shape) for w in net.weights]
    if use_bias:
        net.biases = [rng.uniform(-scale, scale, size=b.shape) for b in net.biases]
    return net


@pytest.fixture
def xor_data() -> TrainingSet:
    x = np.array([[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]])
    y = np.array([[-0.9], [0.9], [0.9], [-0.9]])
    return TrainingSet(x, y)


@pytest.fixture
def small_data() -> TrainingSet:
    rng = np.random.default_rng(11)
    x = rng.uniform(-1, 1, size=(6, 2))
    y = rng.uniform(-0.9, 0.9, size=(6, 1))
    return TrainingSet(x, y)


@pytest.fixture
def digit_glyphs() -> list[LabeledGlyph]:
    """Three hand-drawn 7x5 classes, two samples each, in label order 0,1,2,0,1,2."""
    zero = glyph(".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###.")
    one = glyph("..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###.")
    two = glyph(".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####")
    base = [zero, one, two]
    return [LabeledGlyph(base[i % 3], i % 3, 3) for i in range(6)]
